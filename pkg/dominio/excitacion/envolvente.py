"""
Slow-time ramps and quasimomentum cutoffs built from one C-infinity bump.

The bump b(x) = exp(-1/(x(1 - x))) on (0, 1) vanishes to infinite order at
both ends. psi0 is the bump rescaled to [0, tau0] with unit integral and psi
is its primitive; the cutoff Psi0 reuses the normalized primitive as a
smooth step.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from dominio.exceptions import ValidationException

_PANELES = 16
_NODOS, _PESOS = np.polynomial.legendre.leggauss(16)


def bump(x: Any) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    safe = np.where(inside, x, 0.5)
    return np.where(inside, np.exp(-1.0 / (safe * (1.0 - safe))), 0.0)


def _bump_primitive(x: np.ndarray) -> np.ndarray:
    """Integral of the bump over [0, x] by composite Gauss-Legendre, x in [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    edges = np.linspace(0.0, 1.0, _PANELES + 1)
    flat = x.reshape(-1)[:, None, None]
    low = np.minimum(edges[:-1][None, :, None], flat)
    high = np.minimum(edges[1:][None, :, None], flat)
    half = 0.5 * (high - low)
    nodes = low + half * (_NODOS[None, None, :] + 1.0)
    values = np.sum(half * _PESOS[None, None, :] * bump(nodes), axis=(1, 2))
    return values.reshape(x.shape)


BUMP_INTEGRAL = float(_bump_primitive(np.array(1.0)))


def smooth_step(x: Any) -> np.ndarray:
    """Normalized primitive of the bump: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    inner = _bump_primitive(np.clip(x, 0.0, 1.0)) / BUMP_INTEGRAL
    return np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, inner))


def cutoff(eta: Any, pi0: float) -> np.ndarray:
    """Even cutoff Psi0: one on |eta| <= pi0/2, zero on |eta| >= pi0."""
    eta = np.asarray(eta, dtype=float)
    return smooth_step((pi0 - np.abs(eta)) / (0.5 * pi0))


@dataclass(frozen=True)
class EnvelopeSpec:
    """
    Ramp of the excitation in slow time tau.

    Attributes:
        tau0: Ramp length; psi0 is supported on [0, tau0].
    """

    tau0: float = 0.1

    def __post_init__(self) -> None:
        if self.tau0 <= 0.0:
            raise ValidationException(field="excitation.tau0", value=self.tau0, rule="tau0 > 0")

    def psi0(self, tau: Any) -> np.ndarray:
        """Bump with unit integral on [0, tau0]."""
        tau = np.asarray(tau, dtype=float)
        return bump(tau / self.tau0) / (self.tau0 * BUMP_INTEGRAL)

    def psi(self, tau: Any) -> np.ndarray:
        """Primitive of psi0: 0 for tau <= 0 and exactly 1 for tau >= tau0."""
        return smooth_step(np.asarray(tau, dtype=float) / self.tau0)

    def dpsi0(self, tau: Any) -> np.ndarray:
        """Derivative of psi0."""
        x = np.asarray(tau, dtype=float) / self.tau0
        inside = (x > 0.0) & (x < 1.0)
        safe = np.where(inside, x, 0.5)
        factor = (1.0 - 2.0 * safe) / (safe * (1.0 - safe)) ** 2
        return np.where(inside, self.psi0(tau) * factor / self.tau0, 0.0)

    def describe(self) -> Dict[str, Any]:
        return {"shape": "exp(-1/(x(1-x)))", "tau0": self.tau0}
