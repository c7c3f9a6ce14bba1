"""
Space-domain reconstruction of the approximate solution.

With Bloch modes G_s(r, k) (periodic in r) and envelope fields Z_s,

    U(r) = sum_s exp(i s k_star r) [G Z - i d_k G d_r Z - (1/2) d_k^2 G d_r^2 Z]_s,

truncated after the term of order sigma_g. The member s = -1 uses the mirrored
mode G_-(r, k) = conj(G_+(r, -k)), so real data give a real field.
"""

from abc import ABCMeta, abstractmethod
from dataclasses import dataclass
from math import factorial
from typing import Any, Dict, Mapping, Optional

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import PreconditionException, ValidationException
from dominio.modelo.diferencias import central_derivative
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.hill import HillBand

from .aproximacion import ApproxSolution

logger = get_logger(__name__)

PASO_MODO = 1e-3
MAX_ORDEN_ESPACIAL = 2


class BaseModes(metaclass=ABCMeta):
    """Periodic parts of the Bloch modes of one band."""

    @abstractmethod
    def value(self, n: int, r: np.ndarray, k: float) -> np.ndarray:
        """G_+(r, k) of band ``n``."""

    def signed(self, sign: int, n: int, r: np.ndarray, k: float) -> np.ndarray:
        return self.value(n, r, k) if sign > 0 else np.conj(self.value(n, r, -k))

    def derivative(self, sign: int, n: int, r: np.ndarray, k: float, order: int) -> np.ndarray:
        """k-derivative of G_s(r, k) at every r."""
        if order == 0:
            return self.signed(sign, n, r, k)
        out = np.empty(r.shape, dtype=complex)
        for i, point in enumerate(r):
            probe = np.array([point])
            out[i], _ = central_derivative(
                lambda kk: np.array([self.signed(sign, n, probe, float(v))[0] for v in kk]), k, order, PASO_MODO
            )
        return out

    def describe(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


class ConstantModes(BaseModes):
    """Trivial mode G = 1."""

    def value(self, n: int, r: np.ndarray, k: float) -> np.ndarray:
        return np.ones(np.shape(r), dtype=complex)

    def derivative(self, sign: int, n: int, r: np.ndarray, k: float, order: int) -> np.ndarray:
        return np.ones(r.shape, dtype=complex) if order == 0 else np.zeros(r.shape, dtype=complex)


class SurrogateModes(BaseModes):
    """G(r, k) = 1 + a sin(k) cos(2 pi r): periodic, real and k-dependent."""

    def __init__(self, amplitude: float = 0.2) -> None:
        self.amplitude = float(amplitude)

    def value(self, n: int, r: np.ndarray, k: float) -> np.ndarray:
        return (1.0 + self.amplitude * np.sin(k) * np.cos(2.0 * np.pi * np.asarray(r, dtype=float))).astype(complex)

    def derivative(self, sign: int, n: int, r: np.ndarray, k: float, order: int) -> np.ndarray:
        if order == 0:
            return self.signed(sign, n, r, k)
        # d^j/dk^j sin(k) = sin(k + j pi / 2); G_-(r, k) = 1 - a sin(k) cos(2 pi r)
        return (sign * self.amplitude * np.sin(k + order * np.pi / 2.0) * np.cos(2.0 * np.pi * r)).astype(complex)

    def describe(self) -> Dict[str, Any]:
        return {"kind": "surrogate", "amplitude": self.amplitude}


class HillModes(BaseModes):
    """Periodic parts of the plane-wave eigen-solver."""

    def __init__(self, model: DispersionModel) -> None:
        bands = [b for b in model.bands if isinstance(b, HillBand)]
        if not bands:
            raise PreconditionException(operation="reconstruct_space", invariant="Hill solver bands for Bloch modes")
        self.solver = bands[0].solver

    def value(self, n: int, r: np.ndarray, k: float) -> np.ndarray:
        return self.solver.periodic_part(n, k, np.asarray(r, dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"kind": "hill"}


class FactoryModos:
    """Builds mode providers from the ``reference.modes`` configuration block."""

    @staticmethod
    def obtener_modos(model: DispersionModel, spec: Optional[Mapping[str, Any]] = None) -> BaseModes:
        spec = spec or {}
        kind = spec.get("kind", "hill" if model.provenance == "hill-solver" else "constant")
        if kind == "constant":
            return ConstantModes()
        if kind == "surrogate":
            return SurrogateModes(float(spec.get("amplitude", 0.2)))
        if kind == "hill":
            return HillModes(model)
        raise ValidationException(
            field="reference.modes.kind", value=kind, rule="unknown mode provider", expected="constant, surrogate, hill"
        )


@dataclass(frozen=True)
class SpaceField:
    """
    Samples of the reconstructed field.

    Attributes:
        r: Sample points.
        values: U(r).
        contained: True where r lies inside the envelope grid extent.
        sigma_g: Reconstruction order.
        t: Record time.
    """

    r: np.ndarray
    values: np.ndarray
    contained: np.ndarray
    sigma_g: int
    t: float


def envelope_derivative(approx: ApproxSolution, sign: int, index: int, r: np.ndarray, order: int) -> np.ndarray:
    """d_r^order Z_s at arbitrary r by band-limited interpolation of the grid spectrum."""
    grid = approx.grid
    snap = approx.snapshots[index]
    z = snap.z_plus if sign > 0 else snap.z_minus
    spectrum = grid.fourier(z) * (1j * grid.xi) ** order
    dxi = 2.0 * np.pi / grid.length
    return np.exp(1j * np.outer(r, grid.xi)) @ spectrum * dxi


def reconstruct_space(
    approx: ApproxSolution,
    model: DispersionModel,
    sigma_g: Optional[int] = None,
    r_grid: Any = None,
    index: int = -1,
    modes: Optional[BaseModes] = None,
) -> SpaceField:
    """
    Field U(r) of the approximate solution at record ``index``.

    Args:
        approx: Approximate solution carrying its envelope snapshots.
        model: Dispersion model (selects the default mode provider).
        sigma_g: Order 0, 1 or 2; ``approx.sigma_g`` by default.
        r_grid: Sample points; the envelope grid points by default.
        index: Record index.
        modes: Mode provider; constant modes for synthetic models.

    Raises:
        ValidationException: sigma_g out of range.
        PreconditionException: Approximation without envelope snapshots.
    """
    order = approx.sigma_g if sigma_g is None else int(sigma_g)
    if not 0 <= order <= MAX_ORDEN_ESPACIAL:
        raise ValidationException(field="reconstruct.sigma_g", value=order, rule="sigma_g in {0, 1, 2}")
    if approx.grid is None or not approx.snapshots:
        raise PreconditionException(operation="reconstruct_space", invariant="envelope snapshots available")
    modes = modes or FactoryModos.obtener_modos(model)
    r = approx.grid.x if r_grid is None else np.asarray(r_grid, dtype=float)
    values = np.zeros(r.shape, dtype=complex)
    for sign in (1, -1):
        k = sign * approx.k_star
        bracket = np.zeros(r.shape, dtype=complex)
        for j in range(order + 1):
            mode_term = modes.derivative(sign, approx.n0, r, k, j)
            bracket = bracket + (-1j) ** j / factorial(j) * mode_term * envelope_derivative(approx, sign, index, r, j)
        values = values + np.exp(1j * k * r) * bracket
    contained = np.abs(r) <= 0.5 * approx.grid.length
    if not contained.all():
        logger.warning(
            "Puntos fuera de la región de contención de la envolvente",
            extra={"outside": int(np.count_nonzero(~contained)), "half_length": 0.5 * approx.grid.length},
        )
    return SpaceField(r=r, values=values, contained=contained, sigma_g=order, t=float(approx.times[index]))
