"""
Lattice envelope system: coupled oscillators Z_s(m), m = -M..M, with

    dZ_s/dt = -i s Gamma(s D) Z_s + alpha_pi * Q_s * Z_s**2 Z_-s,

integrated by classical RK4 in the rotating frame (the constant s * w of the
symbol is removed and restored exactly at the record times).
"""

from dataclasses import dataclass, field, replace
from math import ceil
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.enls.coeficientes import EnlsCoefficients, alpha_pi
from dominio.exceptions import NumericalException, PreconditionException, StepRejectedException, ValidationException
from dominio.excitacion.perfiles import BaseProfile

from .simbolos import SIMBOLOS, apply_symbol

logger = get_logger(__name__)

SITIOS_POR_BETA = 20.0
UMBRAL_BORDE = 1e-12
LIMITE_FASE = 0.1
PASO_RETICULO = 0.05


@dataclass(frozen=True)
class LatticeState:
    """
    Site values of both doublet members at fast time ``t``.

    Attributes:
        sites: Integer indices -M..M.
        z_plus: Z_plus(m).
        z_minus: Z_minus(m).
        t: Fast time.
        diagnostics: Run diagnostics (norm drift, boundary peak, steps).
    """

    sites: np.ndarray
    z_plus: np.ndarray
    z_minus: np.ndarray
    t: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.sites.size
        if n < 3 or n % 2 == 0 or self.z_plus.shape != (n,) or self.z_minus.shape != (n,):
            raise ValidationException(field="lattice.sites", value=n, rule="odd site count 2M + 1 with matching fields")

    @property
    def half_width(self) -> int:
        return int(self.sites[-1])

    def field(self, sign: int) -> np.ndarray:
        return self.z_plus if sign > 0 else self.z_minus

    def mass(self, sign: int = 1) -> float:
        """sum_m |Z_s(m)|**2."""
        return float(np.sum(np.abs(self.field(sign)) ** 2))

    def boundary_peak(self) -> float:
        return float(max(abs(z[i]) for z in (self.z_plus, self.z_minus) for i in (0, -1)))

    def peak(self, sign: int = 1) -> float:
        return float(np.max(np.abs(self.field(sign))))


def lattice_state(half_width: int, z_plus: Any, z_minus: Optional[Any] = None) -> LatticeState:
    """State on sites -M..M from arrays or callables of m; Z_minus defaults to conj(Z_plus)."""
    sites = np.arange(-half_width, half_width + 1)

    def values(data: Any) -> np.ndarray:
        return np.asarray(data(sites) if callable(data) else data, dtype=complex)

    zp = values(z_plus)
    zm = np.conj(zp) if z_minus is None else values(z_minus)
    return LatticeState(sites=sites, z_plus=zp, z_minus=zm)


def profile_state(profile: BaseProfile, beta: float, half_width: Optional[int] = None) -> LatticeState:
    """Initial data Z_s(m) = h_s(beta m), with M = ceil(20 / beta) by default."""
    if half_width is None:
        half_width = int(ceil(SITIOS_POR_BETA / beta))
    return lattice_state(
        half_width,
        lambda m: profile.signed_h(1, beta * m),
        lambda m: profile.signed_h(-1, beta * m),
    )


def integrate_lattice_nls(
    coeffs: EnlsCoefficients,
    state: LatticeState,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    t_end: float = 1.0,
    dt: float = PASO_RETICULO,
    kind: str = "gamma2",
    nu: int = 2,
    phase_limit: float = LIMITE_FASE,
    boundary_limit: float = UMBRAL_BORDE,
    periodic: bool = False,
    progress_every: int = 1000,
) -> LatticeState:
    """
    Lattice counterpart of the classical envelope equation.

    Args:
        coeffs: Coefficient set (gammas and Q_s are used).
        state: Initial site values.
        alpha: Overrides the coefficient set's nonlinearity.
        beta: Quasimomentum spread; enables the M >= 20 / beta check.
        t_end: Final fast time.
        dt: Largest RK4 step.
        kind: Lattice symbol (gamma2, sin-series, mixed).
        nu: Order of the sin-series and mixed symbols.
        phase_limit: Largest nonlinear phase per step.
        boundary_limit: Largest |Z| allowed on the end sites.
        periodic: Close the lattice into a ring (no leak check).

    Raises:
        PreconditionException: Lattice narrower than 20 / beta.
        StepRejectedException: Nonlinear phase per step above ``phase_limit``.
        NumericalException: Boundary leak or non-finite values.
    """
    if kind not in SIMBOLOS:
        raise ValidationException(field="lattice.symbol", value=kind, rule="known symbol", expected=", ".join(SIMBOLOS))
    if dt <= 0.0 or t_end < state.t:
        raise ValidationException(field="lattice.dt", value=dt, rule="dt > 0 and t_end >= t")
    if beta is not None and state.half_width < SITIOS_POR_BETA / beta - 1e-9:
        raise PreconditionException(
            operation="integrate_lattice_nls", invariant="M >= 20 / beta",
            context={"M": state.half_width, "beta": beta},
        )
    a = coeffs.alpha_pi if alpha is None else alpha_pi(alpha)
    q = {1: coeffs.Q(1), -1: coeffs.Q(-1)}
    source = coeffs.gammas

    def rhs(y: Tuple[np.ndarray, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        zp, zm = y
        return (
            -1j * apply_symbol(source, 1, zp, kind, nu, True, periodic) + a * q[1] * zp**2 * zm,
            -1j * apply_symbol(source, -1, zm, kind, nu, True, periodic) + a * q[-1] * zm**2 * zp,
        )

    def step(y: Tuple[np.ndarray, np.ndarray], h: float) -> Tuple[np.ndarray, np.ndarray]:
        k1 = rhs(y)
        k2 = rhs(tuple(v + 0.5 * h * k for v, k in zip(y, k1)))  # type: ignore[arg-type]
        k3 = rhs(tuple(v + 0.5 * h * k for v, k in zip(y, k2)))  # type: ignore[arg-type]
        k4 = rhs(tuple(v + h * k for v, k in zip(y, k3)))  # type: ignore[arg-type]
        return tuple(v + h / 6.0 * (p + 2.0 * r + 2.0 * s + u) for v, p, r, s, u in zip(y, k1, k2, k3, k4))  # type: ignore[return-value]

    w0 = float(source[0])
    span = t_end - state.t
    n = max(1, int(ceil(span / dt - 1e-12))) if span > 0.0 else 0
    h = span / n if n else 0.0
    # campo en el marco rotante
    y = (state.z_plus * np.exp(1j * w0 * state.t), state.z_minus * np.exp(-1j * w0 * state.t))
    mass0 = state.mass(1)
    boundary = state.boundary_peak()
    weight = max(abs(q[1]), abs(q[-1]))
    logger.debug("Iniciando integración en el retículo", extra={"sites": state.sites.size, "t_end": t_end, "kind": kind})
    for i in range(n):
        peak = max(float(np.max(np.abs(v))) for v in y)
        measure = a * weight * peak**2 * h
        if measure > phase_limit:
            raise StepRejectedException(operation="integrate_lattice_nls", step=h, measure=measure, limit=phase_limit)
        y = step(y, h)
        t = state.t + (i + 1) * h
        if not all(np.all(np.isfinite(v)) for v in y):
            raise NumericalException(operation="integrate_lattice_nls", quantity="non-finite field", value=t)
        edge = float(max(abs(v[j]) for v in y for j in (0, -1)))
        boundary = max(boundary, edge)
        if not periodic and edge > boundary_limit:
            raise NumericalException(operation="integrate_lattice_nls", quantity="boundary leak", value=edge)
        if progress_every and (i + 1) % progress_every == 0:
            logger.debug("Progreso del retículo", extra={"t": t, "steps": i + 1})

    zp = y[0] * np.exp(-1j * w0 * t_end)
    zm = y[1] * np.exp(1j * w0 * t_end)
    mass1 = float(np.sum(np.abs(zp) ** 2))
    diagnostics = {
        "steps": n,
        "kind": kind,
        "mass_initial": mass0,
        "mass_final": mass1,
        "mass_drift": abs(mass1 - mass0) / mass0 if mass0 else 0.0,
        "boundary_peak": boundary,
        "beta": beta,
    }
    return replace(state, z_plus=zp, z_minus=zm, t=float(t_end), diagnostics=diagnostics)


@dataclass(frozen=True)
class LatticeSpectrum:
    """
    Lattice Fourier transform Z_bar(xi) = sum_m Z(m) exp(-i m xi) on a uniform grid.

    The grid has 2M + 1 points on [-pi, pi), so the inversion
    Z(m) = (1 / (2M + 1)) sum_j Z_bar(xi_j) exp(i m xi_j) is exact on the sites
    and band-limited interpolation between them.
    """

    xi: np.ndarray
    values: np.ndarray
    sites: np.ndarray

    def inverse(self, m: Any = None) -> np.ndarray:
        m = self.sites if m is None else np.asarray(m, dtype=float)
        flat = np.atleast_1d(m).reshape(-1)
        out = np.exp(1j * np.outer(flat, self.xi)) @ self.values / self.xi.size
        return out.reshape(np.shape(m))

    def bandwidth(self, fraction: float = 1.0 - 1e-12) -> float:
        """Smallest |xi| containing ``fraction`` of sum |Z_bar|**2."""
        power = np.abs(self.values) ** 2
        order = np.argsort(np.abs(self.xi))
        cumulative = np.cumsum(power[order]) / np.sum(power)
        index = int(np.searchsorted(cumulative, fraction))
        return float(np.abs(self.xi[order][min(index, order.size - 1)]))


def lattice_fourier(state: LatticeState, sign: int = 1, xi: Optional[Any] = None) -> LatticeSpectrum:
    """Spectrum of Z_s on [-pi, pi); ``xi`` evaluates it at arbitrary points instead."""
    sites = state.sites
    if xi is None:
        n = sites.size
        xi = -np.pi + 2.0 * np.pi * np.arange(n) / n
    xi = np.asarray(xi, dtype=float)
    values = np.exp(-1j * np.outer(xi.reshape(-1), sites)) @ state.field(sign)
    return LatticeSpectrum(xi=xi.reshape(-1), values=values, sites=sites)
