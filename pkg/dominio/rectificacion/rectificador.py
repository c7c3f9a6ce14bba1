"""
Rectifying change of variables.

The map eta = Y(xi) makes the band exactly equal to its Taylor polynomial,
omega(k_star + Y(xi)) = gamma_nu(xi). Orders 1 and 2 have closed forms; orders
3 and 4, and the forward map, are solved by a vectorized Newton iteration
with a bracketing fallback.
"""

from dataclasses import dataclass
from math import factorial
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from scipy import optimize

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, PreconditionException
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.jet import TaylorJet

logger = get_logger(__name__)

TOLERANCIA_NEWTON = 1e-12
MAX_ITERACIONES = 50
RADIO_DOMINIO = 0.1
HOLGURA_DOMINIO = 1e-9


def gamma_poly(jet: TaylorJet, nu: int, eta: Any, derivative: int = 0) -> np.ndarray:
    """
    Taylor polynomial sum_{j <= nu} omega^(j)(k_star) eta**j / j!.

    ``derivative`` returns the corresponding derivative of the polynomial.
    """
    eta = np.asarray(eta, dtype=float)
    result = np.zeros_like(eta)
    for j in range(derivative, nu + 1):
        result = result + jet.derivs[j] * eta ** (j - derivative) / factorial(j - derivative)
    return result


def _newton(
    g: Callable[[np.ndarray], np.ndarray],
    dg: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    operation: str,
    half_width: float,
) -> np.ndarray:
    x = np.array(x0, dtype=float, copy=True)
    pending = np.ones(x.shape, dtype=bool)
    for _ in range(MAX_ITERACIONES):
        if not pending.any():
            break
        slope = dg(x)
        step = np.where(pending & (slope != 0.0), g(x) / np.where(slope == 0.0, 1.0, slope), 0.0)
        x = x - step
        pending = pending & ((np.abs(step) > TOLERANCIA_NEWTON) | ~np.isfinite(x))
    else:
        pending = pending & (np.abs(g(x)) > TOLERANCIA_NEWTON)
    # un paso de pulido
    slope = dg(x)
    x = np.where(np.isfinite(x) & (slope != 0.0), x - g(x) / np.where(slope == 0.0, 1.0, slope), x)

    bad = pending | ~np.isfinite(x)
    if bad.any():
        flat = x.reshape(-1)
        starts = np.asarray(x0, dtype=float).reshape(-1)
        for i in np.flatnonzero(bad.reshape(-1)):
            flat[i] = _bracketed_root(g, float(starts[i]), operation, half_width, x.shape, i)
        x = flat.reshape(x.shape)
    return x


def _bracketed_root(g, start: float, operation: str, half_width: float, shape, index: int) -> float:
    def scalar(value: float) -> float:
        trial = np.full(shape, value).reshape(-1)
        return float(np.asarray(g(trial.reshape(shape))).reshape(-1)[index])

    width = max(abs(start), half_width, 1e-6)
    for _ in range(12):
        low, high = start - width, start + width
        if scalar(low) * scalar(high) <= 0.0:
            return optimize.brentq(scalar, low, high, xtol=TOLERANCIA_NEWTON)
        width *= 2.0
    raise ConvergenceException(
        operation=operation,
        iterations=MAX_ITERACIONES,
        tolerance=TOLERANCIA_NEWTON,
        context={"start": start},
    )


def _check_domain(values: np.ndarray, radius: float, name: str) -> None:
    if values.size and float(np.max(np.abs(values))) > radius * (1.0 + HOLGURA_DOMINIO):
        raise PreconditionException(
            operation="rectify",
            invariant=f"|{name}| <= pi0 = {radius}",
            context={"max_abs": float(np.max(np.abs(values)))},
        )


def _check_velocity(jet: TaylorJet) -> None:
    if abs(jet.velocity) < 1e-12:
        raise PreconditionException(operation="rectify", invariant="omega'(k_star) != 0")


def y_inverse(
    model: DispersionModel,
    jet: TaylorJet,
    nu: int,
    eta: Any,
    radius: float = RADIO_DOMINIO,
    identity: bool = False,
) -> np.ndarray:
    """
    Rectified coordinate xi = Y^{-1}(eta), solving gamma_nu(xi) = omega(k_star + eta).

    Raises:
        PreconditionException: |eta| > pi0, omega' = 0, or a negative
            discriminant of the quadratic map.
        ConvergenceException: Newton and bracketing both failed (nu >= 3).
    """
    eta = np.asarray(eta, dtype=float)
    _check_domain(eta, radius, "eta")
    if identity:
        return eta.copy()
    _check_velocity(jet)
    delta = model.omega(jet.n0, jet.k_star + eta) - jet.omega
    w1, w2 = jet.velocity, jet.curvature
    if nu == 1:
        return delta / w1
    discriminant = w1**2 + 2.0 * w2 * delta
    if np.any(discriminant < 0.0):
        raise PreconditionException(
            operation="y_inverse",
            invariant="non-negative discriminant of the quadratic rectifying map (domain too large)",
            context={"min_discriminant": float(np.min(discriminant))},
        )
    # forma estable de la raíz continua con la identidad
    quadratic = 2.0 * delta / (w1 + np.sign(w1) * np.sqrt(discriminant))
    if nu == 2:
        return quadratic
    target = jet.omega + delta
    return _newton(
        lambda xi: gamma_poly(jet, nu, xi) - target,
        lambda xi: gamma_poly(jet, nu, xi, derivative=1),
        quadratic,
        "y_inverse",
        radius,
    )


def y_forward(
    model: DispersionModel,
    jet: TaylorJet,
    nu: int,
    xi: Any,
    radius: float = RADIO_DOMINIO,
    identity: bool = False,
) -> np.ndarray:
    """
    Physical offset eta = Y(xi), solving omega(k_star + eta) = gamma_nu(xi).

    Raises:
        PreconditionException: |xi| > pi0 or omega' = 0.
        ConvergenceException: No root found.
    """
    xi = np.asarray(xi, dtype=float)
    _check_domain(xi, radius, "xi")
    if identity:
        return xi.copy()
    _check_velocity(jet)
    target = gamma_poly(jet, nu, xi)
    return _newton(
        lambda eta: model.omega(jet.n0, jet.k_star + eta) - target,
        lambda eta: model.derivative(jet.n0, jet.k_star + eta, 1),
        xi,
        "y_forward",
        radius,
    )


@dataclass(frozen=True)
class RectifyMap:
    """
    Rectifying map of order nu on the domain |xi|, |eta| <= pi0.

    Attributes:
        model: Dispersion model providing omega_{n0}.
        jet: Taylor jet at (n0, k_star).
        nu: Polynomial order, 1 to 4.
        domain_radius: pi0.
        identity: Replace Y and its inverse by the identity.
    """

    model: DispersionModel
    jet: TaylorJet
    nu: int
    domain_radius: float = RADIO_DOMINIO
    identity: bool = False

    def __post_init__(self) -> None:
        if self.nu not in (1, 2, 3, 4):
            raise PreconditionException(operation="RectifyMap", invariant="nu in {1, 2, 3, 4}")

    def gamma(self, xi: Any, derivative: int = 0) -> np.ndarray:
        return gamma_poly(self.jet, self.nu, xi, derivative)

    def inverse(self, eta: Any) -> np.ndarray:
        return y_inverse(self.model, self.jet, self.nu, eta, self.domain_radius, self.identity)

    def forward(self, xi: Any) -> np.ndarray:
        return y_forward(self.model, self.jet, self.nu, xi, self.domain_radius, self.identity)

    def signed_inverse(self, sign: int, eta: Any) -> np.ndarray:
        """Y_s^{-1}(eta) = s Y^{-1}(s eta), the map of the mirrored doublet member."""
        return sign * self.inverse(sign * np.asarray(eta, dtype=float))

    def signed_forward(self, sign: int, xi: Any) -> np.ndarray:
        """Y_s(xi) = s Y(s xi)."""
        return sign * self.forward(sign * np.asarray(xi, dtype=float))

    def signed_gamma(self, sign: int, xi: Any) -> np.ndarray:
        """Linear symbol s * gamma_nu(s xi) of the equation for Z_s."""
        return sign * self.gamma(sign * np.asarray(xi, dtype=float))

    def residual(self, xi: Any) -> np.ndarray:
        """omega(k_star + Y(xi)) - gamma_nu(xi)."""
        eta = self.forward(xi)
        return self.model.omega(self.jet.n0, self.jet.k_star + eta) - self.gamma(xi)

    def residual_sweep(self, n_points: int = 201) -> List[Tuple[float, float, float]]:
        """Rows (eta, xi, residual) on a uniform eta grid over the domain."""
        eta = np.linspace(-self.domain_radius, self.domain_radius, n_points)
        xi = self.inverse(eta)
        residual = self.model.omega(self.jet.n0, self.jet.k_star + eta) - self.gamma(xi)
        return [(float(a), float(b), float(c)) for a, b, c in zip(eta, xi, residual)]

    def describe(self) -> Dict[str, Any]:
        return {"nu": self.nu, "pi0": self.domain_radius, "identity": self.identity, "jet": self.jet.to_dict()}
