"""
Coefficients of the envelope equations.

For the doublet at (n0, k_star) the envelope Z_s of the member with frequency
sign s obeys

    dZ_s/dt = -i L_s Z_s + alpha_pi * p_s[Z_s, Z_s, Z_-s] + alpha_pi**2 * delta5_s * Z_s**3 Z_-s**2,

with the linear symbol L_s(xi) = s * gamma_nu(s xi). The amplitude p_s is the
Taylor polynomial of order sigma of the modal susceptibility composed with
the rectifying map, stored as monomials xi1**a xi2**b xi3**c; in physical
space xi_j becomes -i d/dx acting on the j-th factor.
"""

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Any, Dict, Iterator, Optional, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, PreconditionException
from dominio.modelo.diferencias import partial_derivatives
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.jet import TaylorJet
from dominio.modelo.nucleos import BaseKernel
from dominio.modelo.susceptibilidad import SyntheticSusceptibility
from dominio.rectificacion.rectificador import RectifyMap

logger = get_logger(__name__)

Monomial = Tuple[int, int, int]

PASO_SUSCEPTIBILIDAD = 2e-3
TOLERANCIA_SUSCEPTIBILIDAD = 1e-6
FACTOR_QUINTICO = 10.0
# alpha con alpha_pi = 1
ALPHA_UNIDAD = 1.0 / (3.0 * (2.0 * np.pi) ** 2)


def alpha_pi(alpha: float) -> float:
    """Normalized nonlinearity 3 alpha (2 pi)**2 (d = 1)."""
    return 3.0 * alpha * (2.0 * np.pi) ** 2


def monomials(sigma: int) -> Iterator[Monomial]:
    """Exponent triples of total degree <= sigma."""
    for m in product(range(sigma + 1), repeat=3):
        if sum(m) <= sigma:
            yield m


@dataclass(frozen=True)
class EnlsCoefficients:
    """
    Complete coefficient set of one envelope model.

    Attributes:
        nu: Dispersion order.
        sigma: Susceptibility order.
        k_star: Carrier quasimomentum.
        n0: Band number.
        gammas: gamma_j = omega^(j)(k_star) / j!, j = 0..nu.
        alpha_pi: 3 alpha (2 pi)**2.
        amplitudes: Per sign, monomial coefficients of p_s; (0, 0, 0) is Q_s.
        delta1: Per sign, memory coefficient of the doublet-member factors.
        delta2: Per sign, memory coefficient of the mirrored factor.
        q5: Per sign, fifth-order modal susceptibility Q5_s.
        delta_cross: Per sign, coupling to the doublet at -k_star.
    """

    nu: int
    sigma: int
    k_star: float
    n0: int
    gammas: Tuple[float, ...]
    alpha_pi: float
    amplitudes: Dict[int, Dict[Monomial, complex]]
    delta1: Dict[int, complex] = field(default_factory=lambda: {1: 0j, -1: 0j})
    delta2: Dict[int, complex] = field(default_factory=lambda: {1: 0j, -1: 0j})
    q5: Dict[int, complex] = field(default_factory=lambda: {1: 0j, -1: 0j})
    delta_cross: Dict[int, complex] = field(default_factory=lambda: {1: 0j, -1: 0j})

    def Q(self, sign: int) -> complex:
        return complex(self.amplitudes[sign].get((0, 0, 0), 0j))

    @property
    def Q_plus(self) -> complex:
        return self.Q(1)

    @property
    def Q_minus(self) -> complex:
        return self.Q(-1)

    def a1(self, sign: int = 1) -> Tuple[complex, complex, complex]:
        """First-order susceptibility coefficients (a11, a12, a13)."""
        amp = self.amplitudes[sign]
        return tuple(complex(amp.get(m, 0j)) for m in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))  # type: ignore[return-value]

    def p2(self, sign: int = 1) -> Dict[Monomial, complex]:
        """Second-order part of the susceptibility polynomial."""
        return {m: c for m, c in self.amplitudes[sign].items() if sum(m) == 2}

    def delta5(self, sign: int = 1) -> complex:
        """Effective quintic coefficient -delta1 Q_s - delta2 Q_-s + Q5_s."""
        return -self.delta1[sign] * self.Q(sign) - self.delta2[sign] * self.Q(-sign) + self.q5[sign]

    def symbol(self, sign: int, xi: Any, nu: Optional[int] = None) -> np.ndarray:
        """Linear symbol s * gamma_nu(s xi)."""
        xi = np.asarray(xi, dtype=float)
        order = self.nu if nu is None else min(nu, self.nu)
        eta = sign * xi
        total = np.zeros(xi.shape)
        for j in range(order + 1):
            total = total + self.gammas[j] * eta**j
        return sign * total

    def truncated(self, nu: Optional[int] = None, sigma: Optional[int] = None) -> "EnlsCoefficients":
        """Coefficient set restricted to lower orders."""
        nu = self.nu if nu is None else min(nu, self.nu)
        sigma = self.sigma if sigma is None else min(sigma, self.sigma)
        amplitudes = {s: {m: c for m, c in amp.items() if sum(m) <= sigma} for s, amp in self.amplitudes.items()}
        return replace(self, nu=nu, sigma=sigma, gammas=self.gammas[: nu + 1], amplitudes=amplitudes)

    def with_alpha(self, alpha: float) -> "EnlsCoefficients":
        return replace(self, alpha_pi=alpha_pi(alpha))

    def to_dict(self) -> Dict[str, Any]:
        def c(value: complex) -> list:
            return [float(np.real(value)), float(np.imag(value))]

        return {
            "nu": self.nu,
            "sigma": self.sigma,
            "k_star": self.k_star,
            "n0": self.n0,
            "gammas": list(self.gammas),
            "alpha_pi": self.alpha_pi,
            "Q_plus": c(self.Q_plus),
            "Q_minus": c(self.Q_minus),
            "a1": [c(v) for v in self.a1(1)],
            "p2": {"".join(map(str, m)): c(v) for m, v in sorted(self.p2(1).items())},
            "delta1": c(self.delta1[1]),
            "delta2": c(self.delta2[1]),
            "Q5": c(self.q5[1]),
            "delta5": c(self.delta5(1)),
            "delta_cross": c(self.delta_cross[1]),
        }


def _amplitude_function(model: DispersionModel, rect: RectifyMap, sign: int):
    k_star, n0 = rect.jet.k_star, rect.jet.n0
    signs = (sign, sign, sign, -sign)
    bands = (n0, n0, n0, n0)

    def g(xis: np.ndarray) -> complex:
        xi1, xi2, xi3 = (float(v) for v in xis)
        ks = (
            sign * k_star + float(rect.signed_forward(sign, xi1 + xi2 + xi3)),
            sign * k_star + float(rect.signed_forward(sign, xi1)),
            sign * k_star + float(rect.signed_forward(sign, xi2)),
            -sign * k_star + float(rect.signed_forward(-sign, xi3)),
        )
        return complex(np.asarray(model.mode_overlap(signs, bands, tuple(np.array([k]) for k in ks)))[0])

    return g


def _taylor_amplitude(model: DispersionModel, rect: RectifyMap, sign: int, sigma: int, step: float) -> Dict[Monomial, complex]:
    g = _amplitude_function(model, rect, sign)
    value, gradient, hessian = partial_derivatives(g, np.zeros(3), sigma, step)
    if not (np.isfinite(value) and np.all(np.isfinite(gradient)) and np.all(np.isfinite(hessian))):
        raise ConvergenceException(operation="susceptibility derivatives", context={"sign": sign})
    if sigma >= 1:
        # control con paso doble
        _, coarse, _ = partial_derivatives(g, np.zeros(3), 1, 2.0 * step)
        error = float(np.max(np.abs(coarse - gradient)))
        if error > TOLERANCIA_SUSCEPTIBILIDAD * max(1.0, abs(value)):
            raise ConvergenceException(
                operation="susceptibility derivatives", residual=error, tolerance=TOLERANCIA_SUSCEPTIBILIDAD,
            )
    amplitude: Dict[Monomial, complex] = {}
    for m in monomials(sigma):
        degree = sum(m)
        if degree == 0:
            amplitude[m] = value
        elif degree == 1:
            amplitude[m] = complex(gradient[m.index(1)])
        else:
            indices = [i for i, e in enumerate(m) for _ in range(e)]
            i, j = indices
            amplitude[m] = complex(hessian[i, j]) * (0.5 if i == j else 1.0)
    return amplitude


def _memory_coefficients(model: DispersionModel, jet: TaylorJet, sign: int) -> Tuple[complex, complex]:
    k, n0 = jet.k_star, jet.n0
    signs = (sign, sign, sign, -sign)
    ks = tuple(np.array([v]) for v in (sign * k, sign * k, sign * k, -sign * k))
    freqs = tuple(s * model.omega(n0, kk) for s, kk in zip(signs[1:], ks[1:]))
    provider = model.susceptibility
    e1 = complex(np.asarray(provider.memory_coefficient(signs, (n0,) * 4, ks, freqs, 1))[0])
    e3 = complex(np.asarray(provider.memory_coefficient(signs, (n0,) * 4, ks, freqs, 3))[0])
    return -2.0 * e1, -e3


def _cross_coefficient(model: DispersionModel, jet: TaylorJet, sign: int) -> complex:
    k, n0 = jet.k_star, jet.n0
    signs = (sign, -sign, -sign, sign)
    ks = tuple(np.array([v]) for v in (sign * k, sign * k, sign * k, -sign * k))
    return 3.0 * complex(np.asarray(model.mode_overlap(signs, (n0,) * 4, ks))[0])


def _with_kernel(model: DispersionModel, kernel: Optional[BaseKernel]) -> DispersionModel:
    if kernel is None:
        return model
    provider = model.susceptibility
    if not isinstance(provider, SyntheticSusceptibility):
        raise PreconditionException(
            operation="extract_coeffs", invariant="kernel override requires a synthetic susceptibility"
        )
    swapped = SyntheticSusceptibility(q_plus=provider.q_plus, s=provider.s, kernel=kernel, q5=provider.q5_plus)
    return replace(model, susceptibility=swapped)


def extract_coeffs(
    model: DispersionModel,
    jet: TaylorJet,
    rect: RectifyMap,
    chi_kernel: Optional[BaseKernel] = None,
    nu: int = 2,
    sigma: int = 0,
    alpha: float = 1.0,
    step: float = PASO_SUSCEPTIBILIDAD,
) -> EnlsCoefficients:
    """
    Every envelope coefficient of the doublet (n0, k_star).

    Args:
        model: Dispersion model with its susceptibility provider.
        jet: Taylor jet at (n0, k_star).
        rect: Rectifying map at the same point.
        chi_kernel: Optional kernel replacing the provider's one.
        nu: Dispersion order, 2 to 4.
        sigma: Susceptibility order, 0 to nu - 2.
        alpha: Nonlinearity strength.
        step: Finite-difference step for the susceptibility derivatives.

    Raises:
        PreconditionException: Orders out of range or mismatched jet and map.
        ConvergenceException: Unreliable susceptibility derivatives.
    """
    if not 1 <= nu <= 4:
        raise PreconditionException(operation="extract_coeffs", invariant="jet order >= nu (1 <= nu <= 4)")
    if len(jet.derivs) < nu + 1:
        raise PreconditionException(
            operation="extract_coeffs", invariant=f"jet order >= {nu}", context={"derivs": len(jet.derivs)}
        )
    if not 0 <= sigma <= max(nu - 2, 0):
        raise PreconditionException(operation="extract_coeffs", invariant="0 <= sigma <= nu - 2")
    if abs(rect.jet.k_star - jet.k_star) > 1e-12 or rect.jet.n0 != jet.n0:
        raise PreconditionException(operation="extract_coeffs", invariant="rectifying map built at the jet point")
    model = _with_kernel(model, chi_kernel)

    amplitudes = {s: _taylor_amplitude(model, rect, s, sigma, step) for s in (1, -1)}
    delta1, delta2 = {}, {}
    for s in (1, -1):
        delta1[s], delta2[s] = _memory_coefficients(model, jet, s)
    q5 = {}
    for s in (1, -1):
        k = s * jet.k_star
        ends = np.array([k])
        origins = [np.array([v]) for v in (k, k, k, -k, -k)]
        q5[s] = FACTOR_QUINTICO * complex(np.asarray(model.susceptibility.quintic(s, ends, origins))[0])
    if q5[1] == 0:
        logger.debug("Sin susceptibilidad de quinto orden: Q5 = 0")
    cross = {s: _cross_coefficient(model, jet, s) for s in (1, -1)}

    coeffs = EnlsCoefficients(
        nu=nu,
        sigma=sigma,
        k_star=jet.k_star,
        n0=jet.n0,
        gammas=jet.gammas(nu),
        alpha_pi=alpha_pi(alpha),
        amplitudes=amplitudes,
        delta1=delta1,
        delta2=delta2,
        q5=q5,
        delta_cross=cross,
    )
    logger.info(
        "Coeficientes extraídos",
        extra={"nu": nu, "sigma": sigma, "k_star": jet.k_star, "Q_plus": str(coeffs.Q_plus)},
    )
    return coeffs


def nls_coefficients(
    gammas: Tuple[float, ...],
    q_plus: complex,
    alpha: float,
    k_star: float = 0.0,
    n0: int = 1,
    q_minus: Optional[complex] = None,
) -> EnlsCoefficients:
    """Hand-built cubic coefficient set (sigma = 0) for oracle runs."""
    q_minus = np.conj(q_plus) if q_minus is None else q_minus
    return EnlsCoefficients(
        nu=len(gammas) - 1,
        sigma=0,
        k_star=k_star,
        n0=n0,
        gammas=tuple(float(g) for g in gammas),
        alpha_pi=alpha_pi(alpha),
        amplitudes={1: {(0, 0, 0): complex(q_plus)}, -1: {(0, 0, 0): complex(q_minus)}},
    )
