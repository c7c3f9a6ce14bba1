"""
Approximations of the interaction integral.

- ``rectified_integral``: the FM integral with polynomial phase and amplitude
  p^[sigma], evaluated by the oracle quadrature.
- ``sphm_expand``: stationary-phase series around the critical point, in the
  coordinate-free form

      S(lam) ~ exp(i lam Phi0) * prod_k (lam mu_k / (2 pi i))**(-1/2) * sum_j lam**(-j) L_j A,
      L_j A = sum_{n - m = j, 2n >= 3m} i**(-j) 2**(-n) <H^-1 D, D>**n (g**m A)(x0) / (m! n!),

  with D = -i grad, H the Hessian and g the phase minus its quadratic part.
  Taylor coefficients come from exact sympy derivatives.
- ``weak_dispersion_expand``: direct evaluation for theta bounded below, with
  the budget of the phase replacement.
- ``nonfm_estimate``: boundary terms of the integration by parts in slow time
  for non-FM quadruplets.
"""

from dataclasses import dataclass, field, replace
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from numpy.polynomial import polynomial as P
from scipy import optimize, signal

from config.logging_config import get_logger
from dominio.enls.coeficientes import EnlsCoefficients
from dominio.exceptions import ConvergenceException, PreconditionException, ValidationException
from dominio.excitacion.corriente import DoubletExcitation
from dominio.excitacion.envolvente import EnvelopeSpec
from dominio.modelo.diferencias import partial_derivatives
from dominio.modelo.dispersion import DispersionModel

from .cuadratura import (
    TOLERANCIA_ORACULO,
    InteractionIntegrand,
    OracleResult,
    find_support,
    integrate_in_time,
    quad_oracle,
    spatial_integral,
    time_panels,
)
from .cuadrupletes import Quadruplet, classify_quadruplet
from .fase import Q1, Q2
from .integrandos import fm_integrand, nonfm_integrand

logger = get_logger(__name__)

THETA_MAXIMO = 0.2
THETA_MINIMO = 0.05
KAPPA_CORTE = 2.5
PHI_MINIMO = 1e-3
UMBRAL_DEGENERADO = 1e-10
PASO_NUMERICO = 1e-3


# --------------------------------------------------------------------------
# Integral rectificada
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RectifiedIntegral:
    """I^(sigma) on a slow-time grid and the integrand that produced it."""

    sigma: int
    sign: int
    q: float
    oracle: OracleResult
    integrand: InteractionIntegrand

    @property
    def values(self) -> np.ndarray:
        return self.oracle.values

    def describe(self) -> Dict[str, Any]:
        return {"sigma": self.sigma, "sign": self.sign, "q": self.q, **self.oracle.describe()}


def rectified_integral(
    coeffs: EnlsCoefficients,
    exc: DoubletExcitation,
    sigma: int,
    tau: Union[float, Sequence[float]],
    sign: int = 1,
    q: float = 0.0,
    tolerance: float = TOLERANCIA_ORACULO,
) -> RectifiedIntegral:
    """
    Rectified FM integral with amplitude p^[sigma] of the member ``sign``.

    Args:
        coeffs: Envelope coefficients carrying the jet and the p_s monomials.
        exc: Excitation (profile, beta, rho, ramp).
        sigma: Amplitude order, at most nu - 2 and at most coeffs.sigma.
        tau: Slow times.
        sign: Frequency sign of the end mode.
        q: End offset.

    Raises:
        PreconditionException: sigma out of range.
        ConvergenceException: As ``quad_oracle``.
    """
    integrand = fm_integrand(coeffs, exc, sigma=sigma, sign=sign, q=q)
    oracle = quad_oracle(integrand, exc.theta, tau, rho=exc.rho, envelope=exc.envelope, tolerance=tolerance)
    return RectifiedIntegral(sigma=sigma, sign=sign, q=q, oracle=oracle, integrand=integrand)


# --------------------------------------------------------------------------
# Fase estacionaria
# --------------------------------------------------------------------------


def _taylor(expr: sympy.Expr, x0: Tuple[float, float], degree: int) -> np.ndarray:
    """Taylor coefficients C[a, b] of ``expr`` at x0, total degree <= ``degree``."""
    coeffs = np.zeros((degree + 1, degree + 1), dtype=complex)
    point = {Q1: sympy.Float(x0[0]), Q2: sympy.Float(x0[1])}
    column = expr
    for a in range(degree + 1):
        current = column
        for b in range(degree + 1 - a):
            value = complex(sympy.N(current.xreplace(point)))
            coeffs[a, b] = value / (factorial(a) * factorial(b))
            current = sympy.diff(current, Q2)
        column = sympy.diff(column, Q1)
    return coeffs


def _truncate(c: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros((degree + 1, degree + 1), dtype=complex)
    n = min(c.shape[0], degree + 1)
    m = min(c.shape[1], degree + 1)
    out[:n, :m] = c[:n, :m]
    a, b = np.indices(out.shape)
    out[a + b > degree] = 0.0
    return out


def _multiply(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    return _truncate(signal.convolve2d(a, b), degree)


def _second(c: np.ndarray, i: int, j: int) -> np.ndarray:
    out = P.polyder(c, 1, axis=i)
    out = P.polyder(out, 1, axis=j)
    pad = np.zeros_like(c)
    pad[: out.shape[0], : out.shape[1]] = out
    return pad


def _operator(c: np.ndarray, inverse: np.ndarray) -> np.ndarray:
    """<H^-1 D, D> applied to a polynomial, D = -i grad."""
    return -(
        inverse[0, 0] * _second(c, 0, 0) + 2.0 * inverse[0, 1] * _second(c, 0, 1) + inverse[1, 1] * _second(c, 1, 1)
    )


def stationary_phase_coefficients(
    amplitude: np.ndarray,
    remainder: np.ndarray,
    hessian: np.ndarray,
    n_terms: int,
) -> List[complex]:
    """
    L_j A for j = 0..n_terms from the Taylor coefficients of A and of the
    non-quadratic phase remainder g at the critical point.
    """
    inverse = np.linalg.inv(hessian)
    terms = []
    for j in range(n_terms + 1):
        total = 0j
        for m in range(2 * j + 1):
            n = j + m
            degree = 2 * n
            w = _truncate(amplitude, degree)
            g = _truncate(remainder, degree)
            for _ in range(m):
                w = _multiply(w, g, degree)
            if m and not np.any(w):
                continue
            for _ in range(n):
                w = _operator(w, inverse)
            total += (1j) ** (-j) * 2.0 ** (-n) * w[0, 0] / (factorial(m) * factorial(n))
        terms.append(complex(total))
    return terms


@dataclass(frozen=True)
class SphmExpansion:
    """
    Stationary-phase series of the spatial integral and its slow-time integral.

    Attributes:
        critical: Critical point x0.
        phase0: Phase at x0.
        hessian: Hessian at x0.
        eigenvalues: Hessian eigenvalues (Morse normal form scales).
        rotation: Eigenvectors, columns; the rotation to the normal form.
        prefactor: prod_k (mu_k / (2 pi i))**(-1/2).
        coefficients: L_j A, j = 0..N3.
        theta: Dispersion parameter.
        tau: Slow times of the time-integrated values (empty for spatial only).
        values: Time-integrated series at ``tau`` (or S_N(1/theta)).
        tau_split: Lower end of the slow-time integration.
        split_bound: Bound of the neglected part on [0, tau_split].
    """

    critical: Tuple[float, float]
    phase0: float
    hessian: np.ndarray
    eigenvalues: np.ndarray
    rotation: np.ndarray
    prefactor: complex
    coefficients: Tuple[complex, ...]
    theta: float
    tau: np.ndarray = field(default_factory=lambda: np.zeros(0))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    tau_split: float = 0.0
    split_bound: float = 0.0

    @property
    def n_terms(self) -> int:
        return len(self.coefficients) - 1

    def term_values(self, lam: Union[float, np.ndarray]) -> np.ndarray:
        """Individual terms of S_N(lam), shape (N3 + 1, len(lam))."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        lead = np.exp(1j * lam * self.phase0) * self.prefactor / lam
        return np.array([c * lead * lam ** (-j) for j, c in enumerate(self.coefficients)])

    def spatial(self, lam: Union[float, np.ndarray], n_terms: Optional[int] = None) -> np.ndarray:
        """Truncated series S_N(lam)."""
        n = self.n_terms if n_terms is None else min(n_terms, self.n_terms)
        return np.sum(self.term_values(lam)[: n + 1], axis=0)

    def term_dump(self) -> List[Dict[str, Any]]:
        lam = 1.0 / self.theta
        values = self.term_values(lam)[:, 0]
        return [
            {
                "m": j,
                "coefficient": [c.real, c.imag],
                "value": [float(v.real), float(v.imag)],
                "weight": self.theta ** (j + 1),
            }
            for j, (c, v) in enumerate(zip(self.coefficients, values))
        ]

    def describe(self) -> Dict[str, Any]:
        return {
            "critical": list(self.critical),
            "phase0": self.phase0,
            "eigenvalues": self.eigenvalues.tolist(),
            "rotation": self.rotation.tolist(),
            "prefactor": [self.prefactor.real, self.prefactor.imag],
            "theta": self.theta,
            "N3": self.n_terms,
            "tau_split": self.tau_split,
            "split_bound": self.split_bound,
        }


def _critical_point(integrand: InteractionIntegrand) -> Tuple[float, float]:
    grad = [sympy.lambdify((Q1, Q2), sympy.diff(integrand.symbolic_phase, v), "numpy") for v in (Q1, Q2)]

    def gradient(x: np.ndarray) -> np.ndarray:
        return np.array([float(np.real(g(x[0], x[1]))) for g in grad])

    start = np.asarray(integrand.center, dtype=float)
    if float(np.linalg.norm(gradient(start))) < 1e-12:
        return (float(start[0]), float(start[1]))
    found = optimize.root(gradient, start, tol=1e-14)
    residual = float(np.linalg.norm(gradient(found.x)))
    if not found.success or residual > 1e-9:
        raise ConvergenceException(operation="sphm_expand critical point", residual=residual, tolerance=1e-9)
    return (float(found.x[0]), float(found.x[1]))


def split_time(rho: float, beta: float, kappa: float = KAPPA_CORTE) -> float:
    """
    Start of the stationary-phase slow-time integration, rho / beta**kappa.

    kappa is capped halfway between 2 and the actual exponent log(rho) / log(beta).

    Raises:
        PreconditionException: rho >= beta**2 (no strong dispersion).
    """
    if not 0.0 < beta < 1.0 or not 0.0 < rho < 1.0:
        raise ValidationException(field="beta, rho", value=(beta, rho), rule="0 < beta, rho < 1")
    exponent = np.log(rho) / np.log(beta)
    if exponent <= 2.0:
        raise PreconditionException(
            operation="sphm_expand", invariant="strong dispersion rho < beta**2", context={"rho": rho, "beta": beta}
        )
    kappa = min(kappa, 1.0 + 0.5 * exponent)
    return float(rho / beta**kappa)


def sphm_expand(
    integrand: InteractionIntegrand,
    theta: float,
    n_terms: int,
    tau: Optional[Union[float, Sequence[float]]] = None,
    rho: float = 1.0,
    beta: Optional[float] = None,
    envelope: Optional[EnvelopeSpec] = None,
    theta_max: float = THETA_MAXIMO,
) -> SphmExpansion:
    """
    Stationary-phase expansion of the interaction integral to order N3.

    Without ``tau`` the spatial series is evaluated at lam = 1/theta. With
    ``tau`` (and ``beta``) the series S_N(tau1 / theta) is integrated against
    psi**3 / rho from tau_split = rho / beta**kappa; the part below tau_split
    is bounded, not computed.

    Args:
        integrand: Integrand; a symbolic amplitude is needed for N3 > 0.
        theta: Dispersion parameter, at most ``theta_max``.
        n_terms: Highest term N3.
        tau: Optional slow times.
        rho: Slow-time scale.
        beta: Quasimomentum spread, needed with ``tau``.
        envelope: Ramp psi.
        theta_max: Strong-dispersion threshold.

    Raises:
        PreconditionException: theta above theta_max, degenerate Hessian.
        ValidationException: N3 > 0 with a purely numeric amplitude, N3 < 0.
    """
    if theta <= 0.0 or theta > theta_max:
        raise PreconditionException(
            operation="sphm_expand", invariant="0 < theta <= theta_max", context={"theta": theta, "theta_max": theta_max}
        )
    if n_terms < 0:
        raise ValidationException(field="N3", value=n_terms, rule="N3 >= 0")

    if integrand.symbolic:
        x0 = _critical_point(integrand)
        phase_taylor = _taylor(integrand.symbolic_phase, x0, 2)
        hessian = np.array(
            [[2.0 * phase_taylor[2, 0].real, phase_taylor[1, 1].real], [phase_taylor[1, 1].real, 2.0 * phase_taylor[0, 2].real]]
        )
        phase0 = float(phase_taylor[0, 0].real)
    else:
        if n_terms > 0:
            raise ValidationException(
                field="N3", value=n_terms, rule="N3 = 0 for amplitudes without closed-form derivatives",
            )
        x0 = integrand.center
        value, _, hess = partial_derivatives(lambda x: complex(integrand.phase(x[0], x[1])), x0, 2, PASO_NUMERICO)
        hessian = np.real(hess)
        phase0 = float(np.real(value))

    eigenvalues, rotation = np.linalg.eigh(hessian)
    if float(np.min(np.abs(eigenvalues))) < UMBRAL_DEGENERADO * max(1.0, float(np.max(np.abs(eigenvalues)))):
        raise PreconditionException(
            operation="sphm_expand", invariant="nondegenerate Hessian at the critical point",
            context={"eigenvalues": eigenvalues.tolist()},
        )
    prefactor = complex(np.prod((eigenvalues / (2j * np.pi)) ** -0.5))

    if integrand.symbolic:
        degree = 6 * n_terms
        amplitude = _taylor(integrand.symbolic_amplitude, x0, degree)
        full_phase = _taylor(integrand.symbolic_phase, x0, max(degree, 2))
        remainder = full_phase.copy()
        a, b = np.indices(remainder.shape)
        remainder[a + b <= 2] = 0.0
        coefficients = stationary_phase_coefficients(amplitude, remainder, hessian, n_terms)
    else:
        coefficients = [complex(integrand.amplitude(x0[0], x0[1]))]

    expansion = SphmExpansion(
        critical=(float(x0[0]), float(x0[1])),
        phase0=phase0,
        hessian=hessian,
        eigenvalues=eigenvalues,
        rotation=rotation,
        prefactor=prefactor,
        coefficients=tuple(coefficients),
        theta=theta,
    )
    if tau is None:
        values = expansion.spatial(1.0 / theta)
        result = replace(expansion, values=values)
    else:
        if beta is None:
            raise ValidationException(field="beta", value=None, rule="beta required for slow-time integration")
        result = _integrate_series(expansion, integrand, np.atleast_1d(np.asarray(tau, dtype=float)), rho, beta, envelope)
    logger.info("Desarrollo de fase estacionaria", extra=result.describe())
    return result


def _integrate_series(
    expansion: SphmExpansion,
    integrand: InteractionIntegrand,
    taus: np.ndarray,
    rho: float,
    beta: float,
    envelope: Optional[EnvelopeSpec],
) -> SphmExpansion:
    envelope = envelope or EnvelopeSpec()
    start = split_time(rho, beta)
    values = np.zeros(taus.size, dtype=complex)
    later = taus > start
    if np.any(later):
        cells = time_panels(taus[later], envelope, expansion.theta, abs(expansion.phase0), start=start)

        def spatial(nodes: np.ndarray) -> Tuple[np.ndarray, float, float]:
            return expansion.spatial(nodes / expansion.theta), 0.0, 0.0

        values[later], _, _, _, _ = integrate_in_time(spatial, taus[later], cells, envelope, rho)

    # cota de la parte despreciada en [0, tau_split]
    nodes, weights = np.polynomial.legendre.leggauss(16)
    half = 0.5 * start
    psi3 = float(np.sum(half * weights * np.asarray(envelope.psi(half * (nodes + 1.0))) ** 3))
    modulus = InteractionIntegrand(
        phase=lambda a, b: np.zeros(np.broadcast(np.asarray(a), np.asarray(b)).shape),
        amplitude=lambda a, b: np.abs(integrand.amplitude(a, b)) + 0j,
        center=integrand.center,
        label="|A|",
    )
    mass = float(np.real(spatial_integral(modulus, 0.0).values[0]))
    return replace(expansion, tau=taus, values=values, tau_split=start, split_bound=psi3 * mass / rho)


# --------------------------------------------------------------------------
# Dispersión débil
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeakDispersionResult:
    """
    Direct evaluation in the weakly dispersive regime with its error budget.

    Attributes:
        oracle: Values of the integral with the polynomial phase.
        budget: Orders of the neglected terms: ``phase_replacement``
            (beta**(nu + 1) tau / rho), ``amplitude`` (beta**(sigma + 1)) and
            ``data`` (beta**nu).
    """

    oracle: OracleResult
    budget: Dict[str, float]

    @property
    def values(self) -> np.ndarray:
        return self.oracle.values

    @property
    def total_budget(self) -> float:
        return float(sum(self.budget.values()))

    def describe(self) -> Dict[str, Any]:
        return {**self.oracle.describe(), "budget": dict(self.budget)}


def weak_dispersion_expand(
    coeffs: EnlsCoefficients,
    exc: DoubletExcitation,
    tau: Union[float, Sequence[float]],
    sigma: int = 0,
    sign: int = 1,
    q: float = 0.0,
    theta_min: float = THETA_MINIMO,
    tolerance: float = TOLERANCIA_ORACULO,
) -> WeakDispersionResult:
    """
    Interaction integral for theta >= theta_min, evaluated directly.

    Raises:
        PreconditionException: theta below theta_min or sigma out of range.
    """
    theta = exc.theta
    if theta < theta_min:
        raise PreconditionException(
            operation="weak_dispersion_expand", invariant="theta >= theta_min",
            context={"theta": theta, "theta_min": theta_min},
        )
    integrand = fm_integrand(coeffs, exc, sigma=sigma, sign=sign, q=q)
    oracle = quad_oracle(integrand, theta, tau, rho=exc.rho, envelope=exc.envelope, tolerance=tolerance)
    beta, nu = exc.beta, coeffs.nu
    budget = {
        "phase_replacement": beta ** (nu + 1) * float(np.max(oracle.tau)) / exc.rho,
        "amplitude": beta ** (sigma + 1),
        "data": beta**nu,
    }
    result = WeakDispersionResult(oracle=oracle, budget=budget)
    logger.info("Desarrollo de dispersión débil", extra={"theta": theta, **budget})
    return result


# --------------------------------------------------------------------------
# Interacciones no sincronizadas en frecuencia
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NonFmEstimate:
    """
    Boundary terms of a non-FM interaction integral at slow time ``tau``.

    Attributes:
        label: Classification of the quadruplet.
        phi: Mismatch at the nominal quasimomenta.
        k1: Principal term (no 1/rho factor).
        rho_k2: Next term, already multiplied by rho.
        phi_min_found: Smallest |phi| over the amplitude support.
    """

    label: str
    phi: float
    tau: float
    rho: float
    k1: complex
    rho_k2: complex
    phi_min_found: float

    @property
    def total(self) -> complex:
        return self.k1 + self.rho_k2

    def describe(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "phi": self.phi,
            "tau": self.tau,
            "rho": self.rho,
            "k1": [self.k1.real, self.k1.imag],
            "rho_k2": [self.rho_k2.real, self.rho_k2.imag],
            "phi_min_found": self.phi_min_found,
        }


def boundary_terms(
    integrand: InteractionIntegrand,
    tau: float,
    rho: float,
    envelope: Optional[EnvelopeSpec] = None,
    phi_min: float = PHI_MINIMO,
    tolerance: float = TOLERANCIA_ORACULO,
) -> Tuple[complex, complex, float]:
    """
    Integration by parts of (1/rho) int_0^tau exp(i phi tau1 / rho) psi**3 A dtau1.

    Returns (K1, rho K2, min |phi|) with

        K1     = psi(tau)**3 * int int exp(i phi tau / rho) A / (i phi),
        rho K2 = -rho * d(psi**3)/dtau(tau) * int int exp(i phi tau / rho) A / (i phi)**2.

    Raises:
        PreconditionException: |phi| below ``phi_min`` on the support.
    """
    envelope = envelope or EnvelopeSpec()
    support = find_support(integrand)
    if support is None:
        return 0j, 0j, float("inf")
    x0, x1, y0, y1 = support.box
    xs = np.linspace(x0, x1, 129)
    ys = np.linspace(y0, y1, 129)
    amp = np.abs(integrand.amplitude(xs[None, :], ys[:, None]))
    phase = integrand.phase(xs[None, :], ys[:, None])
    smallest = float(np.min(np.abs(phase[amp > 1e-14 * support.peak])))
    if smallest < phi_min:
        raise PreconditionException(
            operation="nonfm_estimate", invariant="|phi| >= phi_min away from resonance",
            context={"phi_min": phi_min, "found": smallest},
        )
    psi = float(envelope.psi(tau))
    dpsi3 = 3.0 * psi**2 * float(envelope.psi0(tau))
    lam = tau / rho
    first = integrand.with_amplitude(lambda a, b: 1.0 / (1j * integrand.phase(a, b)), label="K1")
    k1 = psi**3 * complex(spatial_integral(first, lam, tolerance=tolerance).values[0])
    rho_k2 = 0j
    if dpsi3 != 0.0:
        second = integrand.with_amplitude(lambda a, b: 1.0 / (1j * integrand.phase(a, b)) ** 2, label="K2")
        rho_k2 = -rho * dpsi3 * complex(spatial_integral(second, lam, tolerance=tolerance).values[0])
    return k1, rho_k2, smallest


def nonfm_estimate(
    model: DispersionModel,
    quad: Quadruplet,
    exc: DoubletExcitation,
    tau: float,
    phi_min: float = PHI_MINIMO,
    q: float = 0.0,
    tolerance: float = TOLERANCIA_ORACULO,
) -> NonFmEstimate:
    """
    Principal and next boundary terms of a non-FM interaction integral.

    Raises:
        PreconditionException: Frequency-matched quadruplet, or |phi| below
            ``phi_min`` (near resonance).
    """
    verdict = classify_quadruplet(model, exc.k_star, exc.n0, quad, pi0=exc.pi0)
    if verdict.frequency_matched:
        raise PreconditionException(
            operation="nonfm_estimate", invariant="quadruplet classified non-FM", context={"label": verdict.label}
        )
    if abs(verdict.phi) < phi_min:
        raise PreconditionException(
            operation="nonfm_estimate", invariant="|phi| >= phi_min away from resonance",
            context={"phi": verdict.phi, "phi_min": phi_min},
        )
    integrand = nonfm_integrand(model, quad, exc, q=q)
    k1, rho_k2, smallest = boundary_terms(integrand, tau, exc.rho, exc.envelope, phi_min, tolerance)
    estimate = NonFmEstimate(
        label=verdict.label, phi=verdict.phi, tau=tau, rho=exc.rho, k1=k1, rho_k2=rho_k2, phi_min_found=smallest,
    )
    logger.info("Estimación no FM", extra=estimate.describe())
    return estimate
