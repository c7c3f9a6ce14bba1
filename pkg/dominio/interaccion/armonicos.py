"""
Time-harmonic expansion of a causal cubic response.

For a separable kernel R(t1, t2, t3) = r0 * prod_j r(t_j) acting on slow
envelopes a_j(rho t) carried by exp(-i omega_j t), the response is

    P(t) = prod_j exp(-i omega_j t) * sum_l chi_l rho**|l| prod_j a_j^(l_j)(rho t),

with chi_l = (i**|l| / l!) d^l chi_hat(omega). Truncating at |l| <= N1 leaves
an O(rho**(N1 + 1)) error.
"""

from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, ValidationException
from dominio.modelo.diferencias import central_derivative
from dominio.modelo.nucleos import BaseKernel, InstantaneousKernel, TabulatedKernel

logger = get_logger(__name__)

MultiIndex = Tuple[int, int, int]

TOLERANCIA_DERIVADA = 1e-6
PASO_FRECUENCIA = 0.05
MAX_ORDEN_TABULADO = 4


def multi_indices(n1: int) -> Tuple[MultiIndex, ...]:
    return tuple(l for l in product(range(n1 + 1), repeat=3) if sum(l) <= n1)  # type: ignore[misc]


def _check_tabulated(kernel: TabulatedKernel, omega: float, order: int, tolerance: float) -> None:
    """Moment-form slot coefficient against numeric differentiation of the transform."""
    if order == 0:
        return
    estimate, error = central_derivative(lambda w: kernel.slot(0, w), omega, order, PASO_FRECUENCIA)
    numeric = (1j) ** order / factorial(order) * estimate
    moment = complex(kernel.slot(order, np.array([omega]))[0])
    gap = abs(numeric - moment)
    if gap > tolerance * max(1.0, abs(moment)):
        raise ConvergenceException(
            operation="harmonic_expand tabulated derivative",
            residual=float(gap),
            tolerance=tolerance,
            context={"order": order, "omega": omega, "richardson_error": error},
        )


@dataclass(frozen=True)
class HarmonicExpansion:
    """
    Coefficients chi_l for |l| <= N1 and, when envelope derivatives are
    given, the value of the truncated series.

    Attributes:
        kernel: Kernel description.
        omegas: Carrier frequencies of the three slots.
        n1: Truncation order.
        coefficients: chi_l per multi-index.
        rho: Slow-time scale of the series value.
        value: Series value (None without envelope derivatives).
    """

    kernel: Dict[str, Any]
    omegas: Tuple[float, float, float]
    n1: int
    coefficients: Dict[MultiIndex, complex]
    rho: Optional[float] = None
    value: Optional[complex] = None

    def coefficient(self, l: Sequence[int]) -> complex:
        return self.coefficients[tuple(l)]  # type: ignore[index]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.kernel,
            "omegas": list(self.omegas),
            "N1": self.n1,
            "coefficients": {"".join(map(str, l)): [c.real, c.imag] for l, c in sorted(self.coefficients.items())},
            "rho": self.rho,
            "value": None if self.value is None else [self.value.real, self.value.imag],
        }


def harmonic_expand(
    kernel: BaseKernel,
    omegas: Sequence[float],
    n1: int,
    derivatives: Optional[Sequence[Sequence[complex]]] = None,
    rho: Optional[float] = None,
    tolerance: float = TOLERANCIA_DERIVADA,
) -> HarmonicExpansion:
    """
    Susceptibility-series coefficients of a separable kernel.

    Exponential kernels use the closed form (-1)**l / (c - i omega)**(l + 1)
    per slot; tabulated kernels use moment transforms cross-checked against
    numeric differentiation of the transform.

    Args:
        kernel: Causal kernel.
        omegas: Frequencies (omega_1, omega_2, omega_3).
        n1: Truncation order N1.
        derivatives: Per slot, envelope derivatives a_j, a_j', ... up to N1.
        rho: Slow-time scale, needed with ``derivatives``.
        tolerance: Accepted gap for tabulated kernels.

    Raises:
        ValidationException: Wrong number of slots, negative N1, missing
            derivatives, tabulated order above 4.
        ConvergenceException: Tabulated transform derivatives inconsistent.
    """
    if len(omegas) != 3:
        raise ValidationException(field="omegas", value=len(omegas), rule="three slot frequencies")
    if n1 < 0:
        raise ValidationException(field="N1", value=n1, rule="N1 >= 0")
    omegas = tuple(float(w) for w in omegas)
    if isinstance(kernel, TabulatedKernel):
        if n1 > MAX_ORDEN_TABULADO:
            raise ValidationException(field="N1", value=n1, rule=f"N1 <= {MAX_ORDEN_TABULADO} for tabulated kernels")
        for omega in set(omegas):
            for order in range(1, n1 + 1):
                _check_tabulated(kernel, omega, order, tolerance)

    coefficients: Dict[MultiIndex, complex] = {}
    for l in multi_indices(n1):
        if isinstance(kernel, InstantaneousKernel):
            coefficients[l] = 1.0 + 0j if sum(l) == 0 else 0j
        else:
            coefficients[l] = complex(np.asarray(kernel.coefficient(l, [np.array(w) for w in omegas])))

    value = None
    if derivatives is not None:
        if rho is None or len(derivatives) != 3 or any(len(d) < n1 + 1 for d in derivatives):
            raise ValidationException(
                field="derivatives", value=None, rule="rho and N1 + 1 derivatives for each of the three slots",
            )
        value = 0j
        for l, chi in coefficients.items():
            term = chi * rho ** sum(l)
            for j in range(3):
                term *= complex(derivatives[j][l[j]])
            value += term

    expansion = HarmonicExpansion(
        kernel=kernel.describe(), omegas=omegas, n1=n1, coefficients=coefficients, rho=rho, value=value,
    )
    logger.debug("Desarrollo armónico", extra={"N1": n1, "terms": len(coefficients)})
    return expansion


def convolution_oracle(
    kernel: BaseKernel,
    omegas: Sequence[float],
    envelopes: Sequence[Callable[[float], complex]],
    rho: float,
    t: float,
    horizon: Optional[float] = None,
) -> complex:
    """
    Exact separable response with the carriers removed:

        r0 * prod_j integral_0^inf r(s) exp(i omega_j s) a_j(rho (t - s)) ds.

    ``horizon`` truncates the memory integral (default: 40 / c for exponential
    kernels, the last sample for tabulated ones).
    """
    if isinstance(kernel, InstantaneousKernel):
        return complex(np.prod([complex(a(rho * t)) for a in envelopes]))
    if horizon is None:
        horizon = 40.0 / getattr(kernel, "c", 1.0)
        if isinstance(kernel, TabulatedKernel):
            horizon = float(kernel.t[-1])
    result: complex = complex(kernel.scale)
    for omega, a in zip(omegas, envelopes):
        def part(s: float, take: Callable[[complex], float]) -> float:
            return take(complex(kernel.response(s)) * np.exp(1j * omega * s) * complex(a(rho * (t - s))))

        re, _ = integrate.quad(part, 0.0, horizon, args=(np.real,), epsabs=1e-14, epsrel=1e-12, limit=400)
        im, _ = integrate.quad(part, 0.0, horizon, args=(np.imag,), epsabs=1e-14, epsrel=1e-12, limit=400)
        result *= complex(re, im)
    return result
