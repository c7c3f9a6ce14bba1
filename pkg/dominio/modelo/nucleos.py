"""
Causal response kernels of the cubic nonlinearity.

Every kernel here is separable, R(t1, t2, t3) = scale * r(t1) r(t2) r(t3),
so its frequency-domain coefficients factor slot by slot. The slot
coefficient of order l is

    chi1_l(omega) = integral of (-t)**l / l! * r(t) * exp(i omega t) dt,

which is (i**l / l!) times the l-th omega-derivative of the transform.
"""

from abc import ABCMeta, abstractmethod
from math import factorial
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np
from scipy import integrate

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, ValidationException

logger = get_logger(__name__)


class BaseKernel(metaclass=ABCMeta):
    """Separable causal kernel."""

    name = "base"
    scale: float = 1.0

    @abstractmethod
    def slot(self, l: int, omega: Any) -> np.ndarray:
        """Slot coefficient chi1_l at the (array of) frequency omega."""

    @abstractmethod
    def response(self, t: Any) -> np.ndarray:
        """Single-slot time response r(t), zero for t < 0."""

    def coefficient(self, ls: Sequence[int], omegas: Sequence[Any]) -> np.ndarray:
        """Multi-index coefficient chi_l = scale * prod_j chi1_{l_j}(omega_j)."""
        result: Any = self.scale
        for l, omega in zip(ls, omegas):
            result = result * self.slot(l, omega)
        return np.asarray(result, dtype=complex)

    def transform(self, omegas: Sequence[Any]) -> np.ndarray:
        return self.coefficient((0,) * len(omegas), omegas)

    def slot_factor(self, omega: Any) -> np.ndarray:
        """Slot transform normalized to one at zero frequency."""
        return self.slot(0, omega) / self.slot(0, 0.0)

    def slot_log_derivative(self, omega: Any) -> np.ndarray:
        """Ratio chi1_1 / chi1_0: first-order memory coefficient per unit response."""
        return self.slot(1, omega) / self.slot(0, omega)

    @property
    def instantaneous(self) -> bool:
        return False

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.name, "scale": self.scale}


class InstantaneousKernel(BaseKernel):
    """Kernel-free medium: the response is a delta in time."""

    name = "instantaneous"

    def slot(self, l: int, omega: Any) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        value = 1.0 if l == 0 else 0.0
        return np.full(omega.shape, value, dtype=complex)

    def response(self, t: Any) -> np.ndarray:
        raise ValidationException(
            field="kernel", value=self.name, rule="delta response has no tabulated form"
        )

    @property
    def instantaneous(self) -> bool:
        return True


class ExponentialKernel(BaseKernel):
    """
    Exponential relaxation R = r0 * exp(-c (t1 + t2 + t3)) on t_j > 0.

    Coefficients are exact: chi_l = r0 * prod_j (-1)**l_j / (c - i omega_j)**(l_j + 1).
    The default ``r0 = c**3`` normalizes the transform to one at zero frequency.
    """

    name = "exponential"

    def __init__(self, c: float = 1.0, r0: Optional[float] = None) -> None:
        if c <= 0.0:
            raise ValidationException(field="kernel.c", value=c, rule="c > 0")
        self.c = float(c)
        self.scale = float(r0) if r0 is not None else self.c**3

    def slot(self, l: int, omega: Any) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return (-1.0) ** l / (self.c - 1j * omega) ** (l + 1)

    def response(self, t: Any) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, np.exp(-self.c * np.clip(t, 0.0, None)), 0.0)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.name, "c": self.c, "r0": self.scale}


class TabulatedKernel(BaseKernel):
    """
    Single-slot response given by samples r(t_i) on a uniform grid.

    Slot coefficients are computed with Simpson's rule and checked against
    the same rule on every second sample; a disagreement above ``tolerance``
    raises ConvergenceException.
    """

    name = "tabulated"

    def __init__(self, t: Sequence[float], r: Sequence[float], tolerance: float = 1e-6) -> None:
        self.t = np.asarray(t, dtype=float)
        self.r = np.asarray(r, dtype=float)
        if self.t.ndim != 1 or self.t.size != self.r.size or self.t.size < 9:
            raise ValidationException(
                field="kernel.samples", value=self.t.size, rule="matching 1-D samples, at least 9"
            )
        if self.t[0] < 0.0 or np.any(np.diff(self.t) <= 0.0):
            raise ValidationException(field="kernel.t", value=self.t[0], rule="increasing times from t >= 0")
        self.tolerance = tolerance

    def _slot_scalar(self, l: int, omega: float) -> complex:
        integrand = (-self.t) ** l / factorial(l) * self.r * np.exp(1j * omega * self.t)
        fine = integrate.simpson(integrand, x=self.t)
        coarse = integrate.simpson(integrand[::2], x=self.t[::2])
        if abs(fine - coarse) > self.tolerance * max(1.0, abs(fine)):
            raise ConvergenceException(
                operation="tabulated kernel transform",
                residual=float(abs(fine - coarse)),
                tolerance=self.tolerance,
                context={"order": l, "omega": omega},
            )
        return complex(fine)

    def slot(self, l: int, omega: Any) -> np.ndarray:
        omega_arr = np.asarray(omega, dtype=float)
        values = np.array([self._slot_scalar(l, float(w)) for w in omega_arr.ravel()], dtype=complex)
        return values.reshape(omega_arr.shape)

    def response(self, t: Any) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.t, self.r, left=0.0, right=0.0)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.name, "samples": int(self.t.size), "t_max": float(self.t[-1])}


class FactoryKernel:
    """Builds kernels from ``model.susceptibility.kernel`` configuration blocks."""

    @staticmethod
    def obtener_nucleo(spec: Optional[Mapping[str, Any]]) -> BaseKernel:
        if not spec:
            return InstantaneousKernel()
        kind = spec.get("kind", "exponential")
        if kind == "instantaneous":
            return InstantaneousKernel()
        if kind == "exponential":
            return ExponentialKernel(c=float(spec.get("c", 1.0)), r0=spec.get("r0"))
        if kind == "tabulated":
            return TabulatedKernel(spec["t"], spec["r"], float(spec.get("tolerance", 1e-6)))
        raise ValidationException(
            field="kernel.kind", value=kind, rule="unknown kernel",
            expected="instantaneous, exponential, tabulated",
        )
