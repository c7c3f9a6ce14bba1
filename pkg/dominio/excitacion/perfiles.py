"""
Envelope profiles h(x) and their Fourier transforms.

Convention: h_hat(q) = (1/2 pi) * integral of h(x) exp(-i q x) dx. The profile
of the mirrored doublet member is h_minus = conj(h_plus), that is
h_hat_minus(q) = conj(h_hat_plus(-q)).
"""

from abc import ABCMeta, abstractmethod
from functools import lru_cache
from typing import Any, Dict, Mapping, Optional

import numpy as np
import sympy
from scipy import integrate

from dominio.exceptions import ValidationException


class BaseProfile(metaclass=ABCMeta):
    """Real-space profile h_plus with its transform."""

    name = "base"

    def __init__(self, amplitude: float = 1.0, width: float = 1.0) -> None:
        if width <= 0.0:
            raise ValidationException(field="excitation.h.width", value=width, rule="width > 0")
        self.amplitude = float(amplitude)
        self.width = float(width)

    @abstractmethod
    def h(self, x: Any) -> np.ndarray:
        """Profile h_plus(x)."""

    @abstractmethod
    def h_hat(self, q: Any) -> np.ndarray:
        """Transform h_hat_plus(q)."""

    def signed_h(self, sign: int, x: Any) -> np.ndarray:
        value = np.asarray(self.h(x), dtype=complex)
        return value if sign > 0 else np.conj(value)

    def signed_h_hat(self, sign: int, q: Any) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if sign > 0:
            return np.asarray(self.h_hat(q), dtype=complex)
        return np.conj(np.asarray(self.h_hat(-q), dtype=complex))

    def symbolic_h_hat(self, q: sympy.Symbol) -> Optional[sympy.Expr]:
        """Closed-form transform as a sympy expression, None when there is none."""
        return None

    def symbolic_signed_h_hat(self, sign: int, q: sympy.Symbol) -> Optional[sympy.Expr]:
        expr = self.symbolic_h_hat(q)
        if expr is None or sign > 0:
            return expr
        return sympy.conjugate(expr.subs(q, -q))

    def describe(self) -> Dict[str, Any]:
        return {"family": self.name, "amplitude": self.amplitude, "width": self.width}


class GaussianProfile(BaseProfile):
    """h(x) = a exp(-x**2 / (2 s**2)); the default a = sqrt(pi), s = sqrt(2) gives h_hat = exp(-q**2)."""

    name = "gauss"

    def h(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(-0.5 * (x / self.width) ** 2)

    def h_hat(self, q: Any) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        s = self.width
        return self.amplitude * s / np.sqrt(2.0 * np.pi) * np.exp(-0.5 * (s * q) ** 2)

    def symbolic_h_hat(self, q: sympy.Symbol) -> sympy.Expr:
        a, s = sympy.Float(self.amplitude), sympy.Float(self.width)
        return a * s / sympy.sqrt(2 * sympy.pi) * sympy.exp(-(s * q) ** 2 / 2)


class SechProfile(BaseProfile):
    """h(x) = a sech(x / s)."""

    name = "sech"

    def h(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude / np.cosh(x / self.width)

    def h_hat(self, q: Any) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        s = self.width
        return 0.5 * self.amplitude * s / np.cosh(0.5 * np.pi * s * q)

    def symbolic_h_hat(self, q: sympy.Symbol) -> sympy.Expr:
        a, s = sympy.Float(self.amplitude), sympy.Float(self.width)
        return a * s / 2 / sympy.cosh(sympy.pi * s * q / 2)


class SuperGaussianProfile(BaseProfile):
    """
    h(x) = a exp(-(x**2 / (2 s**2))**m).

    The transform has no closed form; it is computed by Fourier-weighted
    quadrature and memoized per q.
    """

    name = "supergauss"

    def __init__(self, amplitude: float = 1.0, width: float = 1.0, order: int = 2) -> None:
        super().__init__(amplitude, width)
        if order < 1:
            raise ValidationException(field="excitation.h.order", value=order, rule="order >= 1")
        self.order = int(order)
        self._transform = lru_cache(maxsize=65536)(self._transform_scalar)

    def h(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(-((0.5 * (x / self.width) ** 2) ** self.order))

    def _transform_scalar(self, q: float) -> float:
        # h es par: h_hat(q) = (1/pi) * integral en [0, inf) de h(x) cos(q x)
        cutoff = self.width * np.sqrt(2.0) * (40.0 ** (1.0 / (2 * self.order)))
        if q == 0.0:
            value, _ = integrate.quad(lambda x: float(self.h(x)), 0.0, cutoff, epsabs=1e-15, limit=200)
        else:
            value, _ = integrate.quad(
                lambda x: float(self.h(x)), 0.0, cutoff, weight="cos", wvar=q, epsabs=1e-15, limit=200
            )
        return value / np.pi

    def h_hat(self, q: Any) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        values = [self._transform(float(abs(v))) for v in q.ravel()]
        return np.asarray(values, dtype=float).reshape(q.shape)

    def describe(self) -> Dict[str, Any]:
        return {**super().describe(), "order": self.order}


def soliton_amplitude(gamma2: float, alpha_pi: float, q_imag: float, beta: float) -> float:
    """
    Peak amplitude of the exact one-soliton A sech(beta x) of
    dZ/dt = i gamma2 Z_xx + alpha_pi * i q |Z|**2 Z.
    """
    if gamma2 * q_imag <= 0.0:
        raise ValidationException(
            field="soliton", value=gamma2 * q_imag, rule="gamma2 * Im Q > 0 (focusing)"
        )
    return float(np.sqrt(2.0 * gamma2 * beta**2 / (alpha_pi * q_imag)))


_FAMILIAS = {
    "gauss": GaussianProfile,
    "gaussian": GaussianProfile,
    "sech": SechProfile,
    "supergauss": SuperGaussianProfile,
}


class FactoryPerfil:
    """Builds profiles from the ``excitation.h`` configuration block."""

    @staticmethod
    def obtener_perfil(spec: Optional[Mapping[str, Any]] = None) -> BaseProfile:
        spec = dict(spec or {})
        family = str(spec.get("family", "gauss")).lower()
        if family not in _FAMILIAS:
            raise ValidationException(
                field="excitation.h.family", value=family, rule="unknown profile family",
                expected=", ".join(sorted(_FAMILIAS)),
            )
        params = dict(spec.get("params", {}) or {})
        if family in ("gauss", "gaussian"):
            params.setdefault("amplitude", float(np.sqrt(np.pi)))
            params.setdefault("width", float(np.sqrt(2.0)))
        return _FAMILIAS[family](**params)
