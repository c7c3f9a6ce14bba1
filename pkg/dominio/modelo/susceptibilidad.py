"""
Modal susceptibility providers.

A provider is a pure function of the mode quadruplet: frequency signs and
band numbers of the end mode and the three origin modes, their quasimomenta
and the signed origin frequencies. Synthetic and solver-derived providers
are interchangeable for coefficient extraction; only factorized providers
can drive the modal reference solver.
"""

from abc import ABCMeta, abstractmethod
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from dominio.exceptions import ValidationException

from .nucleos import BaseKernel, FactoryKernel, InstantaneousKernel


def as_complex(value: Any, field: str = "susceptibility") -> complex:
    """Complex number from a scalar or a ``[re, im]`` pair (JSON has no complex type)."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValidationException(field=field, value=value, rule="[re, im] pair")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, Mapping):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    return complex(value)


class SusceptibilityProvider(metaclass=ABCMeta):
    """Interface of the modal susceptibility Q̆ of a quadruplet."""

    factorized: bool = False

    @abstractmethod
    def value(
        self,
        signs: Tuple[int, ...],
        bands: Tuple[int, ...],
        ks: Tuple[Any, ...],
        freqs: Tuple[Any, ...],
    ) -> np.ndarray:
        """Q̆ at (end; origins). ``freqs`` are the signed origin frequencies."""

    def memory_coefficient(
        self,
        signs: Tuple[int, ...],
        bands: Tuple[int, ...],
        ks: Tuple[Any, ...],
        freqs: Tuple[Any, ...],
        slot: int,
    ) -> np.ndarray:
        """First-order time-harmonic coefficient of origin ``slot`` (1, 2 or 3)."""
        return np.zeros(np.broadcast(*ks).shape, dtype=complex)

    def quintic(self, sign: int, k_end: Any, ks: Sequence[Any]) -> np.ndarray:
        """Fifth-order modal susceptibility; zero unless the provider defines it."""
        return np.zeros(np.broadcast(k_end, *ks).shape, dtype=complex)

    def describe(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


class SyntheticSusceptibility(SusceptibilityProvider):
    """
    Factorized synthetic susceptibility.

    Q̆ = q_s * w(k) * prod_j w(k_j) * kappa(Omega_j), with the periodic even
    weight w(k) = exp(-s (1 - cos k)), the normalized slot transform kappa of
    the causal kernel, and q_- = conj(q_+).

    Args:
        q_plus: Cubic coupling of the positive-frequency end mode.
        s: Weight width parameter (0 gives a constant weight).
        kernel: Causal kernel; instantaneous by default.
        q5: Fifth-order coupling of the positive-frequency end mode.
    """

    factorized = True

    def __init__(
        self,
        q_plus: complex = 1j,
        s: float = 0.0,
        kernel: Optional[BaseKernel] = None,
        q5: complex = 0.0,
    ) -> None:
        if s < 0.0:
            raise ValidationException(field="susceptibility.s", value=s, rule="s >= 0")
        self.q_plus = complex(q_plus)
        self.s = float(s)
        self.kernel = kernel or InstantaneousKernel()
        self.q5_plus = complex(q5)

    def coupling(self, sign: int) -> complex:
        return self.q_plus if sign > 0 else self.q_plus.conjugate()

    def coupling5(self, sign: int) -> complex:
        return self.q5_plus if sign > 0 else self.q5_plus.conjugate()

    def weight(self, k: Any) -> np.ndarray:
        return np.exp(-self.s * (1.0 - np.cos(np.asarray(k, dtype=float))))

    def end_weight(self, sign: int, k: Any) -> np.ndarray:
        return self.coupling(sign) * self.weight(k)

    def slot_weight(self, k: Any, omega: Any) -> np.ndarray:
        return self.weight(k) * self.kernel.slot_factor(omega)

    def slot_memory_weight(self, k: Any, omega: Any) -> np.ndarray:
        """Slot weight times the first-order memory ratio of the kernel."""
        return self.slot_weight(k, omega) * self.kernel.slot_log_derivative(omega)

    def value(self, signs, bands, ks, freqs) -> np.ndarray:
        result = self.end_weight(signs[0], ks[0])
        for k, omega in zip(ks[1:], freqs):
            result = result * self.slot_weight(k, omega)
        return np.asarray(result, dtype=complex)

    def memory_coefficient(self, signs, bands, ks, freqs, slot) -> np.ndarray:
        if self.kernel.instantaneous:
            return super().memory_coefficient(signs, bands, ks, freqs, slot)
        ratio = self.kernel.slot_log_derivative(freqs[slot - 1])
        return self.value(signs, bands, ks, freqs) * ratio

    def quintic(self, sign: int, k_end: Any, ks: Sequence[Any]) -> np.ndarray:
        result = self.coupling5(sign) * self.weight(k_end)
        for k in ks:
            result = result * self.weight(k)
        return np.asarray(result, dtype=complex)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "synthetic",
            "q_plus": [self.q_plus.real, self.q_plus.imag],
            "s": self.s,
            "q5": [self.q5_plus.real, self.q5_plus.imag],
            "kernel": self.kernel.describe(),
        }


def constant_susceptibility(q: complex = 1j) -> SyntheticSusceptibility:
    """Constant Q̆ = q for positive-frequency end modes, conj(q) otherwise."""
    return SyntheticSusceptibility(q_plus=q)


class FactorySusceptibility:
    """Builds providers from the ``model.susceptibility`` configuration block."""

    @staticmethod
    def obtener_susceptibilidad(spec: Optional[Mapping[str, Any]]) -> SyntheticSusceptibility:
        spec = spec or {}
        kind = spec.get("kind", "synthetic")
        if kind == "constant":
            return constant_susceptibility(as_complex(spec.get("q_plus", [0.0, 1.0])))
        if kind != "synthetic":
            raise ValidationException(
                field="model.susceptibility.kind", value=kind, rule="unknown provider",
                expected="constant, synthetic",
            )
        return SyntheticSusceptibility(
            q_plus=as_complex(spec.get("q_plus", [0.0, 1.0])),
            s=float(spec.get("s", 0.0)),
            kernel=FactoryKernel.obtener_nucleo(spec.get("kernel")),
            q5=as_complex(spec.get("q5", 0.0)),
        )
