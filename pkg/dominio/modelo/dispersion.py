"""
Band structures of a one-dimensional periodic medium.

A :class:`DispersionModel` holds an ordered list of inversion-symmetric band
functions omega_n(k) on the Brillouin zone [-pi, pi] together with a modal
susceptibility provider. Bands are either synthetic closed-form families,
differentiated symbolically, or the output of the Hill-operator solver.
"""

from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from config.logging_config import get_logger
from dominio.exceptions import ValidationException

from .diferencias import central_derivative
from .susceptibilidad import SusceptibilityProvider, constant_susceptibility

logger = get_logger(__name__)

K = sympy.Symbol("k", real=True)

MAX_ORDEN_ANALITICO = 6
TOLERANCIA_PARIDAD = 1e-12
PASO_DERIVADA_GRILLA = 1e-3 * 2.0 * np.pi


class BaseBand(metaclass=ABCMeta):
    """
    One band function omega_n(k).
    """

    analytic: bool = False

    @abstractmethod
    def __call__(self, k: Any) -> np.ndarray:
        """Band frequency at quasimomentum ``k`` (array-like)."""

    def derivative(self, k: Any, order: int) -> np.ndarray:
        """Derivative of the band of the given order, elementwise in ``k``."""
        if order == 0:
            return self(k)
        ks = np.atleast_1d(np.asarray(k, dtype=float))
        values = [
            central_derivative(lambda x: self(x), float(kk), order, PASO_DERIVADA_GRILLA)[0].real
            for kk in ks
        ]
        return np.reshape(np.array(values), np.shape(k))

    def describe(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


def _familia_cos(params: Mapping[str, Any]) -> sympy.Expr:
    return sympy.Float(params.get("a", 2.0)) - sympy.Float(params.get("b", 1.0)) * sympy.cos(K)


def _familia_raiz(params: Mapping[str, Any]) -> sympy.Expr:
    m = sympy.Float(params.get("m", 1.0))
    return sympy.sqrt(m**2 + K**2)


def _familia_poli_cos(params: Mapping[str, Any]) -> sympy.Expr:
    coeffs = params.get("coeffs", [2.0, -1.0])
    return sum((sympy.Float(c) * sympy.cos(K) ** j for j, c in enumerate(coeffs)), sympy.Integer(0))


def _familia_poli(params: Mapping[str, Any]) -> sympy.Expr:
    coeffs = params.get("coeffs", [0.0, 0.0, 0.5])
    return sum((sympy.Float(c) * K**j for j, c in enumerate(coeffs)), sympy.Integer(0))


FAMILIAS: Dict[str, Callable[[Mapping[str, Any]], sympy.Expr]] = {
    "2-cos": _familia_cos,
    "sqrt(1+k^2)": _familia_raiz,
    "cos-poly": _familia_poli_cos,
    "poly": _familia_poli,
}

# Nombres alternativos aceptados en la configuración, con parámetros implícitos.
ALIAS: Dict[str, Tuple[str, Dict[str, Any]]] = {
    "2−cos": ("2-cos", {}),
    "2-cos k": ("2-cos", {}),
    "sqrt(1+k²)": ("sqrt(1+k^2)", {}),
    "relativistic": ("sqrt(1+k^2)", {}),
    "k^2/2": ("poly", {"coeffs": [0.0, 0.0, 0.5]}),
    "k²/2": ("poly", {"coeffs": [0.0, 0.0, 0.5]}),
}


class SyntheticBand(BaseBand):
    """
    Closed-form band from a named family.

    Derivatives up to order six are obtained symbolically with sympy and
    compiled with ``lambdify`` at construction, so instances are immutable
    and safe to share between threads.
    """

    analytic = True

    def __init__(self, family: str, params: Optional[Mapping[str, Any]] = None) -> None:
        canonical, implicit = ALIAS.get(family, (family, {}))
        if canonical not in FAMILIAS:
            raise ValidationException(
                field="model.family",
                value=family,
                rule="unknown dispersion family",
                expected=", ".join(sorted(list(FAMILIAS) + list(ALIAS))),
            )
        merged = dict(implicit)
        merged.update(params or {})
        self.family = canonical
        self.params = merged
        self.expression = FAMILIAS[canonical](merged)
        self._derivadas = tuple(
            sympy.lambdify(K, sympy.diff(self.expression, K, j), "numpy")
            for j in range(MAX_ORDEN_ANALITICO + 1)
        )

    def __call__(self, k: Any) -> np.ndarray:
        return self.derivative(k, 0)

    def derivative(self, k: Any, order: int) -> np.ndarray:
        if order > MAX_ORDEN_ANALITICO:
            return super().derivative(k, order)
        k = np.asarray(k, dtype=float)
        values = np.asarray(self._derivadas[order](k), dtype=float)
        return np.broadcast_to(values, k.shape).copy() if values.shape != k.shape else values

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "params": dict(self.params), "expression": str(self.expression)}


@dataclass(frozen=True)
class DispersionModel:
    """
    Ordered band structure with its modal susceptibility.

    Attributes:
        bands: Band functions, band number n is ``bands[n - 1]``.
        susceptibility: Provider of the modal susceptibility values.
        provenance: ``"synthetic"`` or ``"hill-solver"``.
        k_grid: Sampling grid of solver bands (None for synthetic models).
        metadata: Free-form provenance data echoed in reports.
    """

    bands: Tuple[BaseBand, ...]
    susceptibility: SusceptibilityProvider
    provenance: str = "synthetic"
    k_grid: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_bands(self) -> int:
        return len(self.bands)

    def band(self, n: int) -> BaseBand:
        if not 1 <= n <= self.n_bands:
            raise ValidationException(
                field="band", value=n, rule=f"band index in 1..{self.n_bands}"
            )
        return self.bands[n - 1]

    def omega(self, n: int, k: Any) -> np.ndarray:
        """Frequency of band ``n`` at quasimomentum ``k``."""
        return self.band(n)(k)

    def signed_omega(self, sign: int, n: int, k: Any) -> np.ndarray:
        """Frequency ``sign * omega_n(k)`` of the mode (sign, n, k)."""
        return sign * self.omega(n, k)

    def derivative(self, n: int, k: Any, order: int) -> np.ndarray:
        return self.band(n).derivative(k, order)

    def mode_overlap(
        self,
        signs: Sequence[int],
        bands: Sequence[int],
        ks: Sequence[Any],
    ) -> np.ndarray:
        """
        Modal susceptibility of the quadruplet (end; three origins).

        Args:
            signs: Frequency signs of (end, origin 1, origin 2, origin 3).
            bands: Band numbers in the same order.
            ks: Quasimomenta in the same order (arrays broadcast together).
        """
        freqs = tuple(s * self.omega(n, k) for s, n, k in zip(signs[1:], bands[1:], ks[1:]))
        return self.susceptibility.value(tuple(signs), tuple(bands), tuple(ks), freqs)

    def band_table(self, k: Any) -> np.ndarray:
        """Array of shape (len(k), n_bands) with every band sampled at ``k``."""
        k = np.asarray(k, dtype=float)
        return np.stack([b(k) for b in self.bands], axis=-1)

    def describe(self) -> Dict[str, Any]:
        return {
            "provenance": self.provenance,
            "bands": [b.describe() for b in self.bands],
            "susceptibility": self.susceptibility.describe(),
            **self.metadata,
        }


def validate_bands(bands: Sequence[BaseBand], n_check: int = 257, tolerance: float = TOLERANCIA_PARIDAD) -> None:
    """
    Check inversion symmetry, non-negativity and ordering on a validation grid.

    Raises:
        ValidationException: The first violated rule.
    """
    k = np.linspace(0.0, np.pi, n_check)
    previous = None
    for n, band in enumerate(bands, start=1):
        plus, minus = band(k), band(-k)
        asimetria = float(np.max(np.abs(plus - minus)))
        if asimetria > tolerance * max(1.0, float(np.max(np.abs(plus)))):
            raise ValidationException(
                field=f"band {n}", value=asimetria, rule="omega_n(-k) = omega_n(k)",
                expected="even band function",
            )
        if not np.all(np.isfinite(plus)) or float(np.min(plus)) < 0.0:
            raise ValidationException(field=f"band {n}", value=float(np.min(plus)), rule="omega_n(k) >= 0")
        if previous is not None and np.any(plus < previous - tolerance):
            raise ValidationException(
                field=f"band {n}", value=float(np.min(plus - previous)),
                rule="omega_n(k) <= omega_(n+1)(k)", expected="ordered bands",
            )
        previous = plus


def make_synthetic(
    spec: Mapping[str, Any],
    susceptibility: Optional[SusceptibilityProvider] = None,
) -> DispersionModel:
    """
    Build a synthetic dispersion model from a named-family specification.

    Args:
        spec: ``{"family": name, "params": {...}, "extra_bands": [{...}, ...]}``.
            Extra bands are stacked above the first one.
        susceptibility: Modal susceptibility provider; constant 1 by default.

    Returns:
        A validated :class:`DispersionModel`.

    Raises:
        ValidationException: Unknown family, odd band or unordered bands.
    """
    entries: List[Mapping[str, Any]] = [spec] + list(spec.get("extra_bands", []) or [])
    bands = tuple(SyntheticBand(e["family"], e.get("params", {})) for e in entries)
    validate_bands(bands)
    logger.debug("Modelo sintético construido", extra={"families": [b.family for b in bands]})
    return DispersionModel(
        bands=bands,
        susceptibility=susceptibility or constant_susceptibility(),
        provenance="synthetic",
    )


class FactoryDispersion:
    """Builds dispersion models from the ``model`` configuration section."""

    @staticmethod
    def obtener_modelo(spec: Mapping[str, Any], susceptibility: Optional[SusceptibilityProvider] = None) -> DispersionModel:
        if spec.get("potential"):
            from .hill import hill_bands

            return hill_bands(
                spec["potential"],
                n_bands=int(spec.get("n_bands", 4)),
                n_k=int(spec.get("n_k", 128)),
                n_plane_waves=int(spec.get("n_plane_waves", 41)),
                weight=str(spec.get("weight", "epsilon")),
                susceptibility=susceptibility,
                chi3=spec.get("chi3"),
            )
        return make_synthetic(spec, susceptibility)
