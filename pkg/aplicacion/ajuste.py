"""
Log-log slope fits, verdict criteria and the scaling report.

Every verdict of a report is recomputed from its rows: the fits read the
tabulated columns only, and rows flagged in the exclusion column are left
out of the slope fits.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config.logging_config import get_logger
from dominio.exceptions import ValidationException
from infraestructura.acceso_datos.mapeador import Tabla

logger = get_logger(__name__)

CONFIANZA = 0.95
TIPOS_CRITERIO = ("slope", "min_slope", "max_slope", "abs_slope_max", "max_le", "min_ge", "last_ge", "near")
TIPOS_PENDIENTE = ("slope", "min_slope", "max_slope", "abs_slope_max")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log10 x, log10 y)."""

    slope: float
    intercept: float
    half_width: float
    n_points: int

    @property
    def defined(self) -> bool:
        return bool(np.isfinite(self.slope))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": _finite_or_none(self.slope),
            "intercept": _finite_or_none(self.intercept),
            "half_width": _finite_or_none(self.half_width),
            "n_points": self.n_points,
        }


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def fit_slope(x: Sequence[float], y: Sequence[float], confidence: float = CONFIANZA) -> SlopeFit:
    """
    Ordinary least squares on log10 with a Student-t confidence half-width.

    Non-positive or non-finite samples are dropped. Fewer than two usable
    points give an undefined (NaN) slope; two points give an undefined
    half-width.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y) & (x > 0.0) & (y > 0.0)
    lx, ly = np.log10(x[keep]), np.log10(y[keep])
    n = int(lx.size)
    if n < 2 or np.ptp(lx) == 0.0:
        return SlopeFit(float("nan"), float("nan"), float("nan"), n)
    fit = stats.linregress(lx, ly)
    half = float("nan")
    if n > 2:
        half = float(stats.t.ppf(0.5 + confidence / 2.0, n - 2) * fit.stderr)
    return SlopeFit(float(fit.slope), float(fit.intercept), half, n)


@dataclass(frozen=True)
class Criterion:
    """
    Pass/fail rule on one column.

    Kinds: ``slope`` (|s - target| <= tolerance), ``min_slope`` (s >= target),
    ``max_slope`` (s <= target), ``abs_slope_max`` (|s| <= target),
    ``max_le`` (max <= target), ``min_ge`` (min >= target), ``last_ge``
    (last row >= target) and ``near`` (|last - target| <= tolerance |target|).
    """

    column: str
    kind: str
    target: float
    tolerance: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in TIPOS_CRITERIO:
            raise ValidationException(
                field="criterion.kind", value=self.kind, rule="known criterion", expected=", ".join(TIPOS_CRITERIO)
            )

    @property
    def label(self) -> str:
        return f"{self.column}:{self.kind}"

    @property
    def uses_slope(self) -> bool:
        return self.kind in TIPOS_PENDIENTE

    def judge(self, values: np.ndarray, fit: Optional[SlopeFit]) -> bool:
        if self.uses_slope:
            if fit is None or not fit.defined:
                return False
            s = fit.slope
            return {
                "slope": abs(s - self.target) <= self.tolerance,
                "min_slope": s >= self.target,
                "max_slope": s <= self.target,
                "abs_slope_max": abs(s) <= self.target,
            }[self.kind]
        values = values[np.isfinite(values)]
        if values.size == 0:
            return False
        if self.kind == "max_le":
            return float(np.max(values)) <= self.target
        if self.kind == "min_ge":
            return float(np.min(values)) >= self.target
        if self.kind == "last_ge":
            return float(values[-1]) >= self.target
        return abs(float(values[-1]) - self.target) <= self.tolerance * abs(self.target)

    def to_dict(self) -> Dict[str, Any]:
        return {"column": self.column, "kind": self.kind, "target": self.target, "tolerance": self.tolerance}


@dataclass
class ScalingReport:
    """
    Rows of one experiment, the fitted slopes and the verdicts.

    Attributes:
        name: Report name; the CSV file stem.
        x_column: Abscissa of the slope fits.
        columns: Column names of ``rows``.
        rows: Numeric rows.
        criteria: Verdict rules.
        exclude_column: Column whose non-zero entries leave a row out of the fits.
        min_points: Fewer fitted points leave the slopes undefined.
        tables: Further dumps written next to the report.
        documents: JSON dumps written next to the report, by file stem.
        notes: JSON-serializable context (genericity margins, diagnostics).
        error: Message of the failure that cut the experiment short.
    """

    name: str
    x_column: str
    columns: Tuple[str, ...]
    rows: List[Tuple[float, ...]] = field(default_factory=list)
    criteria: Tuple[Criterion, ...] = ()
    exclude_column: Optional[str] = None
    min_points: int = 2
    tables: List[Tabla] = field(default_factory=list)
    documents: Dict[str, Any] = field(default_factory=dict)
    notes: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    slopes: Dict[str, SlopeFit] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)

    def add_row(self, values: Mapping[str, float]) -> None:
        self.rows.append(tuple(float(values.get(c, float("nan"))) for c in self.columns))

    def table(self) -> Tabla:
        return Tabla(self.name, tuple(self.columns), tuple(self.rows))

    def column(self, name: str) -> np.ndarray:
        return self.table().column(name)

    def fitted_mask(self) -> np.ndarray:
        if self.exclude_column is None or not self.rows:
            return np.ones(len(self.rows), dtype=bool)
        return self.column(self.exclude_column) == 0.0

    def evaluate(self) -> "ScalingReport":
        """Recompute slopes and verdicts from the rows."""
        self.slopes, self.verdicts = {}, {}
        if self.rows:
            mask = self.fitted_mask()
            x = self.column(self.x_column)[mask]
            for criterion in self.criteria:
                if criterion.uses_slope and criterion.column not in self.slopes:
                    fit = fit_slope(x, self.column(criterion.column)[mask])
                    if fit.n_points < self.min_points:
                        fit = SlopeFit(float("nan"), float("nan"), float("nan"), fit.n_points)
                    self.slopes[criterion.column] = fit
        for criterion in self.criteria:
            values = self.column(criterion.column) if self.rows else np.array([])
            self.verdicts[criterion.label] = criterion.judge(values, self.slopes.get(criterion.column))
        if self.error is not None:
            self.verdicts["completed"] = False
        logger.info(
            "Informe evaluado",
            extra={
                "report": self.name,
                "rows": len(self.rows),
                "slopes": {c: f.slope for c, f in self.slopes.items()},
                "passed": self.passed,
            },
        )
        return self

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "x_column": self.x_column,
            "rows": len(self.rows),
            "excluded_rows": int(np.count_nonzero(~self.fitted_mask())) if self.rows else 0,
            "criteria": [c.to_dict() for c in self.criteria],
            "slopes": {c: f.to_dict() for c, f in self.slopes.items()},
            "verdicts": dict(self.verdicts),
            "passed": self.passed,
            "notes": self.notes,
            "error": self.error,
        }
