"""
Oscillatory quadrature of interaction integrals.

The spatial part is

    S(lam) = integral over (q', q'') of exp(i lam Phi(q', q'')) A(q', q''),

and the oracle adds the slow-time integral

    I(tau) = (1/rho) * integral_0^tau psi(tau1)**3 S(tau1 / theta) dtau1.

Both are computed with composite Gauss-Legendre rules: the domain is the box
outside which |A| stays below a relative cutoff, every axis is split into
cells across which the phase changes by less than a fixed angle, and each
result is checked against a lower-order rule on the same cells.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, ValidationException
from dominio.excitacion.envolvente import EnvelopeSpec

from .fase import Q1, Q2

logger = get_logger(__name__)

CORTE_AMPLITUD = 1e-14
FASE_POR_CELDA = np.pi / 4.0
NODOS = 6
NODOS_CONTROL = 5
MIN_CELDAS = 16
MAX_CELDAS = 8192
MUESTRAS = 257
CELDAS_RAMPA = 32
RADIOS = tuple(2.0**p for p in range(7))
TOLERANCIA_ORACULO = 1e-8

_REGLAS = {n: np.polynomial.legendre.leggauss(n) for n in (NODOS, NODOS_CONTROL)}

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _lambdify(expr: sympy.Expr) -> Field:
    compiled = sympy.lambdify((Q1, Q2), expr, "numpy")

    def evaluate(q1: Any, q2: Any) -> np.ndarray:
        q1 = np.asarray(q1, dtype=float)
        q2 = np.asarray(q2, dtype=float)
        shape = np.broadcast(q1, q2).shape
        return np.broadcast_to(np.asarray(compiled(q1, q2), dtype=complex), shape)

    return evaluate


@dataclass(frozen=True)
class InteractionIntegrand:
    """
    Phase and amplitude of an interaction integral in the variables (q', q'').

    Attributes:
        phase: Real phase Phi, vectorized over q1 and q2.
        amplitude: Complex amplitude A, vectorized.
        symbolic_phase: Phi as a sympy expression in q1, q2 when available.
        symbolic_amplitude: A as a sympy expression when available.
        center: Point around which the support is searched; the critical
            point for stationary-phase expansions.
        label: Name echoed in reports.
    """

    phase: Field
    amplitude: Field
    symbolic_phase: Optional[sympy.Expr] = None
    symbolic_amplitude: Optional[sympy.Expr] = None
    center: Tuple[float, float] = (0.0, 0.0)
    label: str = "integrand"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_sympy(
        cls,
        phase: Union[str, sympy.Expr],
        amplitude: Union[str, sympy.Expr],
        center: Tuple[float, float] = (0.0, 0.0),
        label: str = "integrand",
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "InteractionIntegrand":
        names = {"q1": Q1, "q2": Q2}
        try:
            phase_expr = sympy.sympify(phase, locals=names)
            amplitude_expr = sympy.sympify(amplitude, locals=names)
        except (sympy.SympifyError, TypeError) as exc:
            raise ValidationException(field="integrand", value=str(phase), rule="sympy expression in q1, q2") from exc
        unknown = (phase_expr.free_symbols | amplitude_expr.free_symbols) - {Q1, Q2}
        if unknown:
            raise ValidationException(
                field="integrand", value=sorted(str(s) for s in unknown), rule="only the symbols q1 and q2",
            )
        return cls(
            phase=lambda a, b, f=_lambdify(phase_expr): np.real(f(a, b)),
            amplitude=_lambdify(amplitude_expr),
            symbolic_phase=phase_expr,
            symbolic_amplitude=amplitude_expr,
            center=(float(center[0]), float(center[1])),
            label=label,
            metadata=dict(metadata or {}),
        )

    @property
    def symbolic(self) -> bool:
        return self.symbolic_phase is not None and self.symbolic_amplitude is not None

    def swapped(self) -> "InteractionIntegrand":
        """The same integrand with q' and q'' exchanged."""
        phase, amplitude = self.phase, self.amplitude
        sym_phase = sym_amp = None
        if self.symbolic:
            swap = {Q1: Q2, Q2: Q1}
            sym_phase = self.symbolic_phase.xreplace(swap)
            sym_amp = self.symbolic_amplitude.xreplace(swap)
        return InteractionIntegrand(
            phase=lambda a, b: phase(b, a),
            amplitude=lambda a, b: amplitude(b, a),
            symbolic_phase=sym_phase,
            symbolic_amplitude=sym_amp,
            center=(self.center[1], self.center[0]),
            label=f"{self.label}[swapped]",
            metadata=self.metadata,
        )

    def with_amplitude(self, factor: Field, label: Optional[str] = None) -> "InteractionIntegrand":
        """Numeric integrand with the amplitude multiplied by ``factor``."""
        amplitude = self.amplitude
        return InteractionIntegrand(
            phase=self.phase,
            amplitude=lambda a, b: amplitude(a, b) * factor(a, b),
            center=self.center,
            label=label or self.label,
            metadata=self.metadata,
        )

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"label": self.label, "center": list(self.center), **self.metadata}
        if self.symbolic:
            out["phase"] = str(self.symbolic_phase)
            out["amplitude"] = str(self.symbolic_amplitude)
        return out


@dataclass(frozen=True)
class Support:
    """Truncated integration box and the amplitude scale found in it."""

    box: Tuple[float, float, float, float]
    peak: float
    peak_at: Tuple[float, float]
    edge: float

    @property
    def area(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)

    @property
    def tail_bound(self) -> float:
        return self.edge * self.area


def find_support(integrand: InteractionIntegrand, cut: float = CORTE_AMPLITUD) -> Optional[Support]:
    """
    Smallest box (from a doubling sequence of radii around the center) whose
    border sees |A| <= cut * max|A|, trimmed to the cells above the cut.

    Returns None for an identically vanishing amplitude.

    Raises:
        ConvergenceException: The amplitude does not decay within the
            largest radius.
    """
    cx, cy = integrand.center
    edge_ratio = np.inf
    for radius in RADIOS:
        xs = cx + np.linspace(-radius, radius, MUESTRAS)
        ys = cy + np.linspace(-radius, radius, MUESTRAS)
        amp = np.abs(integrand.amplitude(xs[None, :], ys[:, None]))
        peak = float(np.max(amp))
        if peak == 0.0:
            if radius == RADIOS[-1]:
                return None
            continue
        border = max(float(np.max(amp[0])), float(np.max(amp[-1])), float(np.max(amp[:, 0])), float(np.max(amp[:, -1])))
        edge_ratio = border / peak
        if edge_ratio > cut:
            continue
        rows = np.flatnonzero(np.any(amp > cut * peak, axis=1))
        cols = np.flatnonzero(np.any(amp > cut * peak, axis=0))
        i0, i1 = max(rows[0] - 1, 0), min(rows[-1] + 1, MUESTRAS - 1)
        j0, j1 = max(cols[0] - 1, 0), min(cols[-1] + 1, MUESTRAS - 1)
        at = np.unravel_index(int(np.argmax(amp)), amp.shape)
        return Support(
            box=(float(xs[j0]), float(xs[j1]), float(ys[i0]), float(ys[i1])),
            peak=peak,
            peak_at=(float(xs[at[1]]), float(ys[at[0]])),
            edge=max(border, cut * peak),
        )
    raise ConvergenceException(
        operation="spatial_integral support", residual=float(edge_ratio), tolerance=cut,
        context={"radius": RADIOS[-1]},
    )


def phase_bound(integrand: InteractionIntegrand, support: Support, cut: float = CORTE_AMPLITUD) -> float:
    """Largest |Phi| where the amplitude is above the cut; bounds the slow-time frequency of S(tau / theta)."""
    x0, x1, y0, y1 = support.box
    xs = np.linspace(x0, x1, 129)
    ys = np.linspace(y0, y1, 129)
    amp = np.abs(integrand.amplitude(xs[None, :], ys[:, None]))
    phase = np.abs(integrand.phase(xs[None, :], ys[:, None]))
    return float(np.max(np.where(amp > cut * support.peak, phase, 0.0)))


def panel_rule(lo: float, hi: float, cells: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on ``cells`` equal cells."""
    x, w = _REGLAS[n] if n in _REGLAS else np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, cells + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _cells(rate: float, lam_max: float, length: float, cell_phase: float, operation: str) -> int:
    needed = int(np.ceil(lam_max * rate * length / cell_phase)) if length > 0.0 else 1
    cells = max(MIN_CELDAS, needed)
    if cells > MAX_CELDAS:
        raise ConvergenceException(
            operation=operation, iterations=cells, context={"max_cells": MAX_CELDAS, "lam": lam_max},
            user_message="La integral es demasiado oscilante para el presupuesto de celdas",
        )
    return cells


def _row(
    integrand: InteractionIntegrand,
    y: float,
    lo: float,
    hi: float,
    lam: np.ndarray,
    cut: float,
    n: int,
    cell_phase: float,
) -> Tuple[np.ndarray, int]:
    xs = np.linspace(lo, hi, MUESTRAS)
    amp = np.abs(integrand.amplitude(xs, np.full_like(xs, y)))
    keep = np.flatnonzero(amp > cut)
    if keep.size == 0:
        return np.zeros(lam.size, dtype=complex), 0
    i0, i1 = max(keep[0] - 1, 0), min(keep[-1] + 1, MUESTRAS - 1)
    a, b = float(xs[i0]), float(xs[i1])
    phase = integrand.phase(xs[i0 : i1 + 1], np.full(i1 - i0 + 1, y))
    dx = xs[1] - xs[0]
    rate = float(np.max(np.abs(np.diff(phase)))) / dx if phase.size > 1 else 0.0
    cells = _cells(rate, float(np.max(lam)), b - a, cell_phase, "spatial_integral")
    nodes, weights = panel_rule(a, b, cells, n)
    ys = np.full_like(nodes, y)
    weighted = weights * integrand.amplitude(nodes, ys)
    phi = integrand.phase(nodes, ys)
    return np.exp(1j * lam[:, None] * phi[None, :]) @ weighted, cells


@dataclass(frozen=True)
class SpatialIntegral:
    """
    Values of S(lam).

    Attributes:
        lam: Oscillation parameters.
        values: S at each lam.
        error: Largest gap between the two rules.
        tail_bound: Border amplitude times box area.
        box: Integration box (x0, x1, y0, y1).
        cells: Outer cells and the largest inner cell count.
    """

    lam: np.ndarray
    values: np.ndarray
    error: float
    tail_bound: float
    box: Tuple[float, float, float, float]
    cells: Tuple[int, int]

    def describe(self) -> Dict[str, Any]:
        return {"error": self.error, "tail_bound": self.tail_bound, "box": list(self.box), "cells": list(self.cells)}


def _rule_value(
    integrand: InteractionIntegrand,
    support: Support,
    lam: np.ndarray,
    outer_cells: int,
    n: int,
    cell_phase: float,
) -> Tuple[np.ndarray, int]:
    x0, x1, y0, y1 = support.box
    cut = CORTE_AMPLITUD * support.peak
    ys, wy = panel_rule(y0, y1, outer_cells, n)
    total = np.zeros(lam.size, dtype=complex)
    widest = 0
    for y, w in zip(ys, wy):
        row, cells = _row(integrand, float(y), x0, x1, lam, cut, n, cell_phase)
        total += w * row
        widest = max(widest, cells)
    return total, widest


def spatial_integral(
    integrand: InteractionIntegrand,
    lam: Union[float, Sequence[float], np.ndarray],
    tolerance: float = TOLERANCIA_ORACULO,
    cell_phase: float = FASE_POR_CELDA,
) -> SpatialIntegral:
    """
    Oscillatory double integral S(lam) for one or several lam.

    Raises:
        ConvergenceException: Rule gap or tail bound above ``tolerance``
            (relative to max(1, |S|)), or a cell budget overflow.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    support = find_support(integrand)
    if support is None:
        return SpatialIntegral(lam, np.zeros(lam.size, dtype=complex), 0.0, 0.0, (0.0, 0.0, 0.0, 0.0), (0, 0))

    # ritmo de la fase a lo largo del eje exterior, donde la amplitud cuenta
    x0, x1, y0, y1 = support.box
    xs = np.linspace(x0, x1, 65)
    ys = np.linspace(y0, y1, MUESTRAS)
    amp = np.abs(integrand.amplitude(xs[None, :], ys[:, None]))
    phase = integrand.phase(xs[None, :], ys[:, None])
    significant = (amp[1:] > CORTE_AMPLITUD * support.peak) | (amp[:-1] > CORTE_AMPLITUD * support.peak)
    steps = np.abs(np.diff(phase, axis=0))
    rate = float(np.max(np.where(significant, steps, 0.0))) / (ys[1] - ys[0])
    outer = _cells(rate, float(np.max(lam)), y1 - y0, cell_phase, "spatial_integral")

    value, widest = _rule_value(integrand, support, lam, outer, NODOS, cell_phase)
    control, _ = _rule_value(integrand, support, lam, outer, NODOS_CONTROL, cell_phase)
    error = float(np.max(np.abs(value - control)))
    scale = max(1.0, float(np.max(np.abs(value))))
    result = SpatialIntegral(lam, value, error, support.tail_bound, support.box, (outer, widest))
    logger.debug("Integral espacial", extra={"label": integrand.label, **result.describe()})
    if error > tolerance * scale or support.tail_bound > tolerance * scale:
        raise ConvergenceException(
            operation="spatial_integral",
            residual=max(error, support.tail_bound),
            tolerance=tolerance * scale,
            context={"label": integrand.label},
        )
    return result


@dataclass(frozen=True)
class OracleResult:
    """
    Oracle values I(tau) on a slow-time grid.

    Attributes:
        tau: Requested slow times.
        values: I at each tau.
        error: Rule gap estimate per tau (time and space rules combined).
        tail_bound: Spatial tail bound times the time factor.
        theta: Dispersion parameter rho / beta**2.
        rho: Slow-time scale.
        nodes: Number of slow-time nodes evaluated.
    """

    tau: np.ndarray
    values: np.ndarray
    error: np.ndarray
    tail_bound: float
    theta: float
    rho: float
    nodes: int

    def rows(self) -> List[Tuple[float, float, float, float]]:
        return [(float(t), float(v.real), float(v.imag), float(e)) for t, v, e in zip(self.tau, self.values, self.error)]

    def describe(self) -> Dict[str, Any]:
        return {
            "theta": self.theta,
            "rho": self.rho,
            "nodes": self.nodes,
            "error_max": float(np.max(self.error)) if self.error.size else 0.0,
            "tail_bound": self.tail_bound,
        }


def time_panels(
    taus: np.ndarray,
    envelope: EnvelopeSpec,
    theta: float,
    frequency: float,
    start: float = 0.0,
    cell_phase: float = FASE_POR_CELDA,
) -> List[Tuple[float, float]]:
    """Cells of [start, max tau] with breakpoints at the ramp end and every requested tau."""
    top = float(np.max(taus))
    marks = {start, *[float(t) for t in taus if t > start]}
    if start < envelope.tau0 < top:
        marks.add(envelope.tau0)
    breaks = sorted(marks)
    longest = 0.5 * envelope.tau0
    if frequency > 0.0:
        longest = min(longest, cell_phase * theta / frequency)
    # celdas finas sobre la rampa
    ramp = min(longest, envelope.tau0 / CELDAS_RAMPA)
    cells = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        step = ramp if a < envelope.tau0 else longest
        count = max(2, int(np.ceil((b - a) / step)))
        if count > MAX_CELDAS:
            raise ConvergenceException(
                operation="quad_oracle", iterations=count, context={"theta": theta, "frequency": frequency},
            )
        edges = np.linspace(a, b, count + 1)
        cells.extend(zip(edges[:-1], edges[1:]))
    return cells


def integrate_in_time(
    spatial: Callable[[np.ndarray], Tuple[np.ndarray, float, float]],
    taus: np.ndarray,
    cells: List[Tuple[float, float]],
    envelope: EnvelopeSpec,
    rho: float,
) -> Tuple[np.ndarray, np.ndarray, int, float, float]:
    """
    Cumulative (1/rho) integral of psi**3 times a spatial factor, with two rules.

    ``spatial`` maps slow-time nodes to (values, spatial error, tail bound).
    """
    rules = {}
    nodes_all = []
    for n in (NODOS, NODOS_CONTROL):
        x, w = _REGLAS[n]
        nodes, weights, owner = [], [], []
        for index, (a, b) in enumerate(cells):
            half = 0.5 * (b - a)
            nodes.append(0.5 * (a + b) + half * x)
            weights.append(half * w)
            owner.append(np.full(n, index))
        rules[n] = (np.concatenate(nodes), np.concatenate(weights), np.concatenate(owner))
        nodes_all.append(rules[n][0])
    tau_nodes = np.concatenate(nodes_all)
    s_values, s_error, tail = spatial(tau_nodes)
    split = rules[NODOS][0].size

    ends = np.array([b for _, b in cells])
    out = {}
    for n, chunk in ((NODOS, s_values[:split]), (NODOS_CONTROL, s_values[split:])):
        nodes, weights, owner = rules[n]
        contrib = weights * np.asarray(envelope.psi(nodes)) ** 3 * chunk / rho
        per_cell = np.bincount(owner, weights=contrib.real, minlength=len(cells)) + 1j * np.bincount(
            owner, weights=contrib.imag, minlength=len(cells)
        )
        cumulative = np.cumsum(per_cell)
        out[n] = np.array([cumulative[np.searchsorted(ends, t - 1e-14)] if t > cells[0][0] else 0.0 for t in taus])
    values = out[NODOS]
    error = np.abs(values - out[NODOS_CONTROL]) + s_error * np.maximum(taus - cells[0][0], 0.0) / rho
    return values, error, int(tau_nodes.size), tail, s_error


def quad_oracle(
    integrand: InteractionIntegrand,
    theta: float,
    tau_grid: Union[float, Sequence[float], np.ndarray],
    rho: float = 1.0,
    envelope: Optional[EnvelopeSpec] = None,
    tolerance: float = TOLERANCIA_ORACULO,
) -> OracleResult:
    """
    Ground-truth interaction integral (1/rho) int_0^tau psi**3 S(tau1 / theta) dtau1.

    Args:
        integrand: Phase and amplitude.
        theta: Dispersion parameter; the spatial oscillation is tau1 / theta.
        tau_grid: Slow times at which the cumulative integral is reported.
        rho: Slow-time scale of the 1/rho prefactor.
        envelope: Ramp psi; the default ramp when omitted.
        tolerance: Accepted error relative to max(1, |I|).

    Raises:
        ValidationException: theta or rho not positive, negative tau.
        ConvergenceException: Accuracy or tail bound not reached.
    """
    if theta <= 0.0:
        raise ValidationException(field="theta", value=theta, rule="theta > 0")
    if rho <= 0.0:
        raise ValidationException(field="rho", value=rho, rule="rho > 0")
    taus = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    if np.any(taus < 0.0):
        raise ValidationException(field="tau", value=float(np.min(taus)), rule="tau >= 0")
    envelope = envelope or EnvelopeSpec()
    if np.all(taus == 0.0):
        zeros = np.zeros(taus.size)
        return OracleResult(taus, zeros.astype(complex), zeros, 0.0, theta, rho, 0)

    support = find_support(integrand)
    frequency = 0.0 if support is None else phase_bound(integrand, support)
    cells = time_panels(taus, envelope, theta, frequency)

    def spatial(tau_nodes: np.ndarray) -> Tuple[np.ndarray, float, float]:
        result = spatial_integral(integrand, tau_nodes / theta, tolerance=tolerance)
        return result.values, result.error, result.tail_bound

    values, error, nodes, tail, _ = integrate_in_time(spatial, taus, cells, envelope, rho)
    scale = max(1.0, float(np.max(np.abs(values))))
    result = OracleResult(
        tau=taus,
        values=values,
        error=error,
        tail_bound=tail * float(np.max(taus)) / rho,
        theta=theta,
        rho=rho,
        nodes=nodes,
    )
    logger.info("Oráculo de cuadratura evaluado", extra={"label": integrand.label, **result.describe()})
    if float(np.max(error)) > tolerance * scale:
        raise ConvergenceException(
            operation="quad_oracle", residual=float(np.max(error)), tolerance=tolerance * scale,
        )
    return result
