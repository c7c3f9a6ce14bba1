"""
Split-step spectral integration of the envelope equations.

The linear part is applied exactly as the Fourier multiplier
exp(-i (L_s(xi) - Theta_s(xi)) dt), Theta being the part of the symbol
removed by the integration frame. Two schemes are offered:

* ``strang``: half linear step, a classical RK4 step of the nonlinear and
  source terms, half linear step (second order);
* ``ifrk4``: the integrating-factor (Lawson) RK4 scheme (fourth order), used
  where the nonlinear terms oscillate against the linear phases.
"""

from dataclasses import dataclass, replace
from math import ceil
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import NumericalException, PreconditionException, StepRejectedException, ValidationException

from .coeficientes import EnlsCoefficients, Monomial, alpha_pi
from .estado import EnvelopeGrid, EnvelopeState, Snapshot, frame_phase

if TYPE_CHECKING:
    from dominio.excitacion.envolvente import EnvelopeSpec

logger = get_logger(__name__)

Fields = Tuple[np.ndarray, ...]
Rhs = Callable[[float, Fields], Fields]

LIMITE_FASE = 0.1
PUNTOS_POR_ANCHO = 32
PASO_POR_DEFECTO = 0.5
METODOS = ("strang", "ifrk4")


@dataclass(frozen=True)
class OrderSpec:
    """Which terms of the hierarchy a run keeps."""

    nu: int = 2
    sigma: int = 0
    quintic: bool = False

    @classmethod
    def from_any(cls, value: Union["OrderSpec", Mapping[str, Any], None]) -> "OrderSpec":
        if value is None:
            return cls()
        if isinstance(value, OrderSpec):
            return value
        return cls(
            nu=int(value.get("nu", 2)),
            sigma=int(value.get("sigma", 0)),
            quintic=bool(value.get("quintic", False)),
        )


class LinearRampSource:
    """
    Source +rho psi0(rho t) Z0(t) of the ramped linear response.

    Z0 is the free evolution of the spectral data ``h_hat``:
    Z0_hat(xi, t) = exp(-i L_s(xi) t) H_s(xi). Spectra are returned in the lab frame.
    """

    def __init__(
        self,
        coeffs: EnlsCoefficients,
        grid: EnvelopeGrid,
        h_hat: Mapping[int, np.ndarray],
        envelope: "EnvelopeSpec",
        rho: float,
        nu: Optional[int] = None,
    ) -> None:
        self.grid = grid
        self.envelope = envelope
        self.rho = rho
        self.h_hat = {s: np.asarray(h_hat[s], dtype=complex) for s in (1, -1)}
        self.symbols = {s: coeffs.symbol(s, grid.xi, nu) for s in (1, -1)}

    def __call__(self, sign: int, t: float) -> Optional[np.ndarray]:
        ramp = float(self.envelope.psi0(self.rho * t))
        if ramp == 0.0:
            return None
        return self.rho * ramp * np.exp(-1j * self.symbols[sign] * t) * self.h_hat[sign]

    def linear_response(self, sign: int, t: float) -> np.ndarray:
        """Spectrum of the ramped linear response psi(rho t) Z0(t)."""
        return float(self.envelope.psi(self.rho * t)) * np.exp(-1j * self.symbols[sign] * t) * self.h_hat[sign]


SourceFn = Callable[[int, float], Optional[np.ndarray]]


class EnvelopeSolver:
    """
    Right-hand side and linear multipliers of one doublet's envelope system.

    Args:
        coeffs: Coefficient set.
        grid: Spatial grid.
        order: Terms kept (nu, sigma, quintic).
        frame: Integration frame.
        source: Optional lab-frame source spectra ``source(sign, t)``.
    """

    def __init__(
        self,
        coeffs: EnlsCoefficients,
        grid: EnvelopeGrid,
        order: OrderSpec,
        frame: str = "lab",
        source: Optional[SourceFn] = None,
    ) -> None:
        if order.nu > coeffs.nu or order.sigma > coeffs.sigma:
            raise PreconditionException(
                operation="integrate_enls", invariant="requested orders available in the coefficient set",
                context={"order": order.__dict__, "coeffs_nu": coeffs.nu, "coeffs_sigma": coeffs.sigma},
            )
        self.coeffs = coeffs
        self.grid = grid
        self.order = order
        self.frame = frame
        self.source = source
        xi = grid.xi
        self.theta = {s: frame_phase(coeffs.gammas, s, xi, frame) for s in (1, -1)}
        self.symbols = {s: coeffs.symbol(s, xi, order.nu) - self.theta[s] for s in (1, -1)}
        self.terms: Dict[int, List[Tuple[Monomial, complex]]] = {
            s: [(m, c) for m, c in coeffs.amplitudes[s].items() if sum(m) <= order.sigma and c != 0]
            for s in (1, -1)
        }
        self.quintic = {s: coeffs.delta5(s) if order.quintic else 0j for s in (1, -1)}

    def multipliers(self, dt: float) -> Fields:
        return tuple(np.exp(-1j * self.symbols[s] * dt) for s in (1, -1))

    def cubic(self, sign: int, za: np.ndarray, zb: np.ndarray) -> np.ndarray:
        """p_s[Z_s, Z_s, Z_-s] with spectral derivatives on the designated factors."""
        derived_a: Dict[int, np.ndarray] = {}
        derived_b: Dict[int, np.ndarray] = {}

        def d(cache: Dict[int, np.ndarray], z: np.ndarray, n: int) -> np.ndarray:
            if n not in cache:
                cache[n] = self.grid.derivative(z, n)
            return cache[n]

        total = np.zeros_like(za)
        for (a, b, c), coef in self.terms[sign]:
            total = total + coef * d(derived_a, za, a) * d(derived_a, za, b) * d(derived_b, zb, c)
        return total

    def nonlinear(self, fields: Fields) -> Fields:
        zp, zm = fields
        out = []
        for sign, za, zb in ((1, zp, zm), (-1, zm, zp)):
            term = self.coeffs.alpha_pi * self.cubic(sign, za, zb)
            if self.quintic[sign]:
                term = term + self.coeffs.alpha_pi**2 * self.quintic[sign] * za**3 * zb**2
            out.append(term)
        return tuple(out)

    def source_fields(self, t: float) -> Optional[Fields]:
        if self.source is None:
            return None
        spectra = []
        for sign in (1, -1):
            s_hat = self.source(sign, t)
            if s_hat is None:
                return None
            spectra.append(self.grid.inverse(np.exp(1j * self.theta[sign] * t) * s_hat))
        return tuple(spectra)

    def rhs(self, t: float, fields: Fields) -> Fields:
        result = self.nonlinear(fields)
        forcing = self.source_fields(t)
        if forcing is not None:
            result = tuple(r + f for r, f in zip(result, forcing))
        return result

    def phase_measure(self, fields: Fields) -> float:
        """Nonlinear phase rate bound used by the step criterion."""
        peak = max(float(np.max(np.abs(z))) for z in fields)
        rate = 0.0
        for sign in (1, -1):
            weight = sum(abs(c) for _, c in self.terms[sign])
            rate = max(rate, self.coeffs.alpha_pi * weight * peak**2 + self.coeffs.alpha_pi**2 * abs(self.quintic[sign]) * peak**4)
        return rate


def _combine(y: Fields, k: Fields, h: float) -> Fields:
    return tuple(a + h * b for a, b in zip(y, k))


def rk4_step(rhs: Rhs, t: float, y: Fields, h: float) -> Fields:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, _combine(y, k1, 0.5 * h))
    k3 = rhs(t + 0.5 * h, _combine(y, k2, 0.5 * h))
    k4 = rhs(t + h, _combine(y, k3, h))
    return tuple(v + h / 6.0 * (a + 2.0 * b + 2.0 * c + d) for v, a, b, c, d in zip(y, k1, k2, k3, k4))


def strang_step(rhs: Rhs, half: Fields, t: float, y: Fields, h: float) -> Fields:
    y = tuple(np.fft.ifft(m * np.fft.fft(v)) for m, v in zip(half, y))
    y = rk4_step(rhs, t, y, h)
    return tuple(np.fft.ifft(m * np.fft.fft(v)) for m, v in zip(half, y))


def lawson_step(rhs: Rhs, full: Fields, half: Fields, t: float, y: Fields, h: float) -> Fields:
    def n_hat(time: float, spectra: Fields) -> Fields:
        values = rhs(time, tuple(np.fft.ifft(s) for s in spectra))
        return tuple(np.fft.fft(v) for v in values)

    Y = tuple(np.fft.fft(v) for v in y)
    k1 = n_hat(t, Y)
    k2 = n_hat(t + 0.5 * h, tuple(e * (v + 0.5 * h * a) for e, v, a in zip(half, Y, k1)))
    k3 = n_hat(t + 0.5 * h, tuple(e * v + 0.5 * h * b for e, v, b in zip(half, Y, k2)))
    k4 = n_hat(t + h, tuple(E * v + h * e * c for E, e, v, c in zip(full, half, Y, k3)))
    out = tuple(
        E * v + h / 6.0 * (E * a + 2.0 * e * (b + c) + d)
        for E, e, v, a, b, c, d in zip(full, half, Y, k1, k2, k3, k4)
    )
    return tuple(np.fft.ifft(v) for v in out)


def march(
    rhs: Rhs,
    multipliers: Callable[[float], Fields],
    y: Fields,
    t0: float,
    t_end: float,
    dt: float,
    method: str = "strang",
    refinement: int = 1,
    snapshot_times: Sequence[float] = (),
    phase_rate: Optional[Callable[[Fields], float]] = None,
    phase_limit: float = LIMITE_FASE,
    operation: str = "integrate_enls",
    on_step: Optional[Callable[[float, Fields, float], None]] = None,
    progress_every: int = 1000,
) -> Tuple[Fields, List[Tuple[float, Fields]], Dict[str, Any]]:
    """
    Advance ``y`` from t0 to t_end, recording the fields at ``snapshot_times``.

    Each interval between consecutive record times is split into equal steps
    no longer than dt / refinement.

    Raises:
        StepRejectedException: Nonlinear phase per step above ``phase_limit``.
        NumericalException: Non-finite values.
    """
    if method not in METODOS:
        raise ValidationException(field="solver.method", value=method, rule="strang or ifrk4")
    if dt <= 0.0 or t_end < t0:
        raise ValidationException(field="solver.dt", value=dt, rule="dt > 0 and t_end >= t0")
    marks = sorted({float(t) for t in snapshot_times if t0 < t < t_end} | {float(t_end)})
    records: List[Tuple[float, Fields]] = []
    if any(abs(t - t0) < 1e-14 for t in snapshot_times):
        records.append((t0, y))
    t = t0
    steps = 0
    for mark in marks:
        span = mark - t
        if span <= 0.0:
            records.append((mark, y))
            continue
        n = max(1, int(ceil(span / dt - 1e-12))) * max(1, int(refinement))
        h = span / n
        half = multipliers(0.5 * h)
        full = multipliers(h) if method == "ifrk4" else None
        for i in range(n):
            if phase_rate is not None:
                measure = phase_rate(y) * h
                if measure > phase_limit:
                    raise StepRejectedException(operation=operation, step=h, measure=measure, limit=phase_limit)
            if method == "strang":
                y = strang_step(rhs, half, t, y, h)
            else:
                y = lawson_step(rhs, full, half, t, y, h)
            t = mark if i == n - 1 else t + h
            steps += 1
            if not all(np.all(np.isfinite(v)) for v in y):
                raise NumericalException(operation=operation, quantity="non-finite field", value=t)
            if on_step is not None:
                on_step(t, y, h)
            if progress_every and steps % progress_every == 0:
                logger.debug("Progreso de integración", extra={"operation": operation, "t": t, "steps": steps})
        t = mark
        records.append((mark, y))
    return y, records, {"steps": steps, "method": method, "refinement": refinement}


def _check_resolution(grid: EnvelopeGrid, beta: Optional[float]) -> None:
    if beta is None:
        return
    per_width = 1.0 / (beta * grid.dx)
    if per_width < PUNTOS_POR_ANCHO:
        raise PreconditionException(
            operation="integrate_enls",
            invariant=f"grid resolves the beta window (>= {PUNTOS_POR_ANCHO} points per envelope width)",
            context={"points_per_width": per_width, "beta": beta},
        )


def integrate_enls(
    coeffs: EnlsCoefficients,
    state: EnvelopeState,
    order_spec: Union[OrderSpec, Mapping[str, Any], None] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    rho: Optional[float] = None,
    t_end: float = 1.0,
    dt: float = PASO_POR_DEFECTO,
    method: str = "strang",
    source: Optional[SourceFn] = None,
    snapshot_times: Sequence[float] = (),
    refinement: int = 1,
    phase_limit: float = LIMITE_FASE,
    progress_every: int = 1000,
) -> EnvelopeState:
    """
    Integrate one doublet's envelope system from ``state`` up to fast time t_end.

    The run is carried out in ``state.frame``. ``alpha`` overrides the
    coefficient set's nonlinearity; ``beta`` enables the resolution check;
    ``rho`` is only echoed in the diagnostics.

    Returns:
        Final state, with the snapshots and diagnostics of the run.
    """
    order = OrderSpec.from_any(order_spec)
    if alpha is not None:
        coeffs = replace(coeffs, alpha_pi=alpha_pi(alpha))
    _check_resolution(state.grid, beta)
    state = replace(state, gammas=coeffs.gammas)
    solver = EnvelopeSolver(coeffs, state.grid, order, state.frame, source)
    norm0 = state.norm(1)
    defect = {"max": 0.0}

    def watch(t: float, y: Fields, h: float) -> None:
        defect["max"] = max(defect["max"], float(np.max(np.abs(y[1] - np.conj(y[0])))))

    logger.debug(
        "Iniciando integración de envolvente",
        extra={"nu": order.nu, "sigma": order.sigma, "quintic": order.quintic, "t_end": t_end, "method": method},
    )
    y, records, info = march(
        solver.rhs,
        solver.multipliers,
        (state.z_plus, state.z_minus),
        state.t,
        t_end,
        dt,
        method=method,
        refinement=refinement,
        snapshot_times=snapshot_times,
        phase_rate=solver.phase_measure,
        phase_limit=phase_limit,
        on_step=watch,
        progress_every=progress_every,
    )
    final = replace(state, z_plus=y[0], z_minus=y[1], t=float(t_end))
    diagnostics = dict(info)
    norm1 = final.norm(1)
    diagnostics.update(
        {
            "norm_initial": norm0,
            "norm_final": norm1,
            "norm_drift": abs(norm1 - norm0) / norm0 if norm0 else 0.0,
            "conjugation_defect": defect["max"],
            "beta": beta,
            "rho": rho,
        }
    )
    if order.quintic:
        diagnostics["rational_residual"] = rational_form_residual(coeffs, final)
    snapshots = tuple(Snapshot(t, f[0], f[1]) for t, f in records if t in set(map(float, snapshot_times)))
    return replace(final, snapshots=snapshots, diagnostics=diagnostics)


def rational_form_residual(coeffs: EnlsCoefficients, state: EnvelopeState) -> float:
    """
    Gap between the time-derivative form solved exactly and its quintic reduction.

    The time-derivative form is linear in D_s = (d/dt + i L_s) Z_s:

        D_s (1 + a delta1_s Z_s Z_-s) + a delta2_s Z_s**2 D_-s = a p_s + a**2 Q5_s Z_s**3 Z_-s**2,

    with a = alpha_pi; the reduction replaces it by a p_s + a**2 delta5_s Z_s**3 Z_-s**2.
    """
    solver = EnvelopeSolver(coeffs, state.grid, OrderSpec(coeffs.nu, coeffs.sigma, True), state.frame)
    zp, zm = state.z_plus, state.z_minus
    a = coeffs.alpha_pi
    rhs = {
        1: a * solver.cubic(1, zp, zm) + a**2 * coeffs.q5[1] * zp**3 * zm**2,
        -1: a * solver.cubic(-1, zm, zp) + a**2 * coeffs.q5[-1] * zm**3 * zp**2,
    }
    m11 = 1.0 + a * coeffs.delta1[1] * zp * zm
    m12 = a * coeffs.delta2[1] * zp**2
    m21 = a * coeffs.delta2[-1] * zm**2
    m22 = 1.0 + a * coeffs.delta1[-1] * zm * zp
    det = m11 * m22 - m12 * m21
    exact_plus = (m22 * rhs[1] - m12 * rhs[-1]) / det
    reduced_plus = solver.nonlinear((zp, zm))[0]
    return float(np.max(np.abs(exact_plus - reduced_plus)))
