"""
Truncated modal reference solver.

The modal amplitudes U_{s,n}(k, t) of the kept modes obey

    dU_{s,n}/dt = -i s omega_n(k) U_{s,n} + alpha (2 pi)**2 sum Q U U U - J_{s,n},

the sum running over ordered origin triples with k1 + k2 + k3 = k (mod 2 pi).
A factorized susceptibility gives every origin slot its own weight, so the
triple sum is the cube of one site-space field and costs a few FFTs. The slow
amplitudes u = exp(i s omega t) U are integrated by RK4 as u = psi(rho t) W + v,
the ramped linear response psi W being exact and v carrying the nonlinear part.
"""

from dataclasses import dataclass, field
from math import ceil
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.enls.coeficientes import alpha_pi
from dominio.enls.integrador import LIMITE_FASE, rk4_step
from dominio.exceptions import NumericalException, PreconditionException, StepRejectedException, ValidationException
from dominio.excitacion.corriente import DoubletExcitation, window_profile, wrap_zone
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.jet import jet_at
from dominio.modelo.susceptibilidad import SyntheticSusceptibility
from dominio.rectificacion.rectificador import RectifyMap

logger = get_logger(__name__)

Mode = Tuple[int, int]

PUNTOS_POR_BETA = 8.0
PUNTOS_MINIMOS = 512
SITIOS_POR_BETA = 20.0
FRACCION_FASE = 1.0
# tasa no lineal inicial máxima, como fracción de la frecuencia portadora
FRACCION_NO_LINEAL = 0.3
UMBRAL_ALIAS = 1e-10
BORDE_ALIAS = 0.375
PASO_MODAL = 0.1
NUCLEOS = ("full", "fm")
VENTANA_TERCER_ARMONICO = 3.0


def default_modes(model: DispersionModel, n0: int) -> Tuple[Mode, ...]:
    """(+-, n0) and (+-, n0 + 1) when the model has the extra band."""
    bands = [n0] + ([n0 + 1] if model.n_bands > n0 else [])
    return tuple((s, n) for n in bands for s in (1, -1))


def reference_grid(beta: float, velocity: float = 0.0, t_end: float = 0.0, n_min: int = PUNTOS_MINIMOS) -> np.ndarray:
    """
    Uniform grid on [-pi, pi) resolving the beta window.

    N is the smallest power of two with at least 8 points per beta and a
    site-space ring long enough for the pulse to travel |velocity| * t_end
    without reaching the antipode.
    """
    if beta <= 0.0:
        raise ValidationException(field="reference.beta", value=beta, rule="beta > 0")
    needed = max(
        float(n_min),
        2.0 * np.pi * PUNTOS_POR_BETA / beta,
        2.0 * (abs(velocity) * t_end + SITIOS_POR_BETA / beta) / BORDE_ALIAS,
    )
    n = 1 << (int(ceil(needed)) - 1).bit_length()
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def matched_source_data(
    exc: DoubletExcitation,
    reference_rect: RectifyMap,
    rect: RectifyMap,
    sign: int,
    xi: Any,
) -> np.ndarray:
    """
    Envelope data H_s(xi) = W_s(s k_star + Y_s(xi)) of a run with map ``rect``.

    W_s is the modal window profile built with ``reference_rect``; with these
    data every envelope run is driven by exactly the reference current.
    """
    xi = np.asarray(xi, dtype=float)
    values = np.zeros(xi.shape, dtype=complex)
    inside = np.abs(xi) <= exc.pi0
    if inside.any():
        k = sign * exc.k_star + rect.signed_forward(sign, xi[inside])
        values[inside] = window_profile(exc, reference_rect, sign, k)
    return values


@dataclass(frozen=True)
class ModalField:
    """
    Slow modal amplitudes u_{s,n}(k, t) = exp(i s omega_n(k) t) U_{s,n}(k, t).

    Attributes:
        modes: Kept (sign, band) pairs.
        k_grid: Uniform quasimomentum grid on [-pi, pi).
        times: Fast record times.
        u: Per mode, array (len(times), len(k_grid)).
        phases: Per mode, s * omega_n(k) on the grid.
        rho: Slow-time scale.
        k_star: Carrier of the excited doublet.
        n0: Band of the excited doublet.
        pi0: Half-width of the direct windows.
        scale: l2 norm of the linear response after the ramp.
        diagnostics: Run diagnostics.
    """

    modes: Tuple[Mode, ...]
    k_grid: np.ndarray
    times: np.ndarray
    u: Dict[Mode, np.ndarray]
    phases: Dict[Mode, np.ndarray]
    rho: float
    k_star: float
    n0: int
    pi0: float
    scale: float = 1.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.k_grid.size

    @property
    def taus(self) -> np.ndarray:
        return self.rho * self.times

    def lab(self, mode: Mode, index: int) -> np.ndarray:
        """Lab-frame amplitude U at record ``index``."""
        return np.exp(-1j * self.phases[mode] * self.times[index]) * self.u[mode][index]

    def direct_mask(self, mode: Mode) -> np.ndarray:
        """Direct window |k - s k_star| < pi0 of the excited band."""
        sign, band = mode
        if band != self.n0:
            return np.zeros(self.k_grid.size, dtype=bool)
        return np.abs(wrap_zone(self.k_grid - sign * self.k_star)) < self.pi0

    def harmonic_mask(self, mode: Mode, radius: Optional[float] = None) -> np.ndarray:
        """Third-harmonic window around 3 s k_star (any band)."""
        radius = VENTANA_TERCER_ARMONICO * self.pi0 if radius is None else radius
        return np.abs(wrap_zone(self.k_grid - 3.0 * mode[0] * self.k_star)) < radius

    def norm(self, index: int, masks: Optional[Mapping[Mode, np.ndarray]] = None) -> float:
        """Weighted l2 norm sqrt(dk sum |u|**2) over the masked entries."""
        total = 0.0
        for mode in self.modes:
            values = self.u[mode][index]
            if masks is not None:
                values = values[masks[mode]]
            total += float(np.sum(np.abs(values) ** 2))
        return float(np.sqrt(self.dk * total))

    def reality_defect(self) -> float:
        """max |u_{-s,n}(-k) - conj(u_{s,n}(k))| over the record."""
        mirror = (-np.arange(self.k_grid.size)) % self.k_grid.size
        defect = 0.0
        for sign, band in self.modes:
            if sign < 0 or (-sign, band) not in self.u:
                continue
            plus, minus = self.u[(sign, band)], self.u[(-sign, band)]
            defect = max(defect, float(np.max(np.abs(minus[:, mirror] - np.conj(plus)))))
        return defect

    def describe(self) -> Dict[str, Any]:
        return {
            "modes": [list(m) for m in self.modes],
            "N": int(self.k_grid.size),
            "rho": self.rho,
            "k_star": self.k_star,
            "n0": self.n0,
            "records": int(self.times.size),
            "scale": self.scale,
            **self.diagnostics,
        }


def to_sites(values: np.ndarray) -> np.ndarray:
    return np.fft.ifft(values) * values.size


def from_sites(sites: np.ndarray) -> np.ndarray:
    return np.fft.fft(sites) / sites.size


class ModalSystem:
    """
    Right-hand side of the slow nonlinear part v of the modal amplitudes.

    Args:
        model: Dispersion model with a factorized susceptibility.
        modes: Kept modes.
        k: Quasimomentum grid.
        window: Per mode, the ramped linear response profile W.
        exc: Excitation (ramp and rho).
        alpha: Nonlinearity strength.
        n1: Time-harmonic truncation order (0 or 1).
        kernel: ``full`` keeps every origin triple, ``fm`` only the
            frequency-matched ones of each end band.
        linearized: Evaluate the nonlinearity on the linear response only.
    """

    def __init__(
        self,
        model: DispersionModel,
        modes: Sequence[Mode],
        k: np.ndarray,
        window: Mapping[Mode, np.ndarray],
        exc: DoubletExcitation,
        alpha: float,
        n1: int = 0,
        kernel: str = "full",
        linearized: bool = False,
    ) -> None:
        provider = model.susceptibility
        if not isinstance(provider, SyntheticSusceptibility) or not provider.factorized:
            raise PreconditionException(
                operation="integrate_modal_nlm", invariant="factorized susceptibility (synthetic provider)",
                context={"provider": provider.describe()},
            )
        self.modes = tuple(modes)
        self.window = dict(window)
        self.exc = exc
        self.n1 = n1
        self.kernel = kernel
        self.linearized = linearized
        self.dk = 2.0 * np.pi / k.size
        self.cubic = alpha * (2.0 * np.pi) ** 2 * self.dk**2
        self.quintic = alpha_pi(alpha) ** 2 * self.dk**4
        self.phases = {m: model.signed_omega(m[0], m[1], k) for m in self.modes}
        self.slot = {m: provider.slot_weight(k, self.phases[m]) for m in self.modes}
        self.memory = (
            {m: provider.slot_memory_weight(k, self.phases[m]) for m in self.modes}
            if n1 and not provider.kernel.instantaneous else None
        )
        self.end = {m: provider.end_weight(m[0], k) for m in self.modes}
        self.end5 = {m: provider.coupling5(m[0]) * provider.weight(k) for m in self.modes}
        self.plain = {m: provider.weight(k) for m in self.modes}
        self.has_quintic = provider.q5_plus != 0
        self.coupling = max(abs(provider.q_plus), 1e-300)
        self.alpha_pi = alpha_pi(alpha)

    def linear(self, mode: Mode, t: float) -> np.ndarray:
        return float(self.exc.envelope.psi(self.exc.rho * t)) * self.window[mode]

    def _sites(self, weights: Mapping[Mode, np.ndarray], amplitudes: Mapping[Mode, np.ndarray], t: float) -> Dict[Mode, np.ndarray]:
        return {m: to_sites(weights[m] * np.exp(-1j * self.phases[m] * t) * amplitudes[m]) for m in self.modes}

    def _products(
        self,
        x: Mapping[Mode, np.ndarray],
        dx: Optional[Mapping[Mode, np.ndarray]],
        mode: Mode,
        power: int,
        total: Optional[np.ndarray],
    ) -> np.ndarray:
        """Site-space sum of the ordered origin products feeding ``mode``."""
        if self.kernel == "full":
            value = total**power
            if dx is not None:
                value = value + power * total ** (power - 1) * sum(dx.values())
            return value
        sign, band = mode
        same, other = x.get((sign, band)), x.get((-sign, band))
        if same is None or other is None:
            return np.zeros(next(iter(x.values())).shape, dtype=complex)
        if power == 3:
            value = 3.0 * same**2 * other
            if dx is not None:
                value = value + 3.0 * (2.0 * same * dx[(sign, band)] * other + same**2 * dx[(-sign, band)])
            return value
        return 10.0 * same**3 * other**2

    def nonlinear(self, t: float, amplitudes: Mapping[Mode, np.ndarray], derivatives: Optional[Mapping[Mode, np.ndarray]] = None) -> Dict[Mode, np.ndarray]:
        """Rotating-frame nonlinear term of every mode."""
        x = self._sites(self.slot, amplitudes, t)
        total = sum(x.values())
        dx = self._sites(self.memory, derivatives, t) if derivatives is not None and self.memory is not None else None
        x5 = self._sites(self.plain, amplitudes, t) if self.has_quintic else None
        total5 = sum(x5.values()) if x5 is not None else None
        out = {}
        for m in self.modes:
            term = self.cubic * self.end[m] * from_sites(self._products(x, dx, m, 3, total))
            if x5 is not None:
                term = term + self.quintic * self.end5[m] * from_sites(self._products(x5, None, m, 5, total5))
            out[m] = np.exp(1j * self.phases[m] * t) * term
        return out

    def rhs(self, t: float, fields: Tuple[np.ndarray, ...]) -> Tuple[np.ndarray, ...]:
        linear = {m: self.linear(m, t) for m in self.modes}
        amplitudes = linear if self.linearized else {m: linear[m] + v for m, v in zip(self.modes, fields)}
        first = self.nonlinear(t, amplitudes)
        if self.memory is None:
            return tuple(first[m] for m in self.modes)
        ramp = self.exc.rho * float(self.exc.envelope.psi0(self.exc.rho * t))
        derivatives = {m: ramp * self.window[m] + (0.0 if self.linearized else first[m]) for m in self.modes}
        corrected = self.nonlinear(t, amplitudes, derivatives)
        return tuple(corrected[m] for m in self.modes)

    def phase_measure(self, t: float, fields: Tuple[np.ndarray, ...]) -> float:
        """Nonlinear phase rate alpha_pi |q| |Z|**2 with Z the site-space field."""
        amplitudes = {m: self.linear(m, t) + (0.0 if self.linearized else v) for m, v in zip(self.modes, fields)}
        peak = max(float(np.max(np.abs(to_sites(amplitudes[m])))) for m in self.modes) * self.dk
        return self.alpha_pi * self.coupling * peak**2

    def edge_fraction(self, t: float, fields: Tuple[np.ndarray, ...]) -> float:
        """Share of the site-space energy carried by the nonlinear part in the outer part of the ring.

        The linear part is exact in k and is only counted in the total.
        """
        n = self.phases[self.modes[0]].size
        r = np.fft.fftfreq(n, d=1.0 / n)
        edge = np.abs(r) >= BORDE_ALIAS * n
        worst = 0.0
        for m, v in zip(self.modes, fields):
            turn = np.exp(-1j * self.phases[m] * t)
            energy = float(np.sum(np.abs(to_sites(turn * (self.linear(m, t) + v))) ** 2))
            if energy > 0.0:
                worst = max(worst, float(np.sum(np.abs(to_sites(turn * v)[edge]) ** 2)) / energy)
        return worst


def _record_times(exc: DoubletExcitation, t_end: float, record_taus: Optional[Iterable[float]]) -> List[float]:
    if record_taus is None:
        start = min(exc.envelope.tau0, exc.rho * t_end)
        record_taus = np.linspace(start, exc.rho * t_end, 5)
    times = sorted({float(tau) / exc.rho for tau in record_taus if 0.0 <= tau / exc.rho <= t_end + 1e-9})
    if not times:
        raise ValidationException(field="reference.record_taus", value=list(record_taus), rule="record times inside [0, t_end]")
    return times


def integrate_modal_nlm(
    model: DispersionModel,
    excitation: DoubletExcitation,
    alpha: Optional[float] = None,
    rho: Optional[float] = None,
    bands: Optional[Sequence[Mode]] = None,
    k_grid: Optional[np.ndarray] = None,
    t_end: Optional[float] = None,
    n1: int = 0,
    kernel: str = "full",
    rect: Optional[RectifyMap] = None,
    record_taus: Optional[Iterable[float]] = None,
    dt: float = PASO_MODAL,
    linearized: bool = False,
    phase_limit: float = LIMITE_FASE,
    alias_limit: float = UMBRAL_ALIAS,
    progress_every: int = 1000,
    refinement: int = 1,
    companions: Sequence[DoubletExcitation] = (),
) -> ModalField:
    """
    Integrate the truncated modal system driven by the doublet current.

    Args:
        model: Dispersion model with a factorized susceptibility.
        excitation: Doublet excitation (profile, ramp, carrier, scales).
        alpha: Overrides the excitation's nonlinearity.
        rho: Overrides the excitation's slow-time scale.
        bands: Kept (sign, band) modes; (+-, n0), (+-, n0 + 1) by default.
        k_grid: Uniform grid on [-pi, pi); chosen from beta when omitted.
        t_end: Final fast time; tau_star / rho with tau_star = 1 by default.
        n1: Time-harmonic truncation order, 0 or 1.
        kernel: ``full`` or ``fm`` (frequency-matched triples only).
        rect: Map defining the current window; order 4 at the carrier by default.
        record_taus: Slow times to record; five points on [tau0, tau_star] by default.
        dt: Largest step.
        linearized: Compute the first nonlinear response per unit alpha instead.
        refinement: Divides every step; used by the step-halving recovery.
        companions: Further doublets of band n0 sharing the ramp and rho; their
            windows add to the current.

    Raises:
        PreconditionException: Missing extra band, unresolved window, bad kernel,
            coupling past the softening threshold of the carrier.
        StepRejectedException: Nonlinear phase per step above ``phase_limit``.
        NumericalException: Non-finite values or aliasing across the ring.
    """
    exc = excitation.with_scales(
        **{k: v for k, v in (("alpha", alpha), ("rho", rho)) if v is not None}
    )
    modes = tuple(bands) if bands is not None else default_modes(model, exc.n0)
    if (1, exc.n0) not in modes or (-1, exc.n0) not in modes or len({n for _, n in modes}) < 2:
        raise PreconditionException(
            operation="integrate_modal_nlm", invariant="modes include (+-, n0) and at least one extra band",
            context={"modes": [list(m) for m in modes], "n0": exc.n0},
        )
    if n1 not in (0, 1):
        raise ValidationException(field="reference.n1", value=n1, rule="N1 in {0, 1}")
    if kernel not in NUCLEOS:
        raise ValidationException(field="reference.kernel", value=kernel, rule="known kernel", expected=", ".join(NUCLEOS))
    jet = rect.jet if rect is not None else jet_at(model, exc.n0, exc.k_star)
    rect = rect or RectifyMap(model, jet, 4, domain_radius=exc.pi0)
    t_end = 1.0 / exc.rho if t_end is None else float(t_end)
    k = reference_grid(exc.beta, jet.velocity, t_end) if k_grid is None else np.asarray(k_grid, dtype=float)
    dk = 2.0 * np.pi / k.size
    if dk > exc.beta / PUNTOS_POR_BETA * (1.0 + 1e-9) or abs(k[0] + np.pi) > 1e-12:
        raise PreconditionException(
            operation="integrate_modal_nlm", invariant="uniform grid on [-pi, pi) with >= 8 points per beta",
            context={"N": int(k.size), "beta": exc.beta},
        )

    window = {m: (window_profile(exc, rect, m[0], k) if m[1] == exc.n0 else np.zeros(k.size, complex)) for m in modes}
    for other in companions:
        other = other.with_scales(alpha=exc.alpha, rho=exc.rho)
        if other.n0 != exc.n0:
            raise PreconditionException(
                operation="integrate_modal_nlm", invariant="companion doublets share band n0",
                context={"n0": exc.n0, "companion": other.n0},
            )
        other_rect = RectifyMap(model, jet_at(model, other.n0, other.k_star), 4, domain_radius=other.pi0)
        for m in modes:
            if m[1] == exc.n0:
                window[m] = window[m] + window_profile(other, other_rect, m[0], k)
    strength = 1.0 if linearized else exc.alpha
    system = ModalSystem(model, modes, k, window, exc, strength, n1, kernel, linearized)
    phi_max = max(float(np.max(np.abs(p))) for p in system.phases.values())
    h_max = min(dt, FRACCION_FASE / (4.0 * phi_max))
    ramped = tuple(np.zeros(k.size, dtype=complex) for _ in modes)
    full_rate = 0.0 if linearized else system.phase_measure(exc.envelope.tau0 / exc.rho, ramped)
    carrier = abs(float(model.omega(exc.n0, exc.k_star)))
    if full_rate > FRACCION_NO_LINEAL * carrier:
        raise PreconditionException(
            operation="integrate_modal_nlm",
            invariant="nonlinear rate alpha_pi |q| max|Z|**2 of the ramped response below 0.3 omega_n0(k_star)",
            context={"rate": full_rate, "omega": carrier, "alpha": exc.alpha, "alpha_pi": alpha_pi(exc.alpha)},
            recovery_suggestion="Reduzca alpha (scaling.c_alpha) o la amplitud de excitation.h",
        )
    if full_rate > 0.0:
        h_max = min(h_max, 0.5 * phase_limit / full_rate)
    h_max /= max(1, int(refinement))
    times = _record_times(exc, t_end, record_taus)

    y: Tuple[np.ndarray, ...] = tuple(np.zeros(k.size, dtype=complex) for _ in modes)
    records: List[Tuple[np.ndarray, ...]] = []
    t, steps, worst_edge = 0.0, 0, 0.0
    logger.info(
        "Iniciando solución modal de referencia",
        extra={"N": int(k.size), "modes": len(modes), "alpha": exc.alpha, "rho": exc.rho, "n1": n1, "kernel": kernel},
    )
    for mark in times:
        span = mark - t
        n = max(1, int(ceil(span / h_max - 1e-12))) if span > 0.0 else 0
        h = span / n if n else 0.0
        for i in range(n):
            if strength:
                measure = 0.0 if linearized else system.phase_measure(t, y) * h
                if measure > phase_limit:
                    raise StepRejectedException(operation="integrate_modal_nlm", step=h, measure=measure, limit=phase_limit)
                y = rk4_step(system.rhs, t, y, h)
            t = mark if i == n - 1 else t + h
            steps += 1
            if not all(np.all(np.isfinite(v)) for v in y):
                raise NumericalException(operation="integrate_modal_nlm", quantity="non-finite amplitude", value=t)
            if progress_every and steps % progress_every == 0:
                logger.debug("Progreso modal", extra={"t": t, "steps": steps})
        edge = system.edge_fraction(mark, y)
        worst_edge = max(worst_edge, edge)
        if edge > alias_limit:
            raise NumericalException(operation="integrate_modal_nlm", quantity="aliasing (energy at the ring edge)", value=edge)
        records.append(tuple(system.linear(m, mark) * (0.0 if linearized else 1.0) + v for m, v in zip(modes, y)))

    u = {m: np.vstack([r[i] for r in records]) for i, m in enumerate(modes)}
    scale = float(np.sqrt(dk * sum(float(np.sum(np.abs(w) ** 2)) for w in window.values())))
    diagnostics = {"steps": steps, "step": h_max, "edge_fraction": worst_edge, "n1": n1, "kernel": kernel, "linearized": linearized,
                   "companions": len(companions)}
    result = ModalField(
        modes=modes,
        k_grid=k,
        times=np.asarray(times),
        u=u,
        phases=system.phases,
        rho=exc.rho,
        k_star=exc.k_star,
        n0=exc.n0,
        pi0=exc.pi0,
        scale=scale,
        diagnostics=diagnostics,
    )
    result.diagnostics["reality_defect"] = result.reality_defect()
    logger.info("Solución modal completada", extra={"steps": steps, "reality_defect": result.diagnostics["reality_defect"]})
    return result


def modal_fnlr(model: DispersionModel, excitation: DoubletExcitation, **options: Any) -> ModalField:
    """First nonlinear response per unit alpha: the modal system linearized about psi W."""
    return integrate_modal_nlm(model, excitation, linearized=True, **options)
