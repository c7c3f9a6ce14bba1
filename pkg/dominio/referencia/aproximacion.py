"""
Approximate modal solution assembled from envelope runs, and its error
against the modal reference.

The directly excited part maps the envelope spectra through the rectifying
map, U_{s,n0}(s k_star + eta) = Z_hat_s(Y_s^{-1}(eta)); every other mode gets
alpha times its time-harmonic first nonlinear response.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.enls.estado import EnvelopeGrid, EnvelopeState, Snapshot
from dominio.exceptions import PreconditionException, ValidationException
from dominio.excitacion.corriente import wrap_zone
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.susceptibilidad import SyntheticSusceptibility
from dominio.rectificacion.rectificador import RectifyMap

from .modal import Mode, ModalField, from_sites, to_sites

logger = get_logger(__name__)

RESONANCIA_MINIMA = 0.05
TOLERANCIA_TIEMPO = 1e-9


@dataclass(frozen=True)
class ApproxSolution:
    """
    Slow modal amplitudes of the approximate solution U_Z on the reference grid.

    Attributes:
        modes: Modes covered, as in the reference.
        k_grid: Quasimomentum grid.
        times: Record times.
        direct: Per mode, directly excited amplitudes (zero outside the windows).
        indirect: Per mode, indirectly excited amplitudes (zero inside the windows).
        phases: Per mode, s * omega_n(k).
        k_star: Carrier of the excited doublet.
        n0: Excited band.
        alpha: Nonlinearity strength of the runs.
        grid: Envelope grid of the runs (None when built from modal data).
        snapshots: Envelope fields at the record times, lab frame.
        sigma_g: Reconstruction order used by ``reconstruct_space``.
        diagnostics: Assembly diagnostics (indirect ratio, resonant entries).
    """

    modes: Tuple[Mode, ...]
    k_grid: np.ndarray
    times: np.ndarray
    direct: Dict[Mode, np.ndarray]
    indirect: Dict[Mode, np.ndarray]
    phases: Dict[Mode, np.ndarray]
    k_star: float
    n0: int
    alpha: float = 0.0
    grid: Optional[EnvelopeGrid] = None
    snapshots: Tuple[Snapshot, ...] = ()
    sigma_g: int = 0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def total(self, mode: Mode) -> np.ndarray:
        return self.direct[mode] + self.indirect[mode]

    def indirect_ratio(self) -> float:
        """sup over records of ||indirect|| / ||direct||."""
        worst = 0.0
        for i in range(self.times.size):
            direct = sum(float(np.sum(np.abs(self.direct[m][i]) ** 2)) for m in self.modes)
            indirect = sum(float(np.sum(np.abs(self.indirect[m][i]) ** 2)) for m in self.modes)
            if direct > 0.0:
                worst = max(worst, float(np.sqrt(indirect / direct)))
        return worst

    @classmethod
    def from_modal(cls, reference: ModalField) -> "ApproxSolution":
        """Split a modal field into its direct-window and indirect parts."""
        direct, indirect = {}, {}
        for m in reference.modes:
            mask = reference.direct_mask(m)
            direct[m] = np.where(mask, reference.u[m], 0.0)
            indirect[m] = np.where(mask, 0.0, reference.u[m])
        return cls(
            modes=reference.modes, k_grid=reference.k_grid, times=reference.times, direct=direct,
            indirect=indirect, phases=reference.phases, k_star=reference.k_star, n0=reference.n0,
        )


def _snapshot_at(run: EnvelopeState, t: float) -> Snapshot:
    candidates = list(run.snapshots) + [Snapshot(run.t, run.z_plus, run.z_minus)]
    for snap in candidates:
        if abs(snap.t - t) <= TOLERANCIA_TIEMPO * max(1.0, abs(t)):
            return snap
    raise PreconditionException(
        operation="assemble_uz", invariant="envelope snapshots at every reference record time",
        context={"missing_t": t, "available": [s.t for s in candidates]},
    )


def _lab_snapshot(run: EnvelopeState, snap: Snapshot) -> Snapshot:
    if run.frame == "lab":
        return snap
    lab = replace(run, z_plus=snap.z_plus, z_minus=snap.z_minus, t=snap.t, snapshots=()).in_frame("lab")
    return Snapshot(snap.t, lab.z_plus, lab.z_minus)


def _check_windows(run: EnvelopeState, rect: RectifyMap, reference: ModalField) -> None:
    if abs(rect.jet.k_star - reference.k_star) > 1e-12 or rect.jet.n0 != reference.n0:
        raise PreconditionException(
            operation="assemble_uz", invariant="rectifying map built at the reference carrier",
            context={"k_star": reference.k_star, "map_k_star": rect.jet.k_star},
        )
    nyquist = np.pi / run.grid.dx
    if nyquist < reference.pi0 or 2.0 * np.pi / run.grid.length > reference.pi0:
        raise PreconditionException(
            operation="assemble_uz", invariant="envelope grid covers and resolves the modal windows",
            context={"nyquist": nyquist, "dxi": 2.0 * np.pi / run.grid.length, "pi0": reference.pi0},
        )


def quasi_static_response(
    model: DispersionModel,
    reference: ModalField,
    direct_lab: Mapping[Mode, np.ndarray],
    alpha: float,
    omega0: float,
    margin: float = RESONANCIA_MINIMA,
) -> Tuple[Dict[Mode, np.ndarray], int]:
    """
    Time-harmonic first nonlinear response of every mode outside the windows.

    The forcing of the origin sign pattern with total sign m oscillates at
    m * omega0; the mode follows it as F_m / (i (s omega_n(k) - m omega0)).
    Entries whose detuning is below ``margin`` are left at zero and counted.
    The frequency-matched pattern (m = s) of the excited band is the
    envelope's own forcing and never enters the indirect part.

    Returns:
        Lab-frame amplitudes per mode and the number of skipped resonant entries.
    """
    provider = model.susceptibility
    if not isinstance(provider, SyntheticSusceptibility):
        raise PreconditionException(operation="assemble_uz", invariant="factorized susceptibility (synthetic provider)")
    k = reference.k_grid
    dk = reference.dk
    n0 = reference.n0
    x = {
        s: to_sites(provider.slot_weight(k, reference.phases[(s, n0)]) * direct_lab[(s, n0)])
        for s in (1, -1)
    }
    patterns = {
        3: x[1] ** 3,
        1: 3.0 * x[1] ** 2 * x[-1],
        -1: 3.0 * x[1] * x[-1] ** 2,
        -3: x[-1] ** 3,
    }
    transforms = {m: from_sites(p) for m, p in patterns.items()}
    strength = alpha * (2.0 * np.pi) ** 2 * dk**2
    out: Dict[Mode, np.ndarray] = {}
    skipped = 0
    for mode in reference.modes:
        outside = ~reference.direct_mask(mode)
        end = strength * provider.end_weight(mode[0], k)
        total = np.zeros(k.size, dtype=complex)
        for m, forcing in transforms.items():
            if mode[1] == n0 and m == mode[0]:
                continue
            detuning = reference.phases[mode] - m * omega0
            keep = outside & (np.abs(detuning) >= margin)
            floor = 1e-12 * float(np.max(np.abs(forcing))) if forcing.size else 0.0
            skipped += int(np.count_nonzero(outside & ~keep & (np.abs(forcing) > floor)))
            total[keep] += end[keep] * forcing[keep] / (1j * detuning[keep])
        out[mode] = total
    return out, skipped


def assemble_uz(
    runs: EnvelopeState,
    rect: RectifyMap,
    reference: ModalField,
    model: Optional[DispersionModel] = None,
    alpha: float = 0.0,
    fnlr: Optional[ModalField] = None,
    identity: bool = False,
    sigma_g: int = 0,
) -> ApproxSolution:
    """
    Approximate solution on the reference grid and record times.

    Args:
        runs: Envelope run carrying snapshots at the reference record times.
        rect: Rectifying map of the run.
        reference: Modal field fixing the grid, modes, windows and times.
        model: Dispersion model; needed for the time-harmonic indirect part.
        alpha: Nonlinearity strength of the run.
        fnlr: Modal first nonlinear response per unit alpha; replaces the
            time-harmonic estimate of the indirect part when given.
        identity: Sample Z_hat directly at eta (identity rectifying map).
        sigma_g: Space reconstruction order carried to ``reconstruct_space``.

    Raises:
        PreconditionException: Window mismatch between envelope and modal grids.
    """
    _check_windows(runs, rect, reference)
    if fnlr is not None and (fnlr.k_grid.size != reference.k_grid.size or fnlr.times.size != reference.times.size):
        raise PreconditionException(operation="assemble_uz", invariant="first nonlinear response on the reference grid")
    k = reference.k_grid
    n_t = reference.times.size
    direct = {m: np.zeros((n_t, k.size), dtype=complex) for m in reference.modes}
    indirect = {m: np.zeros((n_t, k.size), dtype=complex) for m in reference.modes}
    snapshots = []
    skipped = 0
    for i, t in enumerate(reference.times):
        snap = _snapshot_at(runs, float(t))
        snapshots.append(_lab_snapshot(runs, snap))
        lab = {}
        for s in (1, -1):
            mode = (s, reference.n0)
            mask = reference.direct_mask(mode)
            eta = wrap_zone(k[mask] - s * reference.k_star)
            xi = eta if identity else rect.signed_inverse(s, eta)
            values = np.zeros(k.size, dtype=complex)
            values[mask] = runs.spectrum_at(s, xi, frame="lab", snapshot=snap)
            lab[mode] = values
            direct[mode][i] = np.exp(1j * reference.phases[mode] * t) * values
        if alpha == 0.0:
            continue
        if fnlr is not None:
            for m in reference.modes:
                indirect[m][i] = np.where(reference.direct_mask(m), 0.0, alpha * fnlr.u[m][i])
            continue
        if model is None:
            raise PreconditionException(operation="assemble_uz", invariant="dispersion model for the time-harmonic indirect part")
        response, count = quasi_static_response(model, reference, lab, alpha, rect.jet.omega)
        skipped += count
        for m in reference.modes:
            indirect[m][i] = np.exp(1j * reference.phases[m] * t) * response[m]

    approx = ApproxSolution(
        modes=reference.modes,
        k_grid=k,
        times=reference.times,
        direct=direct,
        indirect=indirect,
        phases=reference.phases,
        k_star=reference.k_star,
        n0=reference.n0,
        alpha=alpha,
        grid=runs.grid,
        snapshots=tuple(snapshots),
        sigma_g=sigma_g,
    )
    approx.diagnostics.update({"indirect_ratio": approx.indirect_ratio(), "resonant_skipped": skipped, "identity": identity})
    logger.info("Solución aproximada ensamblada", extra=approx.diagnostics)
    return approx


@dataclass(frozen=True)
class ErrorNorms:
    """
    Relative errors sup over records of ||u_ref - u_Z|| / ||U1||.

    Attributes:
        direct: Over the direct windows.
        indirect: Over every other entry.
        total: Over all entries.
        taus: Slow record times included.
        per_record: Per set, the relative error at each included record.
    """

    direct: float
    indirect: float
    total: float
    taus: np.ndarray
    per_record: Dict[str, np.ndarray]

    def to_dict(self) -> Dict[str, Any]:
        return {"direct": self.direct, "indirect": self.indirect, "total": self.total, "taus": self.taus.tolist()}


def error_norm(
    reference: ModalField,
    approx: ApproxSolution,
    window: Optional[Tuple[float, float]] = None,
) -> ErrorNorms:
    """
    Weighted l2 distance between reference and approximate amplitudes.

    Args:
        reference: Modal reference.
        approx: Approximate solution on the same grid and record times.
        window: Slow-time interval (tau_lo, tau_hi) of records included.

    Raises:
        ValidationException: Incompatible grids or record times.
    """
    if reference.k_grid.size != approx.k_grid.size or not np.allclose(reference.k_grid, approx.k_grid, atol=1e-13):
        raise ValidationException(field="error_norm.k_grid", value=approx.k_grid.size, rule="same quasimomentum grid as the reference")
    if reference.times.size != approx.times.size or not np.allclose(reference.times, approx.times, rtol=TOLERANCIA_TIEMPO):
        raise ValidationException(field="error_norm.times", value=approx.times.size, rule="same record times as the reference")
    if set(reference.modes) != set(approx.modes):
        raise ValidationException(field="error_norm.modes", value=len(approx.modes), rule="same modes as the reference")
    taus = reference.taus
    lo, hi = window if window is not None else (-np.inf, np.inf)
    chosen = np.nonzero((taus >= lo - 1e-12) & (taus <= hi + 1e-12))[0]
    if chosen.size == 0:
        raise ValidationException(field="error_norm.window", value=window, rule="window containing record times")
    scale = reference.scale if reference.scale > 0.0 else 1.0
    masks = {m: reference.direct_mask(m) for m in reference.modes}
    per: Dict[str, list] = {"direct": [], "indirect": [], "total": []}
    for i in chosen:
        sums = {"direct": 0.0, "indirect": 0.0}
        for m in reference.modes:
            gap = np.abs(reference.u[m][i] - approx.total(m)[i]) ** 2
            sums["direct"] += float(np.sum(gap[masks[m]]))
            sums["indirect"] += float(np.sum(gap[~masks[m]]))
        per["direct"].append(np.sqrt(reference.dk * sums["direct"]) / scale)
        per["indirect"].append(np.sqrt(reference.dk * sums["indirect"]) / scale)
        per["total"].append(np.sqrt(reference.dk * (sums["direct"] + sums["indirect"])) / scale)
    arrays = {key: np.asarray(values) for key, values in per.items()}
    return ErrorNorms(
        direct=float(np.max(arrays["direct"])),
        indirect=float(np.max(arrays["indirect"])),
        total=float(np.max(arrays["total"])),
        taus=taus[chosen],
        per_record=arrays,
    )
