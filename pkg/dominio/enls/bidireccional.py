"""
Bidirectional system: the doublets at k_star and -k_star integrated together.

Doublet A (carrier k_star) and doublet B (carrier -k_star) obey their own
envelope equations plus the cross terms

    + alpha_pi * delta_cross_s * Z^B_-s**2 * Z^B_s     in the equation of Z^A_s,

and symmetrically for B. Both members of a doublet oscillate at the same
carrier frequency, so in the rotating frame the cross terms carry the factor
exp(2 i s gamma0 t); their time integral is therefore O(1/gamma0) instead of O(t).
"""

from dataclasses import replace
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import PreconditionException, ValidationException

from .coeficientes import EnlsCoefficients, alpha_pi
from .estado import EnvelopeState, Snapshot
from .integrador import (
    LIMITE_FASE,
    PASO_POR_DEFECTO,
    EnvelopeSolver,
    Fields,
    OrderSpec,
    SourceFn,
    _check_resolution,
    march,
)

logger = get_logger(__name__)

MARCOS_BIDIRECCIONALES = ("lab", "rotating")


class BidirectionalSolver:
    """
    Right-hand side of the coupled quadruplet.

    The field tuple is (Z^A_+, Z^A_-, Z^B_+, Z^B_-, C^A, C^B), where C^A and C^B
    accumulate the time integral of the cross term acting on Z^A_+ and Z^B_+.
    """

    def __init__(
        self,
        coeffs_a: EnlsCoefficients,
        coeffs_b: EnlsCoefficients,
        grid: Any,
        order: OrderSpec,
        frame: str = "rotating",
        sources: Tuple[Optional[SourceFn], Optional[SourceFn]] = (None, None),
        coupling: bool = True,
    ) -> None:
        if frame not in MARCOS_BIDIRECCIONALES:
            raise ValidationException(field="frame", value=frame, rule="bidirectional runs use lab or rotating")
        self.a = EnvelopeSolver(coeffs_a, grid, order, frame, sources[0])
        self.b = EnvelopeSolver(coeffs_b, grid, order, frame, sources[1])
        self.frame = frame
        self.coupling = coupling

    def multipliers(self, dt: float) -> Fields:
        ones = np.ones(self.a.grid.n_points, dtype=complex)
        return self.a.multipliers(dt) + self.b.multipliers(dt) + (ones, ones)

    def _rotation(self, coeffs: EnlsCoefficients, sign: int, t: float) -> complex:
        if self.frame == "lab":
            return 1.0 + 0j
        return np.exp(2j * sign * coeffs.gammas[0] * t)

    def cross(self, t: float, fields: Fields) -> Fields:
        """Cross terms acting on (Z^A_+, Z^A_-, Z^B_+, Z^B_-)."""
        za_p, za_m, zb_p, zb_m = fields[:4]
        out = []
        for solver, (zp, zm) in ((self.a, (zb_p, zb_m)), (self.b, (za_p, za_m))):
            coeffs = solver.coeffs
            for sign, zs, zo in ((1, zp, zm), (-1, zm, zp)):
                delta = coeffs.delta_cross[sign]
                if not self.coupling or delta == 0:
                    out.append(np.zeros_like(zs))
                    continue
                out.append(coeffs.alpha_pi * delta * self._rotation(coeffs, sign, t) * zo**2 * zs)
        return tuple(out)

    def rhs(self, t: float, fields: Fields) -> Fields:
        ra = self.a.rhs(t, fields[0:2])
        rb = self.b.rhs(t, fields[2:4])
        xa_p, xa_m, xb_p, xb_m = self.cross(t, fields)
        return (ra[0] + xa_p, ra[1] + xa_m, rb[0] + xb_p, rb[1] + xb_m, xa_p, xb_p)

    def phase_measure(self, fields: Fields) -> float:
        rate_a = self.a.phase_measure(fields[0:2])
        rate_b = self.b.phase_measure(fields[2:4])
        if not self.coupling:
            return max(rate_a, rate_b)
        peak_a = max(float(np.max(np.abs(z))) for z in fields[0:2])
        peak_b = max(float(np.max(np.abs(z))) for z in fields[2:4])
        cross_a = self.a.coeffs.alpha_pi * max(abs(v) for v in self.a.coeffs.delta_cross.values()) * peak_b**2
        cross_b = self.b.coeffs.alpha_pi * max(abs(v) for v in self.b.coeffs.delta_cross.values()) * peak_a**2
        return max(rate_a + cross_a, rate_b + cross_b)


def integrate_bidirectional(
    coeffs_plus: EnlsCoefficients,
    coeffs_minus: EnlsCoefficients,
    states: Tuple[EnvelopeState, EnvelopeState],
    order_spec: Union[OrderSpec, Mapping[str, Any], None] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    rho: Optional[float] = None,
    t_end: float = 1.0,
    dt: float = PASO_POR_DEFECTO,
    method: str = "ifrk4",
    sources: Tuple[Optional[SourceFn], Optional[SourceFn]] = (None, None),
    snapshot_times: Sequence[float] = (),
    refinement: int = 1,
    phase_limit: float = LIMITE_FASE,
    coupling: bool = True,
    progress_every: int = 1000,
) -> Tuple[EnvelopeState, EnvelopeState]:
    """
    Co-integrate the doublets at k_star (``coeffs_plus``) and -k_star (``coeffs_minus``).

    Both states must share grid, time and frame. The diagnostics of each
    returned state include ``coupling_integral``: the largest L2 norm reached
    by the accumulated cross term acting on its positive member.

    Raises:
        PreconditionException: Incompatible states or carriers not opposite.
        StepRejectedException: Nonlinear phase per step above ``phase_limit``.
        NumericalException: Non-finite values.
    """
    state_a, state_b = states
    if state_a.grid != state_b.grid or state_a.frame != state_b.frame or state_a.t != state_b.t:
        raise PreconditionException(
            operation="integrate_bidirectional", invariant="both doublets share grid, frame and time",
        )
    if abs(coeffs_plus.k_star + coeffs_minus.k_star) > 1e-12:
        raise PreconditionException(
            operation="integrate_bidirectional", invariant="doublets centred at +k_star and -k_star",
            context={"k_plus": coeffs_plus.k_star, "k_minus": coeffs_minus.k_star},
        )
    order = OrderSpec.from_any(order_spec)
    if alpha is not None:
        coeffs_plus = replace(coeffs_plus, alpha_pi=alpha_pi(alpha))
        coeffs_minus = replace(coeffs_minus, alpha_pi=alpha_pi(alpha))
    _check_resolution(state_a.grid, beta)
    solver = BidirectionalSolver(coeffs_plus, coeffs_minus, state_a.grid, order, state_a.frame, sources, coupling)
    grid = state_a.grid
    zeros = np.zeros(grid.n_points, dtype=complex)
    peaks: Dict[str, float] = {"a": 0.0, "b": 0.0}

    def watch(t: float, y: Fields, h: float) -> None:
        peaks["a"] = max(peaks["a"], grid.norm(y[4]))
        peaks["b"] = max(peaks["b"], grid.norm(y[5]))

    logger.debug(
        "Iniciando integración bidireccional",
        extra={"nu": order.nu, "t_end": t_end, "coupling": coupling, "frame": state_a.frame},
    )
    y, records, info = march(
        solver.rhs,
        solver.multipliers,
        (state_a.z_plus, state_a.z_minus, state_b.z_plus, state_b.z_minus, zeros, zeros),
        state_a.t,
        t_end,
        dt,
        method=method,
        refinement=refinement,
        snapshot_times=snapshot_times,
        phase_rate=solver.phase_measure,
        phase_limit=phase_limit,
        operation="integrate_bidirectional",
        on_step=watch,
        progress_every=progress_every,
    )
    wanted = set(map(float, snapshot_times))
    results = []
    for offset, state, coeffs, key in ((0, state_a, coeffs_plus, "a"), (2, state_b, coeffs_minus, "b")):
        diagnostics = dict(info)
        diagnostics.update(
            {
                "coupling_integral": peaks[key],
                "conjugation_defect": float(np.max(np.abs(y[offset + 1] - np.conj(y[offset])))),
                "beta": beta,
                "rho": rho,
            }
        )
        snapshots = tuple(Snapshot(t, f[offset], f[offset + 1]) for t, f in records if t in wanted)
        results.append(
            replace(
                state, z_plus=y[offset], z_minus=y[offset + 1], t=float(t_end), gammas=coeffs.gammas,
                snapshots=snapshots, diagnostics=diagnostics,
            )
        )
    logger.info(
        "Integración bidireccional completada",
        extra={"steps": info["steps"], "coupling_a": peaks["a"], "coupling_b": peaks["b"]},
    )
    return results[0], results[1]
