"""
Source form of the envelope equations.

An initial-value run Z and the sourced run V with V(0) = 0 are related by
V(t) = psi(rho t) Z(t) when V solves the same equation with the source

    f = -rho psi'(rho t) Z - alpha_pi (psi - psi**3) p[Z] - alpha_pi**2 delta5 (psi - psi**5) Z**3 Z_-**2,

entering as dV/dt = ... - f. Both runs are integrated together so the
identity can be checked at every step.
"""

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Union

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import NumericalException

from .coeficientes import EnlsCoefficients
from .estado import EnvelopeState
from .integrador import LIMITE_FASE, EnvelopeSolver, Fields, OrderSpec, march

if TYPE_CHECKING:
    from dominio.excitacion.envolvente import EnvelopeSpec

logger = get_logger(__name__)

TOLERANCIA_EQUIVALENCIA = 1e-8


@dataclass(frozen=True)
class SourcedRun:
    """
    Paired result of ``to_source_form``.

    Attributes:
        z: Final state of the initial-value run.
        v: Final state of the sourced run.
        times: Step times.
        residual: max |V - psi Z| at each step time.
        residual_after_ramp: Largest residual once the ramp is over.
        start_residual: max |V| at t = 0.
    """

    z: EnvelopeState
    v: EnvelopeState
    times: np.ndarray
    residual: np.ndarray
    residual_after_ramp: float
    start_residual: float

    def describe(self) -> Dict[str, Any]:
        return {
            "residual_max": float(np.max(self.residual)) if self.residual.size else 0.0,
            "residual_after_ramp": self.residual_after_ramp,
            "start_residual": self.start_residual,
            "steps": int(self.times.size),
        }


class _SourcedSolver:
    """Joint right-hand side of (Z_+, Z_-, V_+, V_-)."""

    def __init__(self, solver: EnvelopeSolver, envelope: "EnvelopeSpec", rho: float) -> None:
        self.solver = solver
        self.envelope = envelope
        self.rho = rho

    def multipliers(self, dt: float) -> Fields:
        m = self.solver.multipliers(dt)
        return m + m

    def source(self, t: float, z: Fields) -> Fields:
        tau = self.rho * t
        psi = float(self.envelope.psi(tau))
        dpsi = float(self.envelope.psi0(tau))
        coeffs = self.solver.coeffs
        out = []
        for sign, za, zb in ((1, z[0], z[1]), (-1, z[1], z[0])):
            term = -self.rho * dpsi * za
            if psi != psi**3:
                term = term - coeffs.alpha_pi * (psi - psi**3) * self.solver.cubic(sign, za, zb)
            if self.solver.quintic[sign] and psi != psi**5:
                term = term - coeffs.alpha_pi**2 * self.solver.quintic[sign] * (psi - psi**5) * za**3 * zb**2
            out.append(term)
        return tuple(out)

    def rhs(self, t: float, fields: Fields) -> Fields:
        z, v = fields[0:2], fields[2:4]
        rz = self.solver.rhs(t, z)
        rv = self.solver.rhs(t, v)
        f = self.source(t, z)
        return rz + (rv[0] - f[0], rv[1] - f[1])

    def phase_measure(self, fields: Fields) -> float:
        return max(self.solver.phase_measure(fields[0:2]), self.solver.phase_measure(fields[2:4]))


def to_source_form(
    coeffs: EnlsCoefficients,
    run: EnvelopeState,
    envelope: "EnvelopeSpec",
    rho: float,
    order_spec: Union[OrderSpec, Mapping[str, Any], None] = None,
    t_end: Optional[float] = None,
    dt: float = 0.1,
    method: str = "ifrk4",
    tolerance: float = TOLERANCIA_EQUIVALENCIA,
    phase_limit: float = LIMITE_FASE,
) -> SourcedRun:
    """
    Integrate the sourced equation next to the initial-value run started from ``run``.

    Args:
        coeffs: Coefficient set of the run.
        run: Initial state of the Z run (its fields are the data h).
        envelope: Ramp psi0 / psi.
        rho: Slow-time scale.
        order_spec: Terms kept.
        t_end: End time; defaults to twice the ramp end tau0 / rho.
        dt: Step.
        method: strang or ifrk4.
        tolerance: Accepted max |V - Z| once the ramp is over.

    Raises:
        NumericalException: Equivalence residual above ``tolerance``.
    """
    order = OrderSpec.from_any(order_spec)
    t_ramp = envelope.tau0 / rho
    t_end = 2.0 * t_ramp if t_end is None else float(t_end)
    solver = _SourcedSolver(EnvelopeSolver(coeffs, run.grid, order, run.frame), envelope, rho)
    zeros = np.zeros_like(run.z_plus)
    times: List[float] = []
    residual: List[float] = []
    after = {"max": 0.0}

    def watch(t: float, y: Fields, h: float) -> None:
        psi = float(envelope.psi(rho * t))
        gap = max(float(np.max(np.abs(y[2] - psi * y[0]))), float(np.max(np.abs(y[3] - psi * y[1]))))
        times.append(t)
        residual.append(gap)
        if t >= t_ramp:
            after["max"] = max(after["max"], gap)

    y, _, info = march(
        solver.rhs,
        solver.multipliers,
        (run.z_plus, run.z_minus, zeros, zeros),
        run.t,
        t_end,
        dt,
        method=method,
        phase_rate=solver.phase_measure,
        phase_limit=phase_limit,
        operation="to_source_form",
        on_step=watch,
    )
    z_state = replace(run, z_plus=y[0], z_minus=y[1], t=t_end, snapshots=(), diagnostics=dict(info))
    v_state = replace(run, z_plus=y[2], z_minus=y[3], t=t_end, snapshots=(), diagnostics=dict(info))
    result = SourcedRun(
        z=z_state,
        v=v_state,
        times=np.asarray(times),
        residual=np.asarray(residual),
        residual_after_ramp=after["max"],
        start_residual=0.0,
    )
    logger.info("Forma con fuente verificada", extra=result.describe())
    if after["max"] > tolerance:
        raise NumericalException(
            operation="to_source_form", quantity="max |V - Z| after the ramp", value=after["max"],
        )
    return result
