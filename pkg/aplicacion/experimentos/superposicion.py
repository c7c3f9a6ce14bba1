"""
Approximate superposition of two doublets with distinct group velocities.

The modal reference is run for J1 + J2, J1 and J2 on a common grid; the
residual U(J1 + J2) - U(J1) - U(J2) is followed along a rho / beta sweep at
fixed alpha_pi / rho. The same-doublet case U(2 J1) - 2 U(J1) is tabulated next
to it; that residual does not shrink.
"""

from typing import Dict, List

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.enls import ALPHA_UNIDAD
from dominio.exceptions import PreconditionException
from dominio.referencia import ModalField, reference_grid

logger = get_logger(__name__)


def residual_norm(total: ModalField, *parts: ModalField, factor: float = 1.0) -> float:
    """max over records of ||u_total - factor * sum(u_parts)|| relative to the linear scale."""
    worst = 0.0
    for i in range(total.times.size):
        squares = 0.0
        for mode in total.modes:
            gap = total.u[mode][i] - factor * sum(p.u[mode][i] for p in parts)
            squares += float(np.sum(np.abs(gap) ** 2))
        worst = max(worst, float(np.sqrt(total.dk * squares)))
    return worst / total.scale


class ExperimentoSuperposicion(BaseExperimento):
    nombre = "superposition"

    def ejecutar(self) -> List[ScalingReport]:
        beta = float(self.opcion("beta", 0.2))
        alpha_pi_over_rho = float(self.opcion("alpha_pi_over_rho", 1.0))
        tau_star = float(self.valor("scaling.tau_star", 1.0))
        second = dict(self.opcion("second", {}))
        first_jet = self.configurador.crear_jet()
        second_jet = self.configurador.crear_jet(second.get("k_star"), second.get("n0"))
        gap = abs(first_jet.velocity - second_jet.velocity)
        if gap < float(self.opcion("velocity_margin", 0.1)):
            raise PreconditionException(
                operation="run_superposition",
                invariant="distinct group velocities |v1 - v2| >= velocity_margin",
                context={"v1": first_jet.velocity, "v2": second_jet.velocity, "gap": gap},
            )

        ratios = sorted((float(r) for r in self.opcion("ratios", [0.1, 0.046, 0.022, 0.01])), reverse=True)
        report = ScalingReport(
            name="superposition",
            x_column="ratio",
            columns=("ratio", "rho", "alpha", "residual", "same_doublet"),
            criteria=(
                Criterion("residual", "min_slope", float(self.opcion("min_slope", 3.0))),
                Criterion("same_doublet", "max_slope", float(self.opcion("same_doublet_max_slope", 1.0))),
            ),
        )
        report.notes["velocities"] = [first_jet.velocity, second_jet.velocity]

        def fila(ratio: float) -> Dict[str, float]:
            rho = ratio * beta
            alpha = alpha_pi_over_rho * rho * ALPHA_UNIDAD
            t_end = tau_star / rho
            k = reference_grid(beta, max(abs(first_jet.velocity), abs(second_jet.velocity)), t_end)
            exc1 = self.configurador.crear_excitacion(beta, alpha, rho)
            exc2 = self.configurador.crear_excitacion(beta, alpha, rho, **second)
            options = {"k_grid": k, "t_end": t_end}
            both = self.referencia_modal(exc1, companions=[exc2], **options)
            alone1 = self.referencia_modal(exc1, **options)
            alone2 = self.referencia_modal(exc2, **options)
            doubled = self.referencia_modal(exc1, companions=[exc1], **options)
            row = {
                "ratio": ratio,
                "rho": rho,
                "alpha": alpha,
                "residual": residual_norm(both, alone1, alone2),
                "same_doublet": residual_norm(doubled, alone1, factor=2.0),
            }
            logger.info("Punto de superposición completado", extra=row)
            return row

        barrido = self.ejecutor.barrer(fila, ratios)
        for row in barrido.resultados:
            report.add_row(row)
        return [self.cerrar(report, barrido)]
