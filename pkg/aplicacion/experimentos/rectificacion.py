"""
Rectifying maps of the configured dispersion families, orders 1 to 4.

For every family and order the report tabulates, on a geometric eta sweep,
the distance of Y^{-1} from the identity and the rectification residual
omega(k_star + Y(xi)) - gamma_nu(xi) at xi = +-eta.
"""

import re
from typing import Any, Dict, List, Tuple

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.modelo import FactoryDispersion, jet_at
from dominio.rectificacion import RectifyMap
from infraestructura.acceso_datos.exportadores import exportar_residuos

logger = get_logger(__name__)

ETA_MINIMO_POR_DEFECTO = (1e-3, 1e-3, 2e-2, 2e-2)


def slug(family: str) -> str:
    """File-safe name of a dispersion family."""
    return re.sub(r"[^a-z0-9]+", "_", family.lower()).strip("_")


class ExperimentoRectificacion(BaseExperimento):
    nombre = "rectify"

    def _casos(self) -> List[Tuple[Dict[str, Any], int]]:
        orders = [int(nu) for nu in self.valor("rectify.orders", [1, 2, 3, 4])]
        return [(dict(entry), nu) for entry in self.valor("rectify.families", []) for nu in orders]

    def _caso(self, caso: Tuple[Dict[str, Any], int]) -> ScalingReport:
        entry, nu = caso
        radius = float(self.valor("rectify.domain_radius", 0.1))
        eta_min = list(self.valor("rectify.eta_min", ETA_MINIMO_POR_DEFECTO))
        eta = np.geomspace(
            float(eta_min[min(nu, len(eta_min)) - 1]),
            float(self.valor("rectify.eta_max", radius)),
            int(self.valor("rectify.eta_points", 8)),
        )
        model = FactoryDispersion.obtener_modelo(entry)
        jet = jet_at(model, 1, float(entry["k_star"]))
        rect = RectifyMap(model, jet, nu, domain_radius=radius)

        report = ScalingReport(
            name=f"rectify_{slug(entry['family'])}_nu{nu}",
            x_column="eta",
            columns=("eta", "deviation", "residual"),
            criteria=(
                Criterion("deviation", "slope", nu + 1.0, float(self.tolerancia("symbol_slope_tolerance", 0.3))),
                Criterion("residual", "max_le", float(self.tolerancia("residual", 1e-10))),
            ),
        )
        deviation = np.abs(rect.inverse(eta) - eta)
        residual = np.maximum(np.abs(rect.residual(eta)), np.abs(rect.residual(-eta)))
        for row in zip(eta, deviation, residual):
            report.add_row(dict(zip(report.columns, row)))
        report.tables.append(
            exportar_residuos(rect, int(self.valor("rectify.sweep_points", 201)), nombre=f"{report.name}_sweep")
        )
        report.notes["map"] = rect.describe()
        logger.debug(
            "Mapa rectificante tabulado",
            extra={"family": entry["family"], "nu": nu, "max_residual": float(np.max(residual))},
        )
        return report

    def ejecutar(self) -> List[ScalingReport]:
        barrido = self.ejecutor.barrer(self._caso, self._casos())
        if barrido.error is not None:
            raise barrido.error
        return barrido.resultados
