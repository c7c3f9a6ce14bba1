"""Band table of the configured model and the genericity margins at the carrier."""

from typing import List

import numpy as np

from aplicacion.ajuste import ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.modelo import check_generic
from infraestructura.acceso_datos.exportadores import exportar_bandas

logger = get_logger(__name__)


class ExperimentoBandas(BaseExperimento):
    nombre = "bands"

    def ejecutar(self) -> List[ScalingReport]:
        model = self.configurador.crear_modelo()
        jet = self.configurador.crear_jet()
        k = np.linspace(-np.pi, np.pi, int(self.valor("grid.n_k", 257)))
        tabla = exportar_bandas(model, k)

        report = ScalingReport(name="bands_jet", x_column="order", columns=("order", "gamma"))
        for order, gamma in enumerate(jet.gammas(4)):
            report.add_row({"order": order, "gamma": gamma})
        genericity = check_generic(model, jet.n0, jet.k_star, jet)
        report.tables.append(tabla)
        report.notes["jet"] = jet.to_dict()
        report.notes["genericity"] = genericity.to_dict()
        if not genericity.generic:
            logger.warning("Carrier no genérico", extra={"k_star": jet.k_star, "failed": list(genericity.failed())})
        return [report]
