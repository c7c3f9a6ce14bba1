"""
Selection rules: the first nonlinear response in the third-harmonic window
is O(rho) relative to the frequency-matched response in the direct window.
"""

from typing import Dict, List

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.exceptions import PreconditionException
from dominio.modelo import check_generic

logger = get_logger(__name__)


class ExperimentoSupresion(BaseExperimento):
    nombre = "suppression"

    def ejecutar(self) -> List[ScalingReport]:
        model = self.configurador.crear_modelo()
        jet = self.configurador.crear_jet()
        genericity = check_generic(model, jet.n0, jet.k_star, jet)
        if genericity.margins["third_harmonic"] <= genericity.threshold:
            raise PreconditionException(
                operation="run_fm_suppression",
                invariant="third-harmonic resonance margin above threshold",
                context={"margin": genericity.margins["third_harmonic"], "threshold": genericity.threshold},
            )

        beta = float(self.opcion("beta", 0.2))
        rhos = sorted((float(r) for r in self.opcion("rhos", [0.08, 0.04, 0.02])), reverse=True)
        report = ScalingReport(
            name="suppression",
            x_column="rho",
            columns=("rho", "direct", "harmonic", "nonfm_ratio", "fm_ratio"),
            criteria=(
                Criterion(
                    "nonfm_ratio", "slope", float(self.opcion("slope_target", 1.0)), float(self.opcion("slope_tolerance", 0.2))
                ),
                Criterion("fm_ratio", "abs_slope_max", float(self.opcion("fm_slope_max", 0.2))),
            ),
        )
        report.notes["genericity"] = genericity.to_dict()

        def fila(rho: float) -> Dict[str, float]:
            exc = self.configurador.crear_excitacion(beta, 0.0, rho)
            fnlr = self.referencia_modal(exc, linearized=True)
            last = fnlr.times.size - 1
            direct = fnlr.norm(last, {m: fnlr.direct_mask(m) for m in fnlr.modes})
            harmonic = fnlr.norm(last, {m: fnlr.harmonic_mask(m) for m in fnlr.modes})
            logger.debug("Respuesta no lineal evaluada", extra={"rho": rho, "direct": direct, "harmonic": harmonic})
            return {
                "rho": rho,
                "direct": direct,
                "harmonic": harmonic,
                "nonfm_ratio": harmonic / direct,
                # respuesta FM por unidad de tiempo lento
                "fm_ratio": rho * direct / fnlr.scale,
            }

        barrido = self.ejecutor.barrer(fila, rhos)
        for row in barrido.resultados:
            report.add_row(row)
        return [self.cerrar(report, barrido)]
