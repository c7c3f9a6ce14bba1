"""Application service running experiments and emitting their reports.

The ControladorExperimentos service is the harness of nlsregime: it builds
each requested experiment from the configuration, runs it, evaluates the
verdicts of its reports and hands them to the report repository. A domain
failure inside an experiment does not stop the run; the experiment yields a
report carrying the error and the exit status reflects it.
"""

from typing import Any, Dict, List, Mapping, Optional, Sequence

from aplicacion.ajuste import ScalingReport
from aplicacion.contenedor.configurador import Configurador, definir_configurador
from aplicacion.experimentos import EXPERIMENTOS, Ejecutor, FactoryExperimento
from config.logging_config import get_logger
from dominio.exceptions import (
    DataAccessException,
    NlsRegimeException,
    StepHalvingStrategy,
    get_exception_handler,
    handle_with_recovery,
)
from infraestructura.acceso_datos.repositorio_reportes import exit_status

logger = get_logger(__name__)


def report_de_error(nombre: str, error: NlsRegimeException) -> ScalingReport:
    """Empty report standing for an experiment that failed before producing rows."""
    report = ScalingReport(name=nombre, x_column="", columns=())
    report.error = error.user_message or str(error)
    report.notes["error"] = error.to_dict()
    if error.recovery_suggestion:
        report.notes["recovery_suggestion"] = error.recovery_suggestion
    return report


class ControladorExperimentos:
    """Application service for experiment runs.

    Orchestrates the run of one or more experiments:
        - Experiment construction through FactoryExperimento
        - Sweep points on a bounded worker pool (``execution.jobs``)
        - Step-halving recovery budget from ``execution.max_halvings``
        - Verdict evaluation and report emission with I/O retries

    Args:
        config: Merged and validated configuration.
        configurador: Domain-object factory; built from ``config`` when omitted.

    Example:
        >>> controller = ControladorExperimentos(load_config(environment="testing"))
        >>> reports = controller.ejecutar(["rectify"])
        >>> controller.emitir(reports, "resultados")
        0
    """

    def __init__(self, config: Mapping[str, Any], configurador: Optional[Configurador] = None) -> None:
        self.config = config
        self.configurador = configurador or definir_configurador(config)
        self.ejecutor = Ejecutor(self.configurador.jobs)
        for strategy in get_exception_handler().recovery_strategies:
            if isinstance(strategy, StepHalvingStrategy):
                strategy.max_halvings = self.configurador.max_halvings

    def ejecutar_experimento(self, nombre: str) -> List[ScalingReport]:
        """Run one experiment; a domain failure yields a report carrying the error.

        Raises:
            ValidationException: Unknown experiment name.
            NlsRegimeException: Unexpected failure, wrapped.
        """
        experimento = FactoryExperimento.obtener_experimento(nombre, self.configurador, self.ejecutor)
        logger.info("Iniciando experimento", extra={"experiment": nombre, "jobs": self.ejecutor.jobs})
        try:
            reports = experimento.ejecutar()
        except NlsRegimeException as e:
            logger.error(
                "Experimento interrumpido",
                extra={"experiment": nombre, "error_code": e.error_code, "error_type": type(e).__name__},
            )
            return [report_de_error(nombre, e)]
        except Exception as ex:
            raise NlsRegimeException(
                message=f"Fallo inesperado en el experimento {nombre}: {ex}",
                user_message=f"El experimento '{nombre}' terminó con un error inesperado",
                context={"experiment": nombre},
                recovery_suggestion="Ejecute con --verbose y revise logs/error.log",
                cause=ex,
            ) from ex
        logger.info("Experimento completado", extra={"experiment": nombre, "reports": len(reports)})
        return reports

    def ejecutar(self, nombres: Sequence[str]) -> List[ScalingReport]:
        """Run the experiments in order; report assembly is sequential."""
        reports: List[ScalingReport] = []
        for nombre in nombres:
            reports.extend(self.ejecutar_experimento(nombre))
        return [r.evaluate() for r in reports]

    def emitir(self, reports: Sequence[ScalingReport], directorio: Optional[str] = None) -> int:
        """Write the reports and the summary; return the exit status.

        Raises:
            DataAccessException: The output could not be written after retries.
        """
        repositorio = self.configurador.crear_repositorio(directorio)
        try:
            summary: Dict[str, Any] = handle_with_recovery(
                operation=repositorio.emit,
                operation_name="emit_report",
                context={"directorio": repositorio.contexto.recurso},
                max_attempts=int(self.configurador.max_attempts),
                reports=list(reports),
                config=self.config,
            )
        except DataAccessException:
            raise
        except NlsRegimeException as e:
            raise DataAccessException(
                file_path=repositorio.contexto.recurso,
                operation="emit_report",
                cause=e,
            ) from e
        return int(summary["exit_status"])

    def ejecutar_y_emitir(self, nombres: Sequence[str], directorio: Optional[str] = None) -> int:
        return self.emitir(self.ejecutar(nombres), directorio)


def experimentos_disponibles() -> List[str]:
    return list(EXPERIMENTOS)


__all__ = ["ControladorExperimentos", "experimentos_disponibles", "exit_status", "report_de_error"]
