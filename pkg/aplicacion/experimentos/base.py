"""
Base de los experimentos: ejecutor acotado y recuperación de integraciones.

Cada experimento produce una lista de :class:`ScalingReport`. Los puntos de un
barrido son independientes y se reparten en un pool de ``execution.jobs``
hilos; los resultados se recogen en orden de envío, de modo que las filas y
los archivos son deterministas.
"""

from abc import ABCMeta, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from aplicacion.ajuste import ScalingReport
from aplicacion.contenedor.configurador import Configurador
from config.logging_config import get_logger
from dominio.exceptions import NlsRegimeException, handle_with_recovery
from dominio.excitacion import DoubletExcitation
from dominio.referencia import ModalField, integrate_modal_nlm

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class Barrido:
    """Results of a sweep in submission order, cut at the first failure."""

    resultados: List[Any]
    error: Optional[NlsRegimeException] = None

    @property
    def completo(self) -> bool:
        return self.error is None


class Ejecutor:
    """
    Bounded worker pool with ordered results.

    Args:
        jobs: Number of worker threads; 1 runs in the calling thread.
    """

    def __init__(self, jobs: int = 1) -> None:
        self.jobs = max(1, int(jobs))

    def barrer(self, fn: Callable[[T], R], items: Iterable[T]) -> Barrido:
        """
        Apply ``fn`` to every item.

        A domain failure stops the sweep: the results gathered before it are
        kept and the pending items are cancelled.
        """
        items = list(items)
        resultados: List[R] = []
        if self.jobs == 1 or len(items) <= 1:
            for item in items:
                try:
                    resultados.append(fn(item))
                except NlsRegimeException as e:
                    return Barrido(resultados, e)
            return Barrido(resultados)
        pool = ThreadPoolExecutor(max_workers=min(self.jobs, len(items)))
        try:
            futures = [pool.submit(fn, item) for item in items]
            for future in futures:
                try:
                    resultados.append(future.result())
                except NlsRegimeException as e:
                    for pendiente in futures:
                        pendiente.cancel()
                    return Barrido(resultados, e)
        finally:
            pool.shutdown(wait=True)
        return Barrido(resultados)


class BaseExperimento(metaclass=ABCMeta):
    """
    Experiment producing scaling reports.

    Args:
        configurador: Domain-object factory of the run configuration.
        ejecutor: Worker pool for the sweep points.
    """

    nombre: str = ""

    def __init__(self, configurador: Configurador, ejecutor: Optional[Ejecutor] = None) -> None:
        self.configurador = configurador
        self.ejecutor = ejecutor or Ejecutor(configurador.jobs)

    @abstractmethod
    def ejecutar(self) -> List[ScalingReport]:
        """Run the experiment; reports are returned unevaluated."""

    def valor(self, key_path: str, default: Any = None) -> Any:
        return self.configurador.valor(key_path, default)

    def opcion(self, key: str, default: Any = None) -> Any:
        """Value of ``experiments.<nombre>.<key>``."""
        return self.valor(f"experiments.{self.nombre}.{key}", default)

    def tolerancia(self, key: str, default: Optional[float] = None) -> Any:
        return self.valor(f"tolerances.{key}", default)

    def integrar(self, operacion: Callable[..., T], nombre: str, contexto: Dict[str, Any], **kwargs: Any) -> T:
        """
        Run a time integration, halving its step on rejection.

        ``operacion`` must accept ``refinement``.
        """
        return handle_with_recovery(
            operation=operacion,
            operation_name=nombre,
            context=contexto,
            max_attempts=self.configurador.max_halvings + 1,
            refinement=1,
            **kwargs,
        )

    def referencia_modal(self, excitation: DoubletExcitation, linearized: bool = False, **options: Any) -> ModalField:
        """
        Modal reference (or its first nonlinear response) with the ``reference``
        and ``solver`` settings, step halving on rejection.
        """
        settings = {
            "n1": int(self.valor("reference.n1", 0)),
            "kernel": str(self.valor("reference.kernel", "full")),
            "dt": float(self.valor("solver.modal_dt", 0.1)),
            "phase_limit": float(self.valor("solver.phase_limit", 0.1)),
            "progress_every": self.configurador.progress_every,
        }
        settings.update(options)
        return self.integrar(
            integrate_modal_nlm,
            "integrate_modal_nlm",
            {"beta": excitation.beta, "rho": excitation.rho, "linearized": linearized},
            model=self.configurador.crear_modelo(),
            excitation=excitation,
            linearized=linearized,
            **settings,
        )

    @staticmethod
    def cerrar(report: ScalingReport, barrido: Barrido) -> ScalingReport:
        """Record the failure that cut a sweep short on its report."""
        if barrido.error is not None:
            report.error = barrido.error.user_message or str(barrido.error)
            report.notes["error"] = barrido.error.to_dict()
            logger.warning(
                "Barrido interrumpido",
                extra={"report": report.name, "rows": len(report.rows), "error_code": barrido.error.error_code},
            )
        return report
