"""
Report repository: CSV tables and the JSON run summary.

One CSV per report (plus its attached tables) and a ``summary.json`` with the
tool version, the configuration echo, per-report slopes and verdicts and the
overall exit status.
"""

import subprocess
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from config.logging_config import get_logger
from infraestructura.acceso_datos.contexto import BaseContexto
from infraestructura.acceso_datos.factory_context import FactoryContexto
from infraestructura.acceso_datos.mapeador import Tabla

logger = get_logger(__name__)

NOMBRE_PAQUETE = "nlsregime"
RESUMEN = "summary.json"
SALIDA_OK = 0
SALIDA_ERROR = 1
SALIDA_VEREDICTO = 2
RAIZ_PROYECTO = Path(__file__).resolve().parents[2]


def tool_version() -> Dict[str, Optional[str]]:
    """Installed package version and ``git describe`` of the source tree when available."""
    try:
        version: Optional[str] = metadata.version(NOMBRE_PAQUETE)
    except metadata.PackageNotFoundError:
        version = None
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=str(RAIZ_PROYECTO), capture_output=True, text=True, timeout=5, check=True,
        ).stdout.strip() or None
    except (OSError, subprocess.SubprocessError):
        described = None
    return {"name": NOMBRE_PAQUETE, "version": version, "git": described}


def exit_status(reports: Sequence[Any]) -> int:
    """1 when an experiment was cut short by an error, 2 when a verdict fails, else 0."""
    if any(getattr(r, "error", None) for r in reports):
        return SALIDA_ERROR
    return SALIDA_OK if all(r.passed for r in reports) else SALIDA_VEREDICTO


class RepositorioReportes:
    """Writes experiment reports through a storage context.

    Args:
        contexto: Storage context (a directory).
    """

    def __init__(self, contexto: BaseContexto) -> None:
        self._contexto = contexto
        self._csv = FactoryContexto.obtener_mapeador("csv")
        self._json = FactoryContexto.obtener_mapeador("json")

    @classmethod
    def en_directorio(cls, directorio: str) -> "RepositorioReportes":
        return cls(FactoryContexto.obtener_contexto("archivo", directorio))

    @property
    def contexto(self) -> BaseContexto:
        return self._contexto

    def guardar_tabla(self, tabla: Tabla) -> Path:
        return self._contexto.persistir(self._csv.ir_a_persistidor(tabla), tabla.name + self._csv.extension)

    def guardar_documento(self, nombre: str, documento: Any) -> Path:
        return self._contexto.persistir(self._json.ir_a_persistidor(documento), nombre + self._json.extension)

    def recuperar_tabla(self, nombre: str) -> Optional[Tabla]:
        texto = self._contexto.recuperar(nombre + self._csv.extension)
        return None if texto is None else self._csv.venir_desde_persistidor(texto, nombre)

    def recuperar_resumen(self) -> Optional[Dict[str, Any]]:
        texto = self._contexto.recuperar(RESUMEN)
        return None if texto is None else self._json.venir_desde_persistidor(texto)

    def emit(self, reports: Sequence[Any], config: Mapping[str, Any]) -> Dict[str, Any]:
        """
        Write every report and the summary.

        Args:
            reports: Evaluated ScalingReport objects, in submission order.
            config: Merged configuration; echoed in the summary.

        Returns:
            The summary document.

        Raises:
            DataAccessException: A file could not be written.
        """
        files: List[str] = []
        for report in reports:
            files.append(self.guardar_tabla(report.table()).name)
            for tabla in report.tables:
                files.append(self.guardar_tabla(tabla).name)
            for nombre, documento in getattr(report, "documents", {}).items():
                files.append(self.guardar_documento(nombre, documento).name)
        status = exit_status(reports)
        summary = {
            "tool": tool_version(),
            "config": dict(config),
            "experiments": [r.to_dict() for r in reports],
            "n_experiments": len(reports),
            "passed": all(r.passed for r in reports),
            "exit_status": status,
            "files": files,
        }
        self.guardar_documento(Path(RESUMEN).stem, summary)
        logger.info(
            "Informe emitido",
            extra={"directorio": self._contexto.recurso, "experimentos": len(reports), "exit_status": status},
        )
        return summary
