"""Storage contexts for experiment artifacts.

Classes:
    BaseContexto: Abstract base class defining the storage interface
    ContextoArchivo: Directory of text files written atomically

Every write goes to a temporary file in the target directory and is then
renamed over the destination, so a reader never sees a partial artifact.
Failures are routed through the recovery handler (retry with backoff) and
surface as DataAccessException carrying the original OS error.
"""

import os
import tempfile
from abc import ABCMeta, abstractmethod
from pathlib import Path
from typing import List, Optional

from config.logging_config import get_logger
from dominio.exceptions import ConfigurationException, DataAccessException
from dominio.exceptions.exception_handler import handle_with_recovery

logger = get_logger(__name__)


class BaseContexto(metaclass=ABCMeta):
    """Abstract storage context bound to a resource location.

    Attributes:
        _recurso: Physical resource location (directory path).

    Abstract Methods:
        persistir: Store text under a name
        recuperar: Read the text stored under a name
        listar: Names available in the context
    """

    def __init__(self, recurso: str) -> None:
        if recurso is None or str(recurso) == "":
            raise ConfigurationException(
                config_key="output.directory",
                config_type="contexto_persistencia",
                context={"provided_value": str(recurso), "validation_rule": "nombre_recurso_requerido"},
            )
        self._recurso = str(recurso)

    @property
    def recurso(self) -> str:
        return self._recurso

    @abstractmethod
    def persistir(self, texto: str, nombre: str) -> Path:
        """Store ``texto`` under ``nombre``; returns the written path."""

    @abstractmethod
    def recuperar(self, nombre: str) -> Optional[str]:
        """Text stored under ``nombre``, None when absent."""

    @abstractmethod
    def listar(self) -> List[str]:
        """Stored names."""


class ContextoArchivo(BaseContexto):
    """Directory context with atomic writes.

    Example:
        >>> contexto = ContextoArchivo('results/ladder')
        >>> contexto.persistir('beta,error\\n', 'ladder.csv')
    """

    def _escribir(self, texto: str, destino: Path) -> Path:
        destino.parent.mkdir(parents=True, exist_ok=True)
        descriptor, temporal = tempfile.mkstemp(dir=str(destino.parent), prefix=".", suffix=".tmp")
        try:
            with os.fdopen(descriptor, "w", encoding="utf-8", newline="") as archivo:
                archivo.write(texto)
            os.replace(temporal, destino)
        except BaseException:
            if os.path.exists(temporal):
                os.unlink(temporal)
            raise
        return destino

    def persistir(self, texto: str, nombre: str) -> Path:
        destino = Path(self._recurso) / nombre
        try:
            ruta = handle_with_recovery(
                operation=self._escribir,
                operation_name="persistir_artefacto",
                context={"file_path": str(destino)},
                max_attempts=2,
                texto=texto,
                destino=destino,
            )
        except DataAccessException:
            raise
        except Exception as ex:
            raise DataAccessException(file_path=str(destino), operation="persistir", cause=ex)
        logger.debug("Artefacto escrito", extra={"archivo": str(ruta), "bytes": len(texto.encode("utf-8"))})
        return ruta

    def recuperar(self, nombre: str) -> Optional[str]:
        ruta = Path(self._recurso) / nombre
        if not ruta.exists():
            logger.warning("Artefacto no encontrado", extra={"archivo": str(ruta)})
            return None
        try:
            return ruta.read_text(encoding="utf-8")
        except OSError as ex:
            raise DataAccessException(file_path=str(ruta), operation="recuperar", cause=ex)

    def listar(self) -> List[str]:
        raiz = Path(self._recurso)
        if not raiz.is_dir():
            return []
        lista = sorted(p.name for p in raiz.iterdir() if p.is_file() and not p.name.startswith("."))
        logger.info("Lista de artefactos obtenida", extra={"cantidad": len(lista), "archivos": lista[:5]})
        return lista
