"""
Configuración centralizada del sistema de logging estructurado.
Proporciona logging con formato JSON y rotación automática.
"""

import json
import logging
import logging.handlers
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

_ATRIBUTOS_ESTANDAR = {
    "name", "msg", "args", "levelname", "levelno", "pathname", "filename", "module",
    "exc_info", "exc_text", "stack_info", "lineno", "funcName", "created", "msecs",
    "relativeCreated", "thread", "threadName", "processName", "process", "message",
    "taskName",
}


def _serializable(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(np.real(value)), "im": float(np.imag(value))}
    if isinstance(value, np.ndarray):
        return value.tolist() if value.size <= 16 else f"ndarray{value.shape}"
    return value


class StructuredFormatter(logging.Formatter):
    """Formatter que convierte logs a formato JSON estructurado"""

    def __init__(self, include_trace: bool = True) -> None:
        super().__init__()
        self.include_trace = include_trace

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info and self.include_trace:
            log_data["exception"] = {
                "type": record.exc_info[0].__name__ if record.exc_info[0] else None,
                "message": str(record.exc_info[1]) if record.exc_info[1] else None,
                "traceback": self.formatException(record.exc_info),
            }

        extra = {
            key: _serializable(value)
            for key, value in record.__dict__.items()
            if key not in _ATRIBUTOS_ESTANDAR
        }
        if extra:
            log_data["extra"] = extra

        return json.dumps(log_data, ensure_ascii=False, separators=(",", ":"), default=str)


class LoggerFactory:
    """Factory para crear loggers configurados de manera consistente"""

    _configured = False
    _log_dir: Optional[Path] = None
    _log_level = logging.INFO

    @classmethod
    def setup(
        cls,
        log_dir: Optional[Union[str, Path]] = None,
        log_level: str = "INFO",
        max_file_size: int = 10 * 1024 * 1024,
        backup_count: int = 5,
        console_output: bool = True,
        file_output: bool = True,
        config_dict: Optional[Dict[str, Any]] = None,
        force: bool = False,
    ) -> None:
        """
        Configura el sistema de logging globalmente.

        Args:
            log_dir: Directorio para archivos de log.
            log_level: Nivel de logging.
            max_file_size: Tamaño máximo de archivo antes de rotar.
            backup_count: Número de archivos de backup a mantener.
            console_output: Si mostrar logs en consola (stderr).
            file_output: Si escribir app.log y error.log.
            config_dict: Configuración completa cargada por ConfigLoader.
            force: Reconfigura aunque ya se haya configurado.
        """
        if cls._configured and not force:
            return

        if config_dict and "logging" in config_dict:
            log_config = config_dict["logging"]
            log_dir = log_config.get("directory", log_dir or "logs")
            log_level = log_config.get("level", log_level)
            console_output = log_config.get("console_output", console_output)
            file_output = log_config.get("file_output", file_output)
            if "rotation" in log_config:
                max_file_size = int(log_config["rotation"].get("max_file_size_mb", 10)) * 1024 * 1024
                backup_count = int(log_config["rotation"].get("backup_count", 5))

        cls._log_level = getattr(logging, str(log_level).upper(), logging.INFO)

        root_logger = logging.getLogger()
        root_logger.setLevel(cls._log_level)
        root_logger.handlers.clear()

        if file_output:
            cls._log_dir = Path(log_dir or "logs")
            cls._log_dir.mkdir(parents=True, exist_ok=True)

            file_handler = logging.handlers.RotatingFileHandler(
                cls._log_dir / "app.log",
                maxBytes=max_file_size,
                backupCount=backup_count,
                encoding="utf-8",
            )
            file_handler.setLevel(cls._log_level)
            file_handler.setFormatter(StructuredFormatter())
            root_logger.addHandler(file_handler)

            error_handler = logging.handlers.RotatingFileHandler(
                cls._log_dir / "error.log",
                maxBytes=max_file_size,
                backupCount=backup_count,
                encoding="utf-8",
            )
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(StructuredFormatter())
            root_logger.addHandler(error_handler)

        if console_output:
            # stdout queda libre para la salida del comando
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(cls._log_level)
            console_handler.setFormatter(
                logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
            )
            root_logger.addHandler(console_handler)

        cls._configured = True

    @classmethod
    def reset(cls) -> None:
        """Quita los handlers instalados; usado por los tests."""
        root_logger = logging.getLogger()
        for handler in list(root_logger.handlers):
            handler.close()
        root_logger.handlers.clear()
        cls._configured = False

    @classmethod
    def get_logger(
        cls, name: str, extra_context: Optional[Dict[str, Any]] = None
    ) -> Union[logging.Logger, logging.LoggerAdapter]:
        """
        Obtiene un logger para el módulo especificado.

        La biblioteca no configura handlers por sí misma; la línea de
        comandos llama a :meth:`setup` una vez cargada la configuración.

        Args:
            name: Nombre del logger (generalmente __name__).
            extra_context: Contexto adicional para incluir en logs.
        """
        logger = logging.getLogger(name)
        if extra_context:
            return logging.LoggerAdapter(logger, extra_context)
        return logger

    @classmethod
    def get_module_logger(
        cls, module_name: str, operation: Optional[str] = None
    ) -> Union[logging.Logger, logging.LoggerAdapter]:
        """Logger con el nombre de la operación en curso como contexto."""
        context: Dict[str, Any] = {"component": module_name}
        if operation:
            context["operation"] = operation
        return cls.get_logger(module_name, context)


def get_logger(name: Optional[str] = None, **kwargs: Any) -> Any:
    """
    Función de conveniencia para obtener un logger.

    Args:
        name: Nombre del logger (si no se proporciona, usa el módulo llamador).
        **kwargs: Contexto adicional.
    """
    if name is None:
        import inspect

        frame = inspect.currentframe()
        caller = frame.f_back if frame is not None else None
        name = caller.f_globals.get("__name__", "nlsregime") if caller is not None else "nlsregime"

    return LoggerFactory.get_logger(name, kwargs if kwargs else None)


setup_logging = LoggerFactory.setup
get_module_logger = LoggerFactory.get_module_logger
