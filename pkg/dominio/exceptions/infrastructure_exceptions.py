"""
Infrastructure layer specific exceptions.
"""

import os
from typing import Any, Optional

from .base_exceptions import InfrastructureException


class ConfigurationException(InfrastructureException):
    """
    Configuration loading and validation errors.

    Used when configuration files are missing, malformed, fail schema
    validation or receive overrides for unknown keys.
    """

    def __init__(
        self,
        config_key: str,
        config_file: Optional[str] = None,
        config_type: str = "yaml",
        **kwargs: Any,
    ) -> None:
        context = kwargs.get("context") or {}
        context.update(
            {
                "config_key": config_key,
                "config_file": config_file,
                "config_type": config_type,
                "operation_type": "configuration_loading",
            }
        )
        kwargs["context"] = context

        kwargs.setdefault("user_message", "Error en la configuración")
        kwargs.setdefault(
            "recovery_suggestion",
            f"Verifique el archivo de configuración {config_file or 'principal'} y la clave {config_key}",
        )

        file_info = f" in {config_file}" if config_file else ""
        super().__init__(f"Configuration error: '{config_key}'{file_info}", **kwargs)


class DataAccessException(InfrastructureException):
    """
    File I/O errors while writing reports, with retry context.
    """

    def __init__(
        self,
        file_path: str,
        operation: str,
        retry_count: int = 0,
        max_retries: int = 3,
        **kwargs: Any,
    ) -> None:
        context = kwargs.get("context") or {}
        context.update(
            {
                "file_path": file_path,
                "operation": operation,
                "retry_count": retry_count,
                "max_retries": max_retries,
                "can_retry": retry_count < max_retries,
            }
        )
        directory = os.path.dirname(file_path) or "."
        context["directory_exists"] = os.path.isdir(directory)
        kwargs["context"] = context

        kwargs.setdefault("user_message", f"No se pudo completar '{operation}' sobre {file_path}")
        kwargs.setdefault("recovery_suggestion", "Verifique permisos y espacio en disco")
        super().__init__(f"Data access failed: {operation} on {file_path}", **kwargs)
