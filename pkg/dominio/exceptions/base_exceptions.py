"""
Base exception classes with structured logging integration.

Every exception raised by nlsregime derives from :class:`NlsRegimeException`,
which records a context dictionary, a user-facing message and a recovery
suggestion, and logs itself through the structured logger on construction.
"""

import time
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from config.logging_config import get_logger


class NlsRegimeException(Exception):
    """
    Base exception class for the nlsregime library.

    Features:
    - Automatic structured logging on construction
    - Context dictionary with the numeric state that triggered the failure
    - User-friendly message and recovery suggestion for the CLI
    - Unique error codes for correlation across log files
    """

    def __init__(
        self,
        message: str,
        user_message: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        recovery_suggestion: Optional[str] = None,
        error_code: Optional[str] = None,
        cause: Optional[BaseException] = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.user_message = user_message or message
        self.context: Dict[str, Any] = context or {}
        self.recovery_suggestion = recovery_suggestion
        self.error_code = error_code or self._generate_error_code()
        self.cause = cause
        self.timestamp = datetime.now(timezone.utc)

        self._log_exception()

    def _generate_error_code(self) -> str:
        """Generate unique error code for tracking and correlation."""
        return f"{self.__class__.__name__}_{int(time.time() * 1000)}"

    def _log_exception(self) -> None:
        try:
            logger = get_logger(self.__class__.__module__)
            logger.warning(
                f"Excepción: {self.__class__.__name__}",
                extra={
                    "error_code": self.error_code,
                    "error_type": self.__class__.__name__,
                    "error_message": self.message,
                    "context": self.context,
                    "recovery_suggestion": self.recovery_suggestion,
                    "cause": str(self.cause) if self.cause else None,
                },
            )
        except Exception:
            # logging must never mask the original failure
            pass

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to a dictionary for reports and CLI output."""
        return {
            "error_code": self.error_code,
            "error_type": self.__class__.__name__,
            "message": self.message,
            "user_message": self.user_message,
            "context": self.context,
            "recovery_suggestion": self.recovery_suggestion,
            "timestamp": self.timestamp.isoformat(),
        }

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.error_code}): {self.message}"

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}("
            f"error_code='{self.error_code}', "
            f"message='{self.message}', "
            f"context={self.context})"
        )


class DomainException(NlsRegimeException):
    """
    Base class for domain layer exceptions.

    Domain exceptions represent violated preconditions of the numerical
    operations, failed convergence of iterative methods and invalid model data.
    """

    def __init__(self, message: str, **kwargs: Any) -> None:
        kwargs.setdefault("user_message", "Error en el cálculo numérico")
        kwargs.setdefault(
            "recovery_suggestion", "Verifique los parámetros del modelo y de la excitación"
        )
        super().__init__(message, **kwargs)


class InfrastructureException(NlsRegimeException):
    """
    Base class for infrastructure layer exceptions.

    Infrastructure exceptions represent failures in configuration loading and
    report persistence.
    """

    def __init__(self, message: str, **kwargs: Any) -> None:
        kwargs.setdefault("user_message", "Error técnico del sistema")
        kwargs.setdefault("recovery_suggestion", "Revise los archivos y permisos involucrados")
        super().__init__(message, **kwargs)


class PresentationException(NlsRegimeException):
    """Base class for command-line layer exceptions."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        kwargs.setdefault("user_message", "Error en la línea de comandos")
        kwargs.setdefault("recovery_suggestion", "Consulte 'nlsregime --help'")
        super().__init__(message, **kwargs)
