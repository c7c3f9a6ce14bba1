"""
Recovery strategies for exception handling.

A strategy decides whether it can handle an exception and, if so, re-runs the
failed operation with adjusted arguments. The operation and its keyword
arguments travel in the handler context under ``operation`` and
``operation_kwargs``.
"""

import time
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional

from config.logging_config import get_logger

from .base_exceptions import NlsRegimeException

logger = get_logger(__name__)


class RecoveryStrategy(ABC):
    """
    Abstract base class for recovery strategies.
    """

    @abstractmethod
    def can_recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> bool:
        """Check if this strategy can handle the given exception."""

    @abstractmethod
    def recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> Any:
        """Attempt recovery and return the result, or raise."""

    def get_strategy_name(self) -> str:
        """Get human-readable name for this strategy."""
        return self.__class__.__name__


def _operacion(context: Dict[str, Any]) -> Optional[Callable[..., Any]]:
    operation = context.get("operation")
    return operation if callable(operation) else None


class StepHalvingStrategy(RecoveryStrategy):
    """
    Re-runs a time integration with a refined step after a step rejection.

    The operation must accept a ``refinement`` keyword: the integer factor by
    which its number of steps is multiplied.
    """

    def __init__(self, max_halvings: int = 4) -> None:
        self.max_halvings = max_halvings

    def can_recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> bool:
        from .domain_exceptions import StepRejectedException

        if not isinstance(exception, StepRejectedException) or _operacion(context) is None:
            return False
        return int(context.get("halvings", 0)) < self.max_halvings

    def recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> Any:
        operation = _operacion(context)
        if operation is None:
            raise exception
        kwargs = dict(context.get("operation_kwargs", {}))
        halvings = int(context.get("halvings", 0)) + 1
        context["halvings"] = halvings
        kwargs["refinement"] = int(kwargs.get("refinement", 1)) * 2
        context["operation_kwargs"] = kwargs

        logger.info(
            "Reintentando integración con paso reducido",
            extra={
                "strategy": self.get_strategy_name(),
                "halvings": halvings,
                "refinement": kwargs["refinement"],
                "error_code": exception.error_code,
            },
        )
        return operation(**kwargs)


class RetryStrategy(RecoveryStrategy):
    """
    Retry with exponential backoff for transient report I/O failures.
    """

    def __init__(self, max_retries: int = 3, base_delay: float = 0.1, max_delay: float = 2.0) -> None:
        self.max_retries = max_retries
        self.base_delay = base_delay
        self.max_delay = max_delay

    def can_recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> bool:
        from .infrastructure_exceptions import DataAccessException

        if not isinstance(exception, DataAccessException) or _operacion(context) is None:
            return False
        return int(context.get("retry_count", 0)) < self.max_retries

    def recover(self, exception: NlsRegimeException, context: Dict[str, Any]) -> Any:
        operation = _operacion(context)
        if operation is None:
            raise exception
        retry_count = int(context.get("retry_count", 0))
        delay = min(self.base_delay * (2**retry_count), self.max_delay)
        context["retry_count"] = retry_count + 1

        logger.info(
            "Reintentando operación de E/S",
            extra={
                "strategy": self.get_strategy_name(),
                "retry_count": retry_count + 1,
                "delay_seconds": delay,
                "error_code": exception.error_code,
            },
        )
        time.sleep(delay)
        return operation(**context.get("operation_kwargs", {}))
