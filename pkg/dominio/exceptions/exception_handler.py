"""
Exception handler with recovery strategy integration.
"""

from typing import Any, Callable, Dict, List, Optional

from config.logging_config import get_logger

from .base_exceptions import NlsRegimeException
from .recovery_strategies import RecoveryStrategy, RetryStrategy, StepHalvingStrategy

logger = get_logger(__name__)


class ExceptionHandler:
    """
    Centralized exception handler with recovery strategy support.

    Strategies are tried in order; a strategy that fails with another
    :class:`NlsRegimeException` hands that exception back to the loop, so a
    step halving can be followed by a further halving.
    """

    def __init__(self, strategies: Optional[List[RecoveryStrategy]] = None) -> None:
        self.recovery_strategies: List[RecoveryStrategy] = (
            strategies if strategies is not None else [StepHalvingStrategy(), RetryStrategy()]
        )

    def add_recovery_strategy(self, strategy: RecoveryStrategy) -> None:
        """Add a custom recovery strategy before the generic ones."""
        self.recovery_strategies.insert(0, strategy)

    def handle_exception(
        self,
        exception: BaseException,
        context: Optional[Dict[str, Any]] = None,
        operation_name: Optional[str] = None,
        max_recovery_attempts: int = 3,
    ) -> Any:
        """
        Handle an exception with the registered recovery strategies.

        Args:
            exception: The exception to handle.
            context: Handler context; ``operation`` and ``operation_kwargs``
                allow strategies to re-run the failed call.
            operation_name: Name of the operation that failed.
            max_recovery_attempts: Maximum number of recovery attempts.

        Returns:
            Result from a successful recovery.

        Raises:
            NlsRegimeException: The last exception when recovery fails.
        """
        context = context if context is not None else {}
        if not isinstance(exception, NlsRegimeException):
            exception = self._wrap_exception(exception, context, operation_name)

        attempts = 0
        while attempts < max_recovery_attempts:
            strategy = next(
                (s for s in self.recovery_strategies if s.can_recover(exception, context)), None
            )
            if strategy is None:
                break
            attempts += 1
            logger.info(
                "Intentando recuperación",
                extra={
                    "strategy": strategy.get_strategy_name(),
                    "attempt": attempts,
                    "operation_name": operation_name,
                    "error_code": exception.error_code,
                },
            )
            try:
                return strategy.recover(exception, context)
            except NlsRegimeException as nueva:
                exception = nueva

        logger.error(
            "Recuperación agotada",
            extra={
                "error_code": exception.error_code,
                "recovery_attempts": attempts,
                "operation_name": operation_name,
            },
        )
        raise exception

    def _wrap_exception(
        self,
        exception: BaseException,
        context: Dict[str, Any],
        operation_name: Optional[str],
    ) -> NlsRegimeException:
        from .domain_exceptions import NumericalException
        from .infrastructure_exceptions import DataAccessException

        safe_context = {k: v for k, v in context.items() if k not in ("operation", "operation_kwargs")}
        if isinstance(exception, OSError):
            return DataAccessException(
                file_path=str(getattr(exception, "filename", None) or "unknown"),
                operation=operation_name or "file_operation",
                context=safe_context,
                cause=exception,
            )
        if isinstance(exception, (FloatingPointError, ZeroDivisionError, OverflowError)):
            return NumericalException(
                operation=operation_name or "unknown",
                quantity=type(exception).__name__,
                context=safe_context,
                cause=exception,
            )
        return NlsRegimeException(message=str(exception), context=safe_context, cause=exception)


_global_handler = ExceptionHandler()


def handle_with_recovery(
    operation: Callable[..., Any],
    operation_name: Optional[str] = None,
    context: Optional[Dict[str, Any]] = None,
    max_attempts: int = 3,
    **operation_kwargs: Any,
) -> Any:
    """
    Run an operation and route its failures through the global handler.

    Usage:
        run = handle_with_recovery(
            operation=integrate,
            operation_name="integrate_enls",
            context={"beta": beta},
            refinement=1,
        )
    """
    try:
        return operation(**operation_kwargs)
    except Exception as e:
        handler_context = dict(context or {})
        handler_context["operation"] = operation
        handler_context["operation_kwargs"] = operation_kwargs
        return _global_handler.handle_exception(
            exception=e,
            context=handler_context,
            operation_name=operation_name,
            max_recovery_attempts=max_attempts,
        )


def get_exception_handler() -> ExceptionHandler:
    """Get the global exception handler instance."""
    return _global_handler
