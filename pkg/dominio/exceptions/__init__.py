"""
Exception hierarchy for nlsregime.

- Base and layer exceptions with structured logging
- Domain exceptions for preconditions, convergence and numerical integrity
- Recovery strategies and the central exception handler
"""

from .base_exceptions import (
    DomainException,
    InfrastructureException,
    NlsRegimeException,
    PresentationException,
)
from .domain_exceptions import (
    ConvergenceException,
    DegenerateBandException,
    NumericalException,
    PreconditionException,
    StepRejectedException,
    ValidationException,
)
from .exception_handler import ExceptionHandler, get_exception_handler, handle_with_recovery
from .infrastructure_exceptions import ConfigurationException, DataAccessException
from .presentation_exceptions import ConsoleException
from .recovery_strategies import RecoveryStrategy, RetryStrategy, StepHalvingStrategy

__all__ = [
    "NlsRegimeException",
    "DomainException",
    "InfrastructureException",
    "PresentationException",
    "ValidationException",
    "PreconditionException",
    "ConvergenceException",
    "StepRejectedException",
    "NumericalException",
    "DegenerateBandException",
    "ConfigurationException",
    "DataAccessException",
    "ConsoleException",
    "RecoveryStrategy",
    "StepHalvingStrategy",
    "RetryStrategy",
    "ExceptionHandler",
    "handle_with_recovery",
    "get_exception_handler",
]
