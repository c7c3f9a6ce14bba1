"""
Domain layer specific exceptions.

Each class enriches the context dictionary with the quantities needed to
reproduce the failure: the operation, the violated invariant, the iteration
counts of a solver or the step size that was rejected.
"""

from typing import Any, Optional

from .base_exceptions import DomainException


def _enriquecer(kwargs: dict, extra: dict) -> None:
    context = kwargs.get("context") or {}
    context.update(extra)
    kwargs["context"] = context


class ValidationException(DomainException):
    """
    Invalid input data for a model, a map or an excitation.

    Used when a dispersion family is not even, bands are not ordered, a
    profile parameter is outside its admissible range, and similar.
    """

    def __init__(
        self,
        field: str,
        value: Any,
        rule: str,
        expected: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        _enriquecer(
            kwargs,
            {
                "field": field,
                "invalid_value": str(value)[:100],
                "validation_rule": rule,
                "expected_format": expected,
            },
        )
        kwargs.setdefault("user_message", f"Valor inválido para {field}")
        kwargs.setdefault("recovery_suggestion", f"Verifique que {field} cumple con: {rule}")
        super().__init__(f"Validation failed for '{field}': {rule}", **kwargs)


class PreconditionException(DomainException):
    """
    A precondition of an operation does not hold.

    The violated invariant is named in the message so that the command line
    can report it verbatim.
    """

    def __init__(self, operation: str, invariant: str, **kwargs: Any) -> None:
        _enriquecer(kwargs, {"operation": operation, "invariant": invariant})
        kwargs.setdefault("user_message", f"No se cumple una precondición de {operation}")
        kwargs.setdefault("recovery_suggestion", f"Ajuste la configuración para que valga: {invariant}")
        super().__init__(f"Precondition failed in {operation}: {invariant}", **kwargs)


class ConvergenceException(DomainException):
    """An iterative method, a quadrature or a derivative estimate did not converge."""

    def __init__(
        self,
        operation: str,
        iterations: Optional[int] = None,
        residual: Optional[float] = None,
        tolerance: Optional[float] = None,
        **kwargs: Any,
    ) -> None:
        _enriquecer(
            kwargs,
            {
                "operation": operation,
                "iterations": iterations,
                "residual": residual,
                "tolerance": tolerance,
            },
        )
        kwargs.setdefault("user_message", f"El método numérico de {operation} no convergió")
        kwargs.setdefault(
            "recovery_suggestion", "Reduzca el dominio, afine la grilla o relaje la tolerancia"
        )
        detail = f" (residual {residual:.3e} > {tolerance:.1e})" if residual is not None and tolerance else ""
        super().__init__(f"Convergence failed in {operation}{detail}", **kwargs)


class StepRejectedException(DomainException):
    """
    A time step was rejected by the nonlinear-phase criterion.

    Carries the step size and the measured phase so that a recovery strategy
    can retry the integration with a refined step.
    """

    def __init__(self, operation: str, step: float, measure: float, limit: float, **kwargs: Any) -> None:
        _enriquecer(
            kwargs, {"operation": operation, "step": step, "measure": measure, "limit": limit}
        )
        kwargs.setdefault("user_message", "Paso temporal rechazado")
        kwargs.setdefault("recovery_suggestion", "Aumente el número de pasos del integrador")
        super().__init__(
            f"Step rejected in {operation}: nonlinear phase {measure:.3e} > {limit:.3e} (dt={step:.3e})",
            **kwargs,
        )


class NumericalException(DomainException):
    """
    Loss of numerical integrity: NaN/Inf values, aliasing or boundary leaks.
    """

    def __init__(self, operation: str, quantity: str, value: Optional[float] = None, **kwargs: Any) -> None:
        _enriquecer(kwargs, {"operation": operation, "quantity": quantity, "value": value})
        kwargs.setdefault("user_message", f"Pérdida de integridad numérica en {operation}")
        kwargs.setdefault("recovery_suggestion", "Amplíe la grilla o reduzca la amplitud")
        detail = f" = {value:.3e}" if value is not None else ""
        super().__init__(f"Numerical failure in {operation}: {quantity}{detail}", **kwargs)


class DegenerateBandException(DomainException):
    """Two bands are closer than the degeneracy threshold at a requested point."""

    def __init__(self, band: int, k: float, gap: float, **kwargs: Any) -> None:
        _enriquecer(kwargs, {"band": band, "k": k, "gap": gap})
        kwargs.setdefault("user_message", "Bandas degeneradas en el punto solicitado")
        kwargs.setdefault("recovery_suggestion", "Elija otro k★ o otra banda")
        super().__init__(f"Band {band} is degenerate at k={k:.6f} (gap {gap:.3e})", **kwargs)
