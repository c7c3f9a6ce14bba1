"""
Tests de la jerarquía de excepciones y de las estrategias de recuperación.
"""

from unittest.mock import Mock, patch

import pytest

from dominio.exceptions import (
    ConfigurationException,
    ConsoleException,
    ConvergenceException,
    DataAccessException,
    DegenerateBandException,
    DomainException,
    ExceptionHandler,
    InfrastructureException,
    NlsRegimeException,
    NumericalException,
    PreconditionException,
    PresentationException,
    RetryStrategy,
    StepHalvingStrategy,
    StepRejectedException,
    ValidationException,
    handle_with_recovery,
)


def _rechazo(refinement: int) -> StepRejectedException:
    return StepRejectedException(operation="integrate_enls", step=0.1 / refinement, measure=0.3, limit=0.1)


@pytest.mark.unit
class TestBaseExceptions:
    """Excepción base y serialización"""

    def test_creation(self):
        exception = NlsRegimeException(
            message="Test error",
            user_message="Error para el usuario",
            context={"beta": 0.1},
            recovery_suggestion="Reduzca beta",
        )
        assert exception.message == "Test error"
        assert exception.user_message == "Error para el usuario"
        assert exception.context["beta"] == 0.1
        assert exception.recovery_suggestion == "Reduzca beta"
        assert exception.error_code.startswith("NlsRegimeException_")

    def test_user_message_defaults_to_message(self):
        assert NlsRegimeException("solo mensaje").user_message == "solo mensaje"

    def test_to_dict(self):
        data = NlsRegimeException("Test error", context={"key": "value"}).to_dict()
        assert set(data) == {
            "error_code", "error_type", "message", "user_message", "context", "recovery_suggestion", "timestamp"
        }
        assert data["error_type"] == "NlsRegimeException"
        assert data["context"]["key"] == "value"

    def test_string_representation(self):
        exception = NlsRegimeException("Test error")
        assert "NlsRegimeException" in str(exception)
        assert "Test error" in str(exception)
        assert "error_code" in repr(exception)

    def test_layer_defaults(self):
        assert DomainException("x").user_message == "Error en el cálculo numérico"
        assert InfrastructureException("x").user_message == "Error técnico del sistema"
        assert "--help" in PresentationException("x").recovery_suggestion

    @patch("dominio.exceptions.base_exceptions.get_logger")
    def test_logs_on_construction(self, mock_get_logger):
        mock_logger = Mock()
        mock_get_logger.return_value = mock_logger
        ValidationException(field="family", value="tan", rule="known family")
        args, kwargs = mock_logger.warning.call_args
        assert "ValidationException" in args[0]
        assert kwargs["extra"]["context"]["field"] == "family"

    @patch("dominio.exceptions.base_exceptions.get_logger", side_effect=RuntimeError("sin logging"))
    def test_logging_failure_does_not_mask(self, _):
        exception = NlsRegimeException("sigue")
        assert exception.message == "sigue"


@pytest.mark.unit
class TestDomainExceptions:
    """Excepciones del dominio numérico"""

    def test_validation(self):
        e = ValidationException(field="sigma", value=-1, rule="sigma > 0", expected="positive float")
        assert isinstance(e, DomainException)
        assert e.context["field"] == "sigma"
        assert e.context["invalid_value"] == "-1"
        assert e.context["validation_rule"] == "sigma > 0"
        assert e.context["expected_format"] == "positive float"

    def test_precondition_names_invariant(self):
        e = PreconditionException(operation="run_soliton_balance", invariant="gamma2 * Im Q_plus > 0")
        assert "gamma2 * Im Q_plus > 0" in e.message
        assert "gamma2 * Im Q_plus > 0" in e.recovery_suggestion
        assert e.context["operation"] == "run_soliton_balance"

    def test_precondition_keeps_context(self):
        e = PreconditionException(operation="op", invariant="inv", context={"beta": 0.5})
        assert e.context == {"beta": 0.5, "operation": "op", "invariant": "inv"}

    def test_convergence_detail(self):
        e = ConvergenceException(operation="y_inverse", iterations=50, residual=1e-3, tolerance=1e-12)
        assert "1.000e-03" in e.message
        assert e.context["iterations"] == 50

    def test_step_rejected(self):
        e = StepRejectedException(operation="integrate_modal", step=0.05, measure=0.2, limit=0.1)
        assert e.context["step"] == 0.05
        assert "dt=5.000e-02" in e.message

    def test_numerical(self):
        e = NumericalException(operation="integrate_lattice", quantity="boundary_mass", value=1e-3)
        assert e.context["quantity"] == "boundary_mass"
        assert "boundary_mass = 1.000e-03" in e.message

    def test_degenerate_band(self):
        e = DegenerateBandException(band=2, k=3.14159, gap=1e-10)
        assert e.context["band"] == 2
        assert "degenerate" in e.message


@pytest.mark.unit
class TestInfrastructureExceptions:
    """Configuración y E/S"""

    def test_configuration(self):
        e = ConfigurationException(config_key="scaling.beta", config_file="run.json", config_type="json")
        assert isinstance(e, InfrastructureException)
        assert e.context["config_key"] == "scaling.beta"
        assert "run.json" in e.recovery_suggestion

    def test_data_access(self, tmp_path):
        e = DataAccessException(file_path=str(tmp_path / "ladder.csv"), operation="write", retry_count=1)
        assert e.context["can_retry"] is True
        assert e.context["directory_exists"] is True

    def test_data_access_exhausted(self):
        e = DataAccessException(file_path="/no/existe/x.csv", operation="write", retry_count=3, max_retries=3)
        assert e.context["can_retry"] is False
        assert e.context["directory_exists"] is False

    def test_console(self):
        e = ConsoleException(command="ladder", command_args=["--set", "x"], user_input="x")
        assert isinstance(e, PresentationException)
        assert e.context["command"] == "ladder"
        assert e.context["command_args"] == ["--set", "x"]


@pytest.mark.unit
class TestRecoveryStrategies:
    """Reducción de paso y reintentos"""

    def test_step_halving_refines_until_accepted(self):
        calls = []

        def integrate(refinement=1):
            calls.append(refinement)
            if refinement < 4:
                raise _rechazo(refinement)
            return refinement

        handler = ExceptionHandler([StepHalvingStrategy(max_halvings=4)])
        context = {"operation": integrate, "operation_kwargs": {"refinement": 1}}
        assert handler.handle_exception(_rechazo(1), context, "integrate", max_recovery_attempts=5) == 4
        assert calls == [2, 4]
        assert context["halvings"] == 2

    def test_step_halving_budget(self):
        def integrate(refinement=1):
            raise _rechazo(refinement)

        handler = ExceptionHandler([StepHalvingStrategy(max_halvings=2)])
        context = {"operation": integrate, "operation_kwargs": {"refinement": 1}}
        with pytest.raises(StepRejectedException):
            handler.handle_exception(_rechazo(1), context, "integrate", max_recovery_attempts=10)
        assert context["halvings"] == 2

    def test_step_halving_ignores_other_errors(self):
        strategy = StepHalvingStrategy()
        context = {"operation": lambda refinement=1: None}
        assert not strategy.can_recover(NumericalException(operation="x", quantity="nan"), context)

    def test_step_halving_needs_callable(self):
        strategy = StepHalvingStrategy()
        assert not strategy.can_recover(_rechazo(1), {"operation": "integrate_enls"})

    def test_retry_recovers_io(self):
        attempts = {"n": 0}

        def write():
            attempts["n"] += 1
            if attempts["n"] < 2:
                raise DataAccessException(file_path="x.csv", operation="write")
            return "ok"

        handler = ExceptionHandler([RetryStrategy(max_retries=3, base_delay=0.0)])
        context = {"operation": write, "operation_kwargs": {}}
        first = DataAccessException(file_path="x.csv", operation="write")
        assert handler.handle_exception(first, context, "write") == "ok"
        assert context["retry_count"] == 2


@pytest.mark.unit
class TestExceptionHandler:
    """Envoltura y recuperación centralizada"""

    def test_default_strategies(self):
        names = [s.get_strategy_name() for s in ExceptionHandler().recovery_strategies]
        assert names == ["StepHalvingStrategy", "RetryStrategy"]

    def test_add_strategy_first(self):
        handler = ExceptionHandler()
        custom = RetryStrategy()
        handler.add_recovery_strategy(custom)
        assert handler.recovery_strategies[0] is custom

    @pytest.mark.parametrize(
        "error, expected",
        [
            (OSError("disco lleno"), DataAccessException),
            (FloatingPointError("overflow"), NumericalException),
            (ZeroDivisionError("división"), NumericalException),
            (ValueError("otro"), NlsRegimeException),
        ],
    )
    def test_wrap(self, error, expected):
        wrapped = ExceptionHandler()._wrap_exception(error, {"beta": 0.1, "operation": print}, "op")
        assert type(wrapped) is expected
        assert wrapped.cause is error
        assert wrapped.context["beta"] == 0.1

    def test_handle_with_recovery_success(self):
        assert handle_with_recovery(operation=lambda x: 2 * x, operation_name="doble", x=3) == 6

    def test_handle_with_recovery_wraps(self):
        def failing():
            raise ValueError("boom")

        with pytest.raises(NlsRegimeException) as exc_info:
            handle_with_recovery(operation=failing, operation_name="failing", max_attempts=1)
        assert isinstance(exc_info.value.cause, ValueError)

    def test_handle_with_recovery_reraises_domain(self):
        def failing():
            raise PreconditionException(operation="run_suppression", invariant="generic at third harmonic")

        with pytest.raises(PreconditionException) as exc_info:
            handle_with_recovery(operation=failing, operation_name="run_suppression", max_attempts=1)
        assert exc_info.value.context["invariant"] == "generic at third harmonic"
