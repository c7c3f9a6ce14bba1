"""
Tests de la capa de aplicación: configurador, ejecutor, fábrica de
experimentos y controlador.
"""

import json
import threading
import time
from unittest.mock import Mock

import numpy as np
import pytest

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.contenedor.configurador import Configurador, ExperimentConfig
from aplicacion.experimentos import (
    EXPERIMENTOS,
    Barrido,
    BaseExperimento,
    Ejecutor,
    ExperimentoBandas,
    ExperimentoEscalera,
    ExperimentoRectificacion,
    ExperimentoSoliton,
    ExperimentoSuperposicion,
    ExperimentoSupresion,
    FactoryExperimento,
)
from aplicacion.managers.controlador_experimentos import (
    ControladorExperimentos,
    experimentos_disponibles,
    report_de_error,
)
from config.config_loader import load_config
from dominio.exceptions import (
    NlsRegimeException,
    PreconditionException,
    StepHalvingStrategy,
    StepRejectedException,
    ValidationException,
    get_exception_handler,
)

CONTROLADOR = "aplicacion.managers.controlador_experimentos"


@pytest.fixture(scope="module")
def config():
    return load_config(environment="testing")


@pytest.fixture
def configurador(config):
    return Configurador(config)


def _escalas(**changes):
    base = dict(c_alpha=1.0, kappa0=2.0, c_rho=1.0, kappa1=2.0, alpha0=1.0, tau_star=1.0, beta_sweep=(0.2, 0.1))
    base.update(changes)
    return ExperimentConfig(**base)


@pytest.mark.unit
class TestExperimentConfig:
    """Escalas alpha(beta), rho(beta) y ventana no lineal"""

    def test_scalings(self):
        escalas = _escalas(c_alpha=0.5, kappa0=3.0, kappa1=1.0)
        assert escalas.alpha(0.1) == pytest.approx(5e-4)
        assert escalas.rho(0.1) == pytest.approx(0.1)

    def test_window_at_boundary_accepted(self):
        _escalas().check_sweep()

    def test_window_violated(self):
        with pytest.raises(PreconditionException) as exc_info:
            _escalas(kappa0=1.0).check(0.1)
        assert exc_info.value.context["invariant"] == "tau_star / rho <= alpha0 / alpha"

    def test_from_config_changes(self, config):
        escalas = ExperimentConfig.from_config(config, c_alpha=0.25, c_rho=None)
        assert escalas.c_alpha == 0.25
        assert escalas.c_rho == float(config["scaling"]["c_rho"])
        assert escalas.to_dict()["beta_sweep"] == [0.2, 0.14, 0.1]


@pytest.mark.unit
class TestConfigurador:
    """Construcción de objetos del dominio"""

    def test_execution_settings(self, configurador):
        assert configurador.jobs == 1
        assert configurador.max_halvings == 4

    def test_model_is_shared(self, configurador):
        assert configurador.crear_modelo() is configurador.crear_modelo()
        assert configurador.crear_modelo().n_bands == 2

    def test_jet_at_carrier(self, configurador):
        jet = configurador.crear_jet()
        assert jet.velocity == pytest.approx(np.sin(np.pi / 3))
        assert jet.gammas(2)[2] == pytest.approx(np.cos(np.pi / 3) / 2)

    def test_second_carrier(self, configurador):
        assert configurador.crear_jet(2.6).velocity == pytest.approx(np.sin(2.6))

    def test_grid_from_beta(self, configurador):
        grid = configurador.crear_grilla(0.2)
        assert grid.x.size == 512

    def test_repository_directory(self, configurador, tmp_path):
        repositorio = configurador.crear_repositorio(str(tmp_path))
        assert repositorio.contexto.recurso == str(tmp_path)

    def test_record_taus(self, configurador):
        taus = configurador.record_taus(0.1, 1.0)
        assert taus[0] == 0.1 and taus[-1] == 1.0


@pytest.mark.unit
class TestEjecutor:
    """Pool acotado con resultados en orden"""

    def test_sequential(self):
        barrido = Ejecutor(1).barrer(lambda x: x * x, [3, 1, 2])
        assert barrido.resultados == [9, 1, 4]
        assert barrido.completo

    def test_pool_keeps_submission_order(self):
        def lento(x):
            time.sleep(0.01 * (4 - x))
            return x, threading.current_thread().name

        barrido = Ejecutor(3).barrer(lento, [1, 2, 3, 4])
        assert [r[0] for r in barrido.resultados] == [1, 2, 3, 4]

    @pytest.mark.parametrize("jobs", [1, 2])
    def test_failure_keeps_prefix(self, jobs):
        def fn(x):
            if x == 3:
                raise PreconditionException(operation="punto", invariant="x != 3")
            return x

        barrido = Ejecutor(jobs).barrer(fn, [1, 2, 3, 4])
        assert barrido.resultados == [1, 2]
        assert isinstance(barrido.error, PreconditionException)
        assert not barrido.completo

    def test_jobs_at_least_one(self):
        assert Ejecutor(0).jobs == 1


class _Integracion(BaseExperimento):
    nombre = "integracion"

    def ejecutar(self):
        return []


@pytest.mark.unit
class TestBaseExperimento:
    """Opciones, recuperación y cierre de barridos"""

    def test_options(self, configurador):
        experimento = FactoryExperimento.obtener_experimento("ladder", configurador)
        assert experimento.opcion("min_fit_points") == 2
        assert experimento.tolerancia("residual") == 1e-10
        assert experimento.opcion("inexistente", 7) == 7

    def test_integration_refines_step(self, configurador):
        for strategy in get_exception_handler().recovery_strategies:
            if isinstance(strategy, StepHalvingStrategy):
                strategy.max_halvings = 4
        calls = []

        def integrate(x, refinement):
            calls.append(refinement)
            if refinement < 4:
                raise StepRejectedException(operation="integrate", step=1.0 / refinement, measure=1.0, limit=0.1)
            return x * refinement

        assert _Integracion(configurador).integrar(integrate, "integrate", {}, x=2.0) == 8.0
        assert calls == [1, 2, 4]

    def test_close_records_error(self):
        report = ScalingReport(name="ladder", x_column="beta", columns=("beta",))
        error = PreconditionException(operation="punto", invariant="inv")
        ExperimentoBandas.cerrar(report, Barrido([], error))
        assert report.error == error.user_message
        assert report.notes["error"]["error_type"] == "PreconditionException"

    def test_close_complete_sweep(self):
        report = ScalingReport(name="ladder", x_column="beta", columns=("beta",))
        assert ExperimentoBandas.cerrar(report, Barrido([1])).error is None


@pytest.mark.unit
class TestFactoryExperimento:
    """Un experimento por subcomando"""

    def test_names(self):
        assert EXPERIMENTOS == (
            "bands", "rectify", "integrals", "enls", "lattice", "ladder", "suppression", "superposition", "soliton"
        )
        assert experimentos_disponibles() == list(EXPERIMENTOS)

    @pytest.mark.parametrize("nombre", EXPERIMENTOS)
    def test_builds_each(self, configurador, nombre):
        experimento = FactoryExperimento.obtener_experimento(nombre, configurador)
        assert experimento.nombre == nombre

    def test_unknown(self, configurador):
        with pytest.raises(ValidationException) as exc_info:
            FactoryExperimento.obtener_experimento("ladders", configurador)
        assert "ladder" in exc_info.value.context["expected_format"]


@pytest.mark.integration
class TestExperimentos:
    """Experimentos livianos con la configuración de testing"""

    def test_bands(self, configurador):
        (report,) = ExperimentoBandas(configurador).ejecutar()
        assert report.name == "bands_jet"
        assert report.column("order").tolist() == [0.0, 1.0, 2.0, 3.0, 4.0]
        assert report.column("gamma")[0] == pytest.approx(2.0 - np.cos(np.pi / 3))
        assert report.tables[0].columns == ("k", "omega_1", "omega_2")
        assert len(report.tables[0].rows) == 129
        assert report.notes["genericity"]["generic"] in (True, False)

    def test_rectify_structure(self, configurador):
        reports = ExperimentoRectificacion(configurador).ejecutar()
        names = [r.name for r in reports]
        assert names[:4] == [f"rectify_sqrt_1_k_2_nu{nu}" for nu in (1, 2, 3, 4)]
        assert len(reports) == 12
        for report in reports:
            assert len(report.rows) == 5
            assert report.tables[0].name == f"{report.name}_sweep"
            assert len(report.tables[0].rows) == 41
            assert set(report.evaluate().verdicts) == {"deviation:slope", "residual:max_le"}

    def test_rectify_first_order_deviation(self, configurador):
        report = ExperimentoRectificacion(configurador).ejecutar()[0].evaluate()
        assert report.slopes["deviation"].slope == pytest.approx(2.0, abs=0.3)


def _configurador(*overrides):
    return Configurador(load_config(environment="testing", overrides=list(overrides)))


@pytest.mark.slow
@pytest.mark.integration
class TestExperimentosReferencia:
    """Experimentos contra la referencia modal, con barridos de dos puntos"""

    def test_ladder_rows(self):
        configurador = _configurador("scaling.beta_sweep=[0.2,0.14]")
        (report,) = ExperimentoEscalera(configurador).ejecutar()
        assert report.error is None
        assert report.column("beta").tolist() == [0.2, 0.14]
        for name in ("error_nls2", "error_enls3", "error_enls4"):
            errors = report.column(name)
            assert np.all(np.isfinite(errors)) and np.all(errors > 0.0)
        assert report.column("excluded").tolist() == [0.0, 0.0]
        assert set(report.evaluate().verdicts) == {"error_nls2:slope", "error_enls3:slope", "error_enls4:slope"}
        nls2, enls3, enls4 = (report.column(n)[-1] for n in ("error_nls2", "error_enls3", "error_enls4"))
        assert enls4 < enls3 < nls2
        assert report.column("error_nls2")[1] < report.column("error_nls2")[0]

    def test_ladder_completes_below_softening(self):
        configurador = _configurador("scaling.beta_sweep=[0.16,0.11]")
        (report,) = ExperimentoEscalera(configurador).ejecutar()
        assert report.error is None
        assert report.column("beta").tolist() == [0.16, 0.11]
        assert np.all(np.isfinite(report.column("error_nls2")))

    def test_ladder_default_indirect_is_time_harmonic(self, monkeypatch):
        configurador = _configurador("scaling.beta_sweep=[0.2,0.14]")
        assert configurador.valor("reference.indirect") == "quasi_static"
        experimento = ExperimentoEscalera(configurador)
        original = experimento.referencia_modal
        linealizadas = []

        def _registrar(exc, **options):
            linealizadas.append(bool(options.get("linearized", False)))
            return original(exc, **options)

        monkeypatch.setattr(experimento, "referencia_modal", _registrar)
        experimento._errores(0.2)
        assert linealizadas == [False]

    def test_suppression_rows(self):
        configurador = _configurador("experiments.suppression.rhos=[0.08,0.04]")
        (report,) = ExperimentoSupresion(configurador).ejecutar()
        assert report.error is None
        assert report.column("rho").tolist() == [0.08, 0.04]
        assert np.all(report.column("direct") > 0.0)
        assert report.notes["genericity"]["margins"]["third_harmonic"] > 0.0
        nonfm = report.column("nonfm_ratio")
        assert nonfm[1] < nonfm[0]

    def test_superposition_rows(self):
        configurador = _configurador("experiments.superposition.ratios=[0.1,0.046]")
        (report,) = ExperimentoSuperposicion(configurador).ejecutar()
        assert report.error is None
        assert report.column("rho") == pytest.approx([0.02, 0.0092])
        assert report.notes["velocities"] == pytest.approx([np.sin(np.pi / 3), np.sin(2.6)])
        assert np.all(report.column("same_doublet") > 0.0)
        residual, same = report.column("residual"), report.column("same_doublet")
        assert residual[1] / residual[0] < same[1] / same[0]

    def test_superposition_needs_distinct_velocities(self):
        configurador = _configurador("experiments.superposition.second.k_star=2.0944")
        with pytest.raises(PreconditionException):
            ExperimentoSuperposicion(configurador).ejecutar()

    def test_soliton_trace(self):
        # 2048 puntos sobre 40 anchos: más de 32 puntos por ancho del pulso
        configurador = _configurador("experiments.soliton.samples=3", "experiments.soliton.tau_end=0.2")
        (report,) = ExperimentoSoliton(configurador).ejecutar()
        assert report.column("tau") == pytest.approx([0.0, 0.1, 0.2])
        assert report.column("peak_nl")[0] == report.column("peak_lin")[0]
        assert report.notes["amplitude"] > 0.0


@pytest.mark.unit
class TestControlador:
    """Orquestación y emisión"""

    def test_configures_step_halving(self, config):
        changed = {**config, "execution": {**config["execution"], "max_halvings": 2}}
        ControladorExperimentos(changed)
        budgets = [s.max_halvings for s in get_exception_handler().recovery_strategies if isinstance(s, StepHalvingStrategy)]
        assert budgets == [2]
        ControladorExperimentos(config)

    def test_domain_failure_becomes_report(self, config, mocker):
        experimento = Mock()
        experimento.ejecutar.side_effect = PreconditionException(operation="run_suppression", invariant="generic")
        mocker.patch(f"{CONTROLADOR}.FactoryExperimento.obtener_experimento", return_value=experimento)
        (report,) = ControladorExperimentos(config).ejecutar(["suppression"])
        assert report.name == "suppression"
        assert report.error
        assert report.verdicts == {"completed": False}
        assert report.notes["error"]["context"]["invariant"] == "generic"

    def test_unexpected_failure_wrapped(self, config, mocker):
        experimento = Mock()
        experimento.ejecutar.side_effect = KeyError("gammas")
        mocker.patch(f"{CONTROLADOR}.FactoryExperimento.obtener_experimento", return_value=experimento)
        with pytest.raises(NlsRegimeException) as exc_info:
            ControladorExperimentos(config).ejecutar_experimento("ladder")
        assert isinstance(exc_info.value.cause, KeyError)

    def test_error_report(self):
        report = report_de_error("lattice", PreconditionException(operation="op", invariant="inv")).evaluate()
        assert not report.passed
        assert report.rows == []

    def test_emit_exit_status(self, config, tmp_path):
        ok = ScalingReport(name="ok", x_column="x", columns=("x", "y"), criteria=(Criterion("y", "max_le", 1.0),))
        ok.add_row({"x": 1.0, "y": 0.5})
        fail = ScalingReport(name="fail", x_column="x", columns=("x", "y"), criteria=(Criterion("y", "max_le", 0.1),))
        fail.add_row({"x": 1.0, "y": 0.5})
        controlador = ControladorExperimentos(config)
        assert controlador.emitir([ok.evaluate()], str(tmp_path / "a")) == 0
        assert controlador.emitir([ok.evaluate(), fail.evaluate()], str(tmp_path / "b")) == 2
        summary = json.loads((tmp_path / "b" / "summary.json").read_text(encoding="utf-8"))
        assert summary["experiments"][1]["verdicts"] == {"y:max_le": False}
        assert summary["config"]["app"]["environment"] == "testing"

    @pytest.mark.integration
    def test_bands_end_to_end(self, config, tmp_path):
        status = ControladorExperimentos(config).ejecutar_y_emitir(["bands"], str(tmp_path))
        assert status == 0
        assert {p.name for p in tmp_path.iterdir()} == {"bands_jet.csv", "bands.csv", "summary.json"}
