"""
Tests de la consola nlsregime.
"""

import json
from unittest.mock import MagicMock

import pytest
from click.testing import CliRunner

from aplicacion.ajuste import Criterion, ScalingReport
from config.config_loader import load_config
from config.logging_config import LoggerFactory
from dominio.exceptions import ConfigurationException
from presentacion.consola import lanzador
from presentacion.consola.lanzador import EXIT_ERROR, EXIT_FALLO, EXIT_OK, cli, main

LANZADOR = "presentacion.consola.lanzador"


@pytest.fixture(autouse=True)
def _logging():
    yield
    LoggerFactory.reset()


@pytest.fixture
def controlador(mocker):
    """Controller double returning one failing report."""
    report = ScalingReport(name="ladder", x_column="beta", columns=("beta", "e1"), criteria=(Criterion("e1", "max_le", 0.0),))
    report.add_row({"beta": 0.1, "e1": 1.0})
    instancia = MagicMock()
    instancia.ejecutar.return_value = [report.evaluate()]
    instancia.emitir.return_value = EXIT_FALLO
    instancia.configurador.crear_repositorio.return_value.contexto.recurso = "resultados"
    return mocker.patch(f"{LANZADOR}.ControladorExperimentos", return_value=instancia)


@pytest.mark.unit
class TestAyuda:
    """Grupo de comandos y ayuda"""

    def test_help_lists_experiments(self):
        result = CliRunner().invoke(cli, ["--help"])
        assert result.exit_code == 0
        for nombre in ("bands", "rectify", "integrals", "enls", "lattice", "ladder", "suppression", "superposition", "soliton"):
            assert nombre in result.output

    def test_main_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "--set" in capsys.readouterr().out

    def test_unknown_subcommand(self, capsys):
        assert main(["ladders"]) == EXIT_ERROR
        assert "ladders" in capsys.readouterr().err

    def test_invalid_jobs(self, capsys):
        assert main(["--jobs", "0", "bands"]) == EXIT_ERROR
        assert "Sugerencia" in capsys.readouterr().err


@pytest.mark.unit
class TestCodigosDeSalida:
    """0, 1 y 2 según veredictos y errores"""

    def test_failing_verdict_exits_two(self, controlador, capsys):
        assert main(["--env", "testing", "ladder"]) == EXIT_FALLO
        out = capsys.readouterr().out
        assert "ladder: FAIL" in out
        assert "NO  e1:max_le" in out
        controlador.return_value.ejecutar.assert_called_once_with(["ladder"])

    def test_missing_config_exits_one(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "classical.json"), "ladder"]) == EXIT_ERROR
        assert "No existe el archivo de configuración" in capsys.readouterr().err

    def test_json_syntax_error_reports_position(self, tmp_path, capsys):
        archivo = tmp_path / "run.json"
        archivo.write_text('{"scaling": {"c_alpha": }}', encoding="utf-8")
        assert main(["--config", str(archivo), "ladder"]) == EXIT_ERROR
        assert "línea 1, columna" in capsys.readouterr().err

    def test_unknown_override_key(self, capsys):
        assert main(["--env", "testing", "--set", "scaling.beta_sweeps=[0.1]", "bands"]) == EXIT_ERROR
        assert "scaling.beta_sweeps" in capsys.readouterr().err

    def test_failure_prints_suggestion(self, controlador, capsys):
        controlador.return_value.ejecutar.side_effect = ConfigurationException(
            config_key="output.directory", recovery_suggestion="Indique --out"
        )
        assert main(["--env", "testing", "ladder"]) == EXIT_ERROR
        err = capsys.readouterr().err
        assert "Error en la configuración" in err
        assert "Sugerencia: Indique --out" in err


@pytest.mark.unit
class TestOpciones:
    """Overrides, jobs y directorio de salida"""

    def test_jobs_from_environment(self, controlador, mocker, monkeypatch):
        monkeypatch.setenv("NLSREGIME_JOBS", "3")
        spy = mocker.patch(f"{LANZADOR}.load_config", wraps=load_config)
        main(["--env", "testing", "ladder"])
        assert "execution.jobs=3" in spy.call_args.kwargs["overrides"]
        config = controlador.call_args.args[0]
        assert config["execution"]["jobs"] == 3

    def test_jobs_flag_wins(self, controlador, monkeypatch):
        monkeypatch.setenv("NLSREGIME_JOBS", "3")
        main(["--env", "testing", "--jobs", "2", "ladder"])
        assert controlador.call_args.args[0]["execution"]["jobs"] == 2

    def test_out_directory_forwarded(self, controlador):
        main(["--env", "testing", "--out", "corrida", "ladder"])
        controlador.return_value.emitir.assert_called_once()
        assert controlador.return_value.emitir.call_args.args[1] == "corrida"

    def test_user_file_and_override(self, controlador, tmp_path):
        archivo = tmp_path / "classical.json"
        archivo.write_text(json.dumps({"scaling": {"c_alpha": 0.5}}), encoding="utf-8")
        main(["--env", "testing", "--config", str(archivo), "--set", "scaling.tau_star=0.5", "ladder"])
        config = controlador.call_args.args[0]
        assert config["scaling"]["c_alpha"] == 0.5
        assert config["scaling"]["tau_star"] == 0.5

    def test_verbose_logs_to_stderr(self, controlador, capsys):
        main(["--env", "testing", "--verbose", "ladder"])
        assert "Comando recibido" in capsys.readouterr().err


@pytest.mark.integration
class TestCorridaReal:
    """Subcomando bands de punta a punta"""

    def test_bands_writes_artifacts(self, tmp_path, capsys):
        status = main(
            ["--env", "testing", "--out", str(tmp_path), "--set", "scaling.beta_sweep=[0.1,0.05]", "bands"]
        )
        assert status == EXIT_OK
        assert "bands_jet: PASS" in capsys.readouterr().out
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["config"]["scaling"]["beta_sweep"] == [0.1, 0.05]
        assert summary["exit_status"] == 0
        assert (tmp_path / "bands.csv").read_text(encoding="utf-8").startswith("k,omega_1,omega_2")

    def test_module_exposes_main(self):
        assert callable(lanzador.main)
