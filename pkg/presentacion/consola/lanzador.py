"""
Consola de nlsregime.

Un subcomando por experimento. Cada subcomando carga la configuración,
ejecuta el experimento, escribe las tablas CSV y summary.json en el
directorio de salida y devuelve el código de salida:

    0  todos los veredictos pasan
    2  algún veredicto falla
    1  error (configuración, precondición, E/S o uso)
"""

import sys
from typing import Any, Dict, List, Optional, Sequence

import click

from aplicacion.ajuste import ScalingReport
from aplicacion.experimentos import EXPERIMENTOS
from aplicacion.managers.controlador_experimentos import ControladorExperimentos
from config.config_loader import load_config
from config.logging_config import LoggerFactory, get_logger
from dominio.exceptions import ConsoleException, NlsRegimeException

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALLO = 2

_AYUDA = {
    "bands": "Bandas del modelo, jet en k* y margen de genericidad.",
    "rectify": "Convergencia del símbolo rectificado y residuo de la forma rectificada.",
    "integrals": "Fase estacionaria y expansión armónica contra oráculos.",
    "enls": "Solidez del solver de envolventes y acoplamiento bidireccional.",
    "lattice": "NLS en red contra el continuo y orden de los símbolos de red.",
    "ladder": "Escalera de precisión O(beta), O(beta^2), O(beta^3) contra la referencia modal.",
    "suppression": "Supresión de la respuesta no lineal fuera de la condición de fase.",
    "superposition": "Superposición aproximada de dos dobletes con velocidades distintas.",
    "soliton": "Balance entre dispersión y no linealidad para un perfil sech.",
}


def _verdicto(report: ScalingReport) -> str:
    if report.error:
        return "ERROR"
    return "PASS" if report.passed else "FAIL"


def _mostrar_resumen(reports: Sequence[ScalingReport], directorio: str, status: int) -> None:
    for report in reports:
        click.echo(f"{report.name}: {_verdicto(report)}")
        for etiqueta, ok in report.verdicts.items():
            click.echo(f"  {'ok ' if ok else 'NO '} {etiqueta}")
        if report.error:
            click.echo(f"  {report.error}")
    click.echo(f"resultados en {directorio} (exit {status})")


def _mostrar_error(error: NlsRegimeException) -> None:
    click.echo(f"Error: {error.user_message or error}", err=True)
    if error.recovery_suggestion:
        click.echo(f"Sugerencia: {error.recovery_suggestion}", err=True)


def _ejecutar(ctx: click.Context, nombre: str) -> int:
    opciones: Dict[str, Any] = ctx.obj
    overrides: List[str] = list(opciones["overrides"])
    if opciones["jobs"] is not None:
        overrides.append(f"execution.jobs={opciones['jobs']}")
    config = load_config(
        environment=opciones["environment"], user_file=opciones["config"], overrides=overrides or None
    )
    logging_config = dict(config.get("logging", {}))
    if opciones["verbose"]:
        logging_config.update({"level": "DEBUG", "console_output": True})
    LoggerFactory.setup(config_dict={"logging": logging_config}, force=True)
    logger.info("Comando recibido", extra={"command": nombre, "overrides": overrides})

    controlador = ControladorExperimentos(config)
    reports = controlador.ejecutar([nombre])
    repositorio = controlador.configurador.crear_repositorio(opciones["out"])
    status = controlador.emitir(reports, opciones["out"])
    _mostrar_resumen(reports, repositorio.contexto.recurso, status)
    return status


@click.group()
@click.option("--config", "config_path", type=str, default=None, help="Archivo de configuración JSON o YAML.")
@click.option("--out", type=str, default=None, help="Directorio de salida (por defecto output.directory).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override punteado, repetible.")
@click.option("--jobs", type=click.IntRange(min=1), envvar="NLSREGIME_JOBS", default=None, help="Workers del barrido.")
@click.option("--env", "environment", type=str, default=None, help="Entorno: development, testing, production.")
@click.option("--verbose", is_flag=True, help="Logs DEBUG también en stderr.")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    out: Optional[str],
    overrides: Sequence[str],
    jobs: Optional[int],
    environment: Optional[str],
    verbose: bool,
) -> None:
    """nlsregime: jerarquía de envolventes NLS y validación de sus órdenes de aproximación."""
    ctx.obj = {
        "config": config_path,
        "out": out,
        "overrides": tuple(overrides),
        "jobs": jobs,
        "environment": environment,
        "verbose": verbose,
    }


def _registrar(nombre: str) -> None:
    @cli.command(name=nombre, help=_AYUDA.get(nombre, f"Experimento {nombre}."))
    @click.pass_context
    def comando(ctx: click.Context) -> int:
        return _ejecutar(ctx, nombre)


for _nombre in EXPERIMENTOS:
    _registrar(_nombre)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada de ``nlsregime``; devuelve el código de salida."""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="nlsregime", standalone_mode=False)
    except NlsRegimeException as e:
        logger.error("Comando fallido", extra={"error_code": e.error_code, "error_type": type(e).__name__})
        _mostrar_error(e)
        return EXIT_ERROR
    except click.exceptions.Abort:
        click.echo("Abortado", err=True)
        return EXIT_ERROR
    except click.ClickException as e:
        _mostrar_error(
            ConsoleException(
                command=args[0] if args else "nlsregime",
                command_args=args,
                user_message=e.format_message(),
                recovery_suggestion="Ejecute nlsregime --help",
            )
        )
        return EXIT_ERROR
    except KeyboardInterrupt:
        click.echo("Interrumpido", err=True)
        return EXIT_ERROR
    # --help y el grupo sin subcomando devuelven None o 0
    return int(result) if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
