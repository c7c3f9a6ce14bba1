"""
Cargador de configuración para nlsregime
========================================
Valores por defecto en YAML, archivo de usuario JSON o YAML, sobrescrituras
``clave.punteada=valor``, variables de entorno y validación de schema.
"""

import copy
import json
import os
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import yaml
from jsonschema import ValidationError, validate

from dominio.exceptions import ConfigurationException
from config.logging_config import get_logger

logger = get_logger(__name__)

_PATRON_VARIABLE = re.compile(r"\$\{([^}]+)\}")

# Secciones cuyo contenido es libre (parámetros de familias y perfiles).
_SECCIONES_ABIERTAS = (
    "model.params",
    "model.potential",
    "model.extra_bands",
    "model.susceptibility.kernel",
    "excitation.h.params",
    "experiments.superposition.second",
)


class ConfigLoader:
    """Cargador de configuración con soporte para entornos, archivo de usuario y overrides."""

    def __init__(self, config_dir: Optional[Union[str, Path]] = None) -> None:
        """
        Inicializa el cargador de configuración.

        Args:
            config_dir: Directorio con config.yaml y config_schema.yaml. Por
                defecto, el directorio de este módulo.
        """
        self.config_dir = Path(config_dir) if config_dir is not None else Path(__file__).resolve().parent
        self._config_cache: Optional[Dict[str, Any]] = None
        self._schema_cache: Optional[Dict[str, Any]] = None

    def load_config(
        self,
        environment: Optional[str] = None,
        validate_schema: bool = True,
        user_file: Optional[Union[str, Path]] = None,
        overrides: Optional[Iterable[str]] = None,
    ) -> Dict[str, Any]:
        """
        Carga la configuración efectiva.

        Orden de aplicación: valores por defecto, entorno, archivo de usuario,
        overrides ``--set``. Las claves desconocidas se rechazan con la lista
        completa de claves válidas.

        Args:
            environment: Entorno (development, testing, production). Si no se
                indica se usa NLSREGIME_ENV o ``app.environment``.
            validate_schema: Si True, valida contra config_schema.yaml.
            user_file: Archivo JSON o YAML del usuario.
            overrides: Pares ``clave.punteada=valor``.

        Returns:
            Diccionario con la configuración expandida y validada.

        Raises:
            ConfigurationException: Archivo inexistente, error de sintaxis con
                línea y columna, clave desconocida o violación del schema.
        """
        if self._config_cache is None:
            self._config_cache = self._load_yaml(self.config_dir / "config.yaml")

        config = self._expand_environment_variables(copy.deepcopy(self._config_cache))
        overlays = config.pop("environments", {}) or {}

        if environment is None:
            environment = os.getenv("NLSREGIME_ENV", config.get("app", {}).get("environment", "development"))
        config.setdefault("app", {})["environment"] = environment

        env_overlay = dict(overlays.get(environment, {}) or {})
        env_file = self.config_dir / "environments" / f"{environment}.yaml"
        if env_file.exists():
            env_overlay = self._merge_config(env_overlay, self._expand_environment_variables(self._load_yaml(env_file)))
        if env_overlay:
            config = self._merge_config(config, env_overlay)

        if user_file is not None:
            user_config = self._load_user_file(Path(user_file))
            self._check_known_keys(config, user_config, str(user_file))
            config = self._merge_config(config, user_config)
            config.setdefault("app", {})["config_file"] = str(user_file)

        if overrides:
            config = self.apply_overrides(config, overrides)

        if validate_schema:
            self._validate_config(config)

        return self._resolve_paths(config)

    def _load_yaml(self, path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigurationException(config_key="<file>", config_file=str(path))
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise self._error_sintaxis(path, "yaml", e) from e
        if not isinstance(data, dict):
            raise ConfigurationException(config_key="<root>", config_file=str(path))
        return data

    def _load_user_file(self, path: Path) -> Dict[str, Any]:
        """Carga el archivo del usuario; JSON si la extensión es .json, YAML en otro caso."""
        if not path.exists():
            raise ConfigurationException(
                config_key="<file>",
                config_file=str(path),
                user_message=f"No existe el archivo de configuración {path}",
            )
        if path.suffix.lower() != ".json":
            return self._load_yaml(path)
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigurationException(
                    config_key="<syntax>",
                    config_file=str(path),
                    config_type="json",
                    context={"line": e.lineno, "column": e.colno},
                    user_message=f"Error de sintaxis en {path}, línea {e.lineno}, columna {e.colno}: {e.msg}",
                    cause=e,
                ) from e
        if not isinstance(data, dict):
            raise ConfigurationException(config_key="<root>", config_file=str(path), config_type="json")
        return data

    @staticmethod
    def _error_sintaxis(path: Path, kind: str, error: yaml.YAMLError) -> ConfigurationException:
        mark = getattr(error, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        return ConfigurationException(
            config_key="<syntax>",
            config_file=str(path),
            config_type=kind,
            context={"line": line, "column": column},
            user_message=f"Error de sintaxis en {path}, línea {line}, columna {column}",
            cause=error,
        )

    def _expand_environment_variables(self, config: Any) -> Any:
        """
        Expande variables de entorno con el formato ${VAR:-default}.

        Un valor que consiste sólo en la variable se reinterpreta como
        escalar YAML, de modo que ``${NLSREGIME_JOBS:-1}`` produce un entero.
        """

        def replace_var(match: "re.Match[str]") -> str:
            var_expr = match.group(1)
            if ":-" in var_expr:
                var_name, default_value = var_expr.split(":-", 1)
                return os.getenv(var_name, default_value)
            env_value = os.getenv(var_expr)
            if env_value is None:
                raise ConfigurationException(
                    config_key=var_expr, config_type="environment",
                    user_message=f"Variable de entorno requerida no encontrada: {var_expr}",
                )
            return env_value

        def expand_value(value: Any) -> Any:
            if isinstance(value, str):
                expanded = _PATRON_VARIABLE.sub(replace_var, value)
                if expanded != value and _PATRON_VARIABLE.fullmatch(value.strip()):
                    return _parse_scalar(expanded)
                return expanded
            if isinstance(value, dict):
                return {k: expand_value(v) for k, v in value.items()}
            if isinstance(value, list):
                return [expand_value(item) for item in value]
            return value

        return expand_value(config)

    @staticmethod
    def _merge_config(base_config: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
        """Combina dos configuraciones; los diccionarios se mezclan en profundidad."""
        result = copy.deepcopy(base_config)

        def deep_merge(base_dict: Dict[str, Any], env_dict: Dict[str, Any]) -> None:
            for key, value in env_dict.items():
                if key in base_dict and isinstance(base_dict[key], dict) and isinstance(value, dict):
                    deep_merge(base_dict[key], value)
                else:
                    base_dict[key] = copy.deepcopy(value)

        deep_merge(result, overlay)
        return result

    def _check_known_keys(self, base: Dict[str, Any], user: Dict[str, Any], source: str) -> None:
        valid = set(self.valid_keys(base))

        def walk(node: Dict[str, Any], prefix: str) -> None:
            for key, value in node.items():
                path = f"{prefix}{key}"
                if _es_abierta(path):
                    continue
                if path not in valid and not any(v.startswith(path + ".") for v in valid):
                    raise self._clave_desconocida(path, sorted(valid), source)
                if isinstance(value, dict) and any(v.startswith(path + ".") for v in valid):
                    walk(value, path + ".")

        walk(user, "")

    def apply_overrides(self, config: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
        """
        Aplica pares ``clave.punteada=valor`` sobre una configuración.

        Los valores se interpretan como JSON y, si no lo son, como escalares
        YAML: ``[0.1,0.05]`` es una lista, ``gauss`` una cadena.
        """
        result = copy.deepcopy(config)
        valid = self.valid_keys(result)
        applied: List[Dict[str, Any]] = []
        for item in overrides:
            if "=" not in item:
                raise ConfigurationException(
                    config_key=item, config_type="override",
                    user_message=f"Override inválido '{item}': se espera CLAVE=VALOR",
                )
            key, raw = item.split("=", 1)
            key = key.strip()
            if key not in valid and not _es_abierta(key):
                raise self._clave_desconocida(key, valid, "--set")
            node = result
            parts = key.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = _parse_scalar(raw)
            applied.append({"key": key, "value": node[parts[-1]]})
        result.setdefault("app", {})["overrides"] = applied
        logger.debug("Overrides aplicados", extra={"overrides": [a["key"] for a in applied]})
        return result

    @staticmethod
    def valid_keys(config: Dict[str, Any]) -> List[str]:
        """Lista ordenada de todas las claves punteadas de una configuración."""
        keys: List[str] = []

        def walk(node: Dict[str, Any], prefix: str) -> None:
            for key, value in node.items():
                path = f"{prefix}{key}"
                keys.append(path)
                if isinstance(value, dict) and not _es_abierta(path):
                    walk(value, path + ".")

        walk(config, "")
        return sorted(keys)

    @staticmethod
    def _clave_desconocida(key: str, valid: List[str], source: str) -> ConfigurationException:
        return ConfigurationException(
            config_key=key,
            config_file=source,
            context={"valid_keys": valid},
            user_message=f"Clave desconocida '{key}'. Claves válidas: {', '.join(valid)}",
        )

    def _load_schema(self) -> Dict[str, Any]:
        if self._schema_cache is None:
            self._schema_cache = self._load_yaml(self.config_dir / "config_schema.yaml")
        return self._schema_cache

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """Valida la configuración contra el schema."""
        try:
            validate(instance=config, schema=self._load_schema())
        except ValidationError as e:
            path = ".".join(str(p) for p in e.absolute_path) or "<root>"
            raise ConfigurationException(
                config_key=path,
                config_type="schema",
                context={"schema_message": e.message},
                user_message=f"Configuración inválida en '{path}': {e.message}",
                cause=e,
            ) from e

    def _resolve_paths(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Resuelve el directorio de salida a un path absoluto."""
        result = dict(config)
        output_dir = Path(result.get("output", {}).get("directory", "resultados"))
        result["computed_paths"] = {
            "project_root": str(Path(__file__).resolve().parent.parent),
            "output_dir": str(output_dir.resolve()),
        }
        return result

    def get_config_value(self, key_path: str, default: Any = None, environment: Optional[str] = None) -> Any:
        """
        Obtiene un valor específico de la configuración usando notación de puntos.

        Args:
            key_path: Ruta de la clave (ej: 'scaling.c_alpha').
            default: Valor por defecto si no se encuentra la clave.
            environment: Entorno específico.
        """
        return lookup(self.load_config(environment=environment), key_path, default)

    def reload_config(self) -> None:
        """Fuerza la recarga de la configuración desde el archivo."""
        self._config_cache = None
        self._schema_cache = None


def _es_abierta(path: str) -> bool:
    return any(path == s or path.startswith(s + ".") for s in _SECCIONES_ABIERTAS)


def _parse_scalar(raw: str) -> Any:
    text = raw.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return yaml.safe_load(text)


def lookup(config: Dict[str, Any], key_path: str, default: Any = None) -> Any:
    """Acceso punteado a un diccionario anidado."""
    current: Any = config
    try:
        for key in key_path.split("."):
            current = current[key]
        return current
    except (KeyError, TypeError):
        return default


_config_loader = ConfigLoader()


def load_config(
    environment: Optional[str] = None,
    validate_schema: bool = True,
    user_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Iterable[str]] = None,
) -> Dict[str, Any]:
    """Función de conveniencia para cargar la configuración."""
    return _config_loader.load_config(
        environment=environment, validate_schema=validate_schema, user_file=user_file, overrides=overrides
    )


def get_config_value(key_path: str, default: Any = None, environment: Optional[str] = None) -> Any:
    """Función de conveniencia para obtener un valor de configuración."""
    return _config_loader.get_config_value(key_path, default, environment)
