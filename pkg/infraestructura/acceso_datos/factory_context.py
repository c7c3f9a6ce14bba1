"""Factory for storage contexts and mappers.

Supported context types:
    - 'archivo': directory of atomically written text files

Supported mapper types:
    - 'csv': numeric tables
    - 'json': nested dictionaries
"""

from dominio.exceptions import ConfigurationException
from infraestructura.acceso_datos.contexto import BaseContexto, ContextoArchivo
from infraestructura.acceso_datos.mapeador import Mapeador, MapeadorCsv, MapeadorJson


class FactoryContexto:
    """Creates storage contexts and mappers from their configured names.

    Example:
        >>> contexto = FactoryContexto.obtener_contexto('archivo', 'results')
        >>> mapeador = FactoryContexto.obtener_mapeador('csv')
    """

    @staticmethod
    def obtener_contexto(tipo_contexto: str, param: str) -> BaseContexto:
        if tipo_contexto == "archivo":
            return ContextoArchivo(param)
        raise ConfigurationException(
            config_key="output.context", config_type="contexto_persistencia",
            context={"provided_value": tipo_contexto, "supported": ["archivo"]},
        )

    @staticmethod
    def obtener_mapeador(tipo: str) -> Mapeador:
        if tipo == "csv":
            return MapeadorCsv()
        if tipo == "json":
            return MapeadorJson()
        raise ConfigurationException(
            config_key="output.format", config_type="mapeador",
            context={"provided_value": tipo, "supported": ["csv", "json"]},
        )
