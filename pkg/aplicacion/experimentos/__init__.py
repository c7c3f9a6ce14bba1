"""
Experimentos de nlsregime: uno por subcomando de la consola.
"""

from typing import Dict, Optional, Tuple, Type

from aplicacion.contenedor.configurador import Configurador
from dominio.exceptions import ValidationException

from .bandas import ExperimentoBandas
from .base import Barrido, BaseExperimento, Ejecutor
from .envolvente import ExperimentoEnvolvente
from .escalera import ExperimentoEscalera
from .integrales import ExperimentoIntegrales
from .rectificacion import ExperimentoRectificacion
from .reticulo import ExperimentoReticulo
from .soliton import ExperimentoSoliton
from .superposicion import ExperimentoSuperposicion
from .supresion import ExperimentoSupresion

_EXPERIMENTOS: Dict[str, Type[BaseExperimento]] = {
    cls.nombre: cls
    for cls in (
        ExperimentoBandas,
        ExperimentoRectificacion,
        ExperimentoIntegrales,
        ExperimentoEnvolvente,
        ExperimentoReticulo,
        ExperimentoEscalera,
        ExperimentoSupresion,
        ExperimentoSuperposicion,
        ExperimentoSoliton,
    )
}

EXPERIMENTOS: Tuple[str, ...] = tuple(_EXPERIMENTOS)


class FactoryExperimento:
    """Builds an experiment from its subcommand name."""

    @staticmethod
    def obtener_experimento(
        nombre: str, configurador: Configurador, ejecutor: Optional[Ejecutor] = None
    ) -> BaseExperimento:
        if nombre not in _EXPERIMENTOS:
            raise ValidationException(
                field="experiment", value=nombre, rule="known experiment", expected=", ".join(EXPERIMENTOS)
            )
        return _EXPERIMENTOS[nombre](configurador, ejecutor)


__all__ = [
    "EXPERIMENTOS",
    "Barrido",
    "BaseExperimento",
    "Ejecutor",
    "FactoryExperimento",
    "ExperimentoBandas",
    "ExperimentoRectificacion",
    "ExperimentoIntegrales",
    "ExperimentoEnvolvente",
    "ExperimentoReticulo",
    "ExperimentoEscalera",
    "ExperimentoSupresion",
    "ExperimentoSuperposicion",
    "ExperimentoSoliton",
]
