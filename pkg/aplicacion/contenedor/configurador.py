"""
Configurador de nlsregime
=========================
Construye los objetos de dominio (modelo, jet, mapa rectificante, excitación,
grilla) a partir del diccionario de configuración ya cargado y validado.
"""

import threading
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from config.config_loader import lookup
from config.logging_config import get_logger
from dominio.enls import EnvelopeGrid
from dominio.exceptions import PreconditionException
from dominio.excitacion import DoubletExcitation, FactoryExcitacion
from dominio.modelo import DispersionModel, FactoryDispersion, FactorySusceptibility, TaylorJet, jet_at
from dominio.rectificacion import RectifyMap
from infraestructura.acceso_datos.factory_context import FactoryContexto
from infraestructura.acceso_datos.repositorio_reportes import RepositorioReportes

logger = get_logger(__name__)

# tau_star / rho <= alpha0 / alpha, con holgura de redondeo
HOLGURA_VENTANA = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Scalings of a sweep: alpha = c_alpha beta**kappa0, rho = c_rho beta**kappa1.

    Attributes:
        c_alpha: Prefactor of alpha.
        kappa0: Exponent of alpha.
        c_rho: Prefactor of rho.
        kappa1: Exponent of rho.
        alpha0: Nonlinear time-window constant.
        tau_star: Final slow time of the runs.
        beta_sweep: Beta values, in run order.
    """

    c_alpha: float
    kappa0: float
    c_rho: float
    kappa1: float
    alpha0: float
    tau_star: float
    beta_sweep: Tuple[float, ...]

    @classmethod
    def from_config(cls, config: Mapping[str, Any], **changes: Any) -> "ExperimentConfig":
        scaling = dict(config.get("scaling", {}))
        scaling.update({k: v for k, v in changes.items() if v is not None})
        return cls(
            c_alpha=float(scaling["c_alpha"]),
            kappa0=float(scaling["kappa0"]),
            c_rho=float(scaling["c_rho"]),
            kappa1=float(scaling["kappa1"]),
            alpha0=float(scaling["alpha0"]),
            tau_star=float(scaling["tau_star"]),
            beta_sweep=tuple(float(b) for b in scaling["beta_sweep"]),
        )

    def alpha(self, beta: float) -> float:
        return self.c_alpha * beta**self.kappa0

    def rho(self, beta: float) -> float:
        return self.c_rho * beta**self.kappa1

    def check(self, beta: float) -> None:
        """
        Nonlinear time window tau_star / rho <= alpha0 / alpha.

        Raises:
            PreconditionException: The run would last beyond the window.
        """
        alpha, rho = self.alpha(beta), self.rho(beta)
        if self.tau_star * alpha > self.alpha0 * rho * (1.0 + HOLGURA_VENTANA):
            raise PreconditionException(
                operation="ExperimentConfig.check",
                invariant="tau_star / rho <= alpha0 / alpha",
                context={"beta": beta, "alpha": alpha, "rho": rho, "tau_star": self.tau_star, "alpha0": self.alpha0},
            )

    def check_sweep(self) -> None:
        for beta in self.beta_sweep:
            self.check(beta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_alpha": self.c_alpha,
            "kappa0": self.kappa0,
            "c_rho": self.c_rho,
            "kappa1": self.kappa1,
            "alpha0": self.alpha0,
            "tau_star": self.tau_star,
            "beta_sweep": list(self.beta_sweep),
        }


class Configurador:
    """
    Fábrica de objetos de dominio para una configuración.

    El modelo de dispersión se construye una vez y se comparte entre los
    trabajadores del pool; el resto de los objetos son inmutables.

    Args:
        config: Configuración efectiva (ver ``config/config.yaml``).
    """

    def __init__(self, config: Mapping[str, Any]) -> None:
        self.config = config
        self._modelo: Optional[DispersionModel] = None
        self._lock = threading.Lock()

    def valor(self, key_path: str, default: Any = None) -> Any:
        return lookup(dict(self.config), key_path, default)

    def seccion(self, key_path: str) -> Dict[str, Any]:
        return dict(self.valor(key_path, {}) or {})

    @property
    def jobs(self) -> int:
        return max(1, int(self.valor("execution.jobs", 1)))

    @property
    def max_halvings(self) -> int:
        return int(self.valor("execution.max_halvings", 4))

    @property
    def max_attempts(self) -> int:
        return int(self.valor("execution.max_attempts", 5))

    @property
    def progress_every(self) -> int:
        return int(self.valor("logging.progress_every", 1000))

    def crear_modelo(self) -> DispersionModel:
        with self._lock:
            if self._modelo is None:
                spec = self.seccion("model")
                susceptibility = FactorySusceptibility.obtener_susceptibilidad(spec.get("susceptibility"))
                self._modelo = FactoryDispersion.obtener_modelo(spec, susceptibility)
                logger.info(
                    "Modelo de dispersión creado",
                    extra={"bands": self._modelo.n_bands, "family": spec.get("family")},
                )
            return self._modelo

    def crear_jet(self, k_star: Optional[float] = None, n0: Optional[int] = None) -> TaylorJet:
        k_star = float(self.valor("excitation.k_star") if k_star is None else k_star)
        n0 = int(self.valor("excitation.n0", 1) if n0 is None else n0)
        return jet_at(self.crear_modelo(), n0, k_star)

    def crear_excitacion(
        self,
        beta: float,
        alpha: float = 0.0,
        rho: Optional[float] = None,
        **overrides: Any,
    ) -> DoubletExcitation:
        """Doublet excitation of the ``excitation`` section, fields in ``overrides`` replaced."""
        spec = self.seccion("excitation")
        spec.update(overrides)
        return FactoryExcitacion.obtener_excitacion(spec, alpha=alpha, beta=beta, rho=rho)

    def crear_rectificador(self, nu: int, exc: Optional[DoubletExcitation] = None) -> RectifyMap:
        if exc is None:
            jet = self.crear_jet()
            radius = float(self.valor("excitation.pi0"))
        else:
            jet = self.crear_jet(exc.k_star, exc.n0)
            radius = exc.pi0
        return RectifyMap(self.crear_modelo(), jet, nu, domain_radius=radius)

    def crear_grilla(
        self,
        beta: float,
        n_points: Optional[int] = None,
        l_over_beta: Optional[float] = None,
    ) -> EnvelopeGrid:
        return EnvelopeGrid.for_beta(
            beta,
            int(self.valor("grid.n_points") if n_points is None else n_points),
            float(self.valor("grid.l_over_beta") if l_over_beta is None else l_over_beta),
        )

    def crear_escalas(self, **changes: Any) -> ExperimentConfig:
        return ExperimentConfig.from_config(self.config, **changes)

    def record_taus(self, tau0: float, tau_star: float) -> np.ndarray:
        return np.linspace(tau0, tau_star, int(self.valor("reference.records", 5)))

    def crear_repositorio(self, directorio: Optional[str] = None) -> RepositorioReportes:
        destino = directorio or self.valor("computed_paths.output_dir") or self.valor("output.directory")
        return RepositorioReportes(FactoryContexto.obtener_contexto(self.valor("output.context", "archivo"), str(destino)))


def definir_configurador(config: Mapping[str, Any]) -> Configurador:
    """Función de conveniencia para crear el configurador."""
    return Configurador(config)
