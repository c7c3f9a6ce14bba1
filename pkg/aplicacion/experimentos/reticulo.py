"""Lattice envelope equation against the continuum NLS and its symbol consistency."""

from typing import Dict, List

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.enls import EnlsCoefficients, nls_coefficients
from dominio.excitacion import FactoryPerfil
from dominio.reticulo import LatticeState, integrate_lattice_nls, lattice_symbol, profile_state
from infraestructura.acceso_datos.exportadores import exportar_sitios

logger = get_logger(__name__)


def continuum_nls(coeffs: EnlsCoefficients, state: LatticeState, t_end: float) -> np.ndarray:
    """Linear continuum evolution of the site data with symbol g0 + g1 xi + g2 xi**2."""
    g = coeffs.gammas
    xi = 2.0 * np.pi * np.fft.fftfreq(state.sites.size)
    symbol = g[0] + g[1] * xi + g[2] * xi**2
    return np.fft.ifft(np.exp(-1j * symbol * t_end) * np.fft.fft(state.z_plus))


class ExperimentoReticulo(BaseExperimento):
    nombre = "lattice"

    def _continuo(self, coeffs: EnlsCoefficients) -> ScalingReport:
        profile = FactoryPerfil.obtener_perfil(self.configurador.seccion("excitation.h"))
        sites_per_width = float(self.valor("lattice.sites_per_width", 60.0))
        dt = float(self.valor("lattice.dt", 0.2))
        betas = sorted((float(b) for b in self.valor("lattice.betas", [0.2, 0.14, 0.1, 0.07])), reverse=True)
        report = ScalingReport(
            name="lattice_continuum",
            x_column="beta",
            columns=("beta", "t_end", "deviation", "mass_drift"),
            criteria=(Criterion("deviation", "min_slope", float(self.tolerancia("lattice_min_slope", 0.8))),),
        )
        finales: Dict[float, LatticeState] = {}

        def fila(beta: float) -> Dict[str, float]:
            state = profile_state(profile, beta, half_width=int(sites_per_width / beta))
            t_end = 1.0 / beta**2
            final = integrate_lattice_nls(
                coeffs, state, beta=beta, t_end=t_end, dt=dt, progress_every=self.configurador.progress_every
            )
            finales[beta] = final
            deviation = float(np.max(np.abs(final.z_plus - continuum_nls(coeffs, state, t_end))))
            return {"beta": beta, "t_end": t_end, "deviation": deviation, "mass_drift": final.diagnostics["mass_drift"]}

        barrido = self.ejecutor.barrer(fila, betas)
        for row in barrido.resultados:
            report.add_row(row)
        if finales:
            report.tables.append(exportar_sitios(finales[min(finales)], nombre="lattice_sites"))
        return self.cerrar(report, barrido)

    def _simbolos(self, coeffs: EnlsCoefficients) -> ScalingReport:
        kinds = list(self.valor("lattice.kinds", ["gamma2", "sin-series", "mixed"]))
        xi = np.array(sorted(float(x) for x in self.valor("lattice.xi", [0.02, 0.04, 0.08, 0.16])))
        tolerance = float(self.tolerancia("symbol_slope_tolerance", 0.3))
        report = ScalingReport(
            name="lattice_symbols",
            x_column="xi",
            columns=("xi",) + tuple(f"defect_{kind}" for kind in kinds),
            criteria=tuple(Criterion(f"defect_{kind}", "slope", 3.0, tolerance) for kind in kinds),
        )
        g = coeffs.gammas
        quadratic = g[0] + g[1] * xi + g[2] * xi**2
        defects = {kind: np.abs(lattice_symbol(coeffs, xi, kind=kind) - quadratic) for kind in kinds}
        for i, value in enumerate(xi):
            report.add_row({"xi": value, **{f"defect_{kind}": defects[kind][i] for kind in kinds}})
        return report

    def ejecutar(self) -> List[ScalingReport]:
        jet = self.configurador.crear_jet()
        coeffs = nls_coefficients(jet.gammas(2), 1j, 0.0, k_star=jet.k_star, n0=jet.n0)
        logger.info("Retículo: carrier fijado", extra={"k_star": jet.k_star, "gammas": list(coeffs.gammas)})
        return [self._continuo(coeffs), self._simbolos(coeffs)]
