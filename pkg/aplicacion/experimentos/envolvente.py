"""
Envelope-solver soundness and the bidirectional cross term.

The soundness report gathers the oracle checks of the split-step solver:
L2 conservation, the stationary soliton, linear Gaussian spreading, source
form equivalence after the ramp and exact decoupling without a cross
coefficient. The second report follows the accumulated cross term of a
bidirectional pair as rho decreases.
"""

from dataclasses import replace
from typing import Dict, List, Tuple

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.enls import (
    ALPHA_UNIDAD,
    EnlsCoefficients,
    EnvelopeGrid,
    EnvelopeState,
    initial_state,
    integrate_bidirectional,
    integrate_enls,
    nls_coefficients,
    to_source_form,
)
from dominio.excitacion import EnvelopeSpec, soliton_amplitude
from infraestructura.acceso_datos.exportadores import exportar_campo

logger = get_logger(__name__)

GAMMA2 = 0.5
# pico de la gaussiana lineal en t = 1 con gamma2 = 1/2
PICO_LINEAL = 2.0**-0.25
# corrida de la forma con fuente
LONGITUD_FUENTE = 100.0
ANCHO_FUENTE = 5.0
GAMMA2_FUENTE = 0.1
RHO_FUENTE = 0.005


def gauss(grid: EnvelopeGrid, amplitude: float = 1.0, width: float = 1.0) -> np.ndarray:
    return amplitude * np.exp(-grid.x**2 / (2.0 * width**2)) + 0j


def bidirectional_pair(
    grid: EnvelopeGrid, gammas: Tuple[float, ...], alpha: float, delta: complex, k_star: float
) -> Tuple[EnlsCoefficients, EnlsCoefficients, Tuple[EnvelopeState, EnvelopeState]]:
    """Coefficient sets at +-k_star sharing ``delta`` and Gaussian states in the rotating frame."""
    plus = replace(
        nls_coefficients(gammas, 1j, alpha, k_star=k_star),
        delta_cross={1: complex(delta), -1: np.conj(complex(delta))},
    )
    minus = replace(plus, k_star=-k_star)
    states = (
        initial_state(grid, gauss(grid), frame="rotating"),
        initial_state(grid, gauss(grid, amplitude=0.5, width=1.5), frame="rotating"),
    )
    return plus, minus, states


class ExperimentoEnvolvente(BaseExperimento):
    nombre = "enls"

    def _grilla(self) -> EnvelopeGrid:
        return EnvelopeGrid(float(self.opcion("length", 40.0)), int(self.opcion("n_points", 256)))

    def _solidez(self) -> ScalingReport:
        grid = self._grilla()
        dt = float(self.opcion("dt", 0.01))
        report = ScalingReport(
            name="enls_soundness",
            x_column="t_end",
            columns=("t_end", "norm_drift", "soliton_drift", "linear_peak", "source_gap", "decoupling_gap"),
            criteria=(
                Criterion("norm_drift", "max_le", float(self.tolerancia("norm_drift", 1e-8))),
                Criterion("soliton_drift", "max_le", float(self.tolerancia("soliton_drift", 1e-3))),
                Criterion("linear_peak", "near", PICO_LINEAL, float(self.tolerancia("linear_decay", 0.01))),
                Criterion("source_gap", "max_le", float(self.tolerancia("source_gap", 1e-8))),
                Criterion("decoupling_gap", "max_le", float(self.tolerancia("decoupling", 1e-10))),
            ),
        )
        row: Dict[str, float] = {"t_end": 1.0}

        soliton = nls_coefficients((0.0, 0.0, GAMMA2), 1j, ALPHA_UNIDAD)
        amplitude = soliton_amplitude(GAMMA2, soliton.alpha_pi, 1.0, 1.0)
        final = self.integrar(
            integrate_enls,
            "integrate_enls",
            {"check": "soliton"},
            coeffs=soliton,
            state=initial_state(grid, amplitude / np.cosh(grid.x) + 0j),
            t_end=1.0,
            dt=dt,
        )
        row["norm_drift"] = float(final.diagnostics["norm_drift"])
        row["soliton_drift"] = abs(final.peak() - amplitude)
        report.tables.append(exportar_campo(final, nombre="enls_soliton_field"))

        linear = nls_coefficients((0.0, 0.0, GAMMA2), 1j, 0.0)
        spread = integrate_enls(linear, initial_state(grid, gauss(grid)), t_end=1.0, dt=0.1)
        row["linear_peak"] = float(abs(spread.z_plus[grid.n_points // 2]))

        source_grid = EnvelopeGrid(LONGITUD_FUENTE, grid.n_points)
        sourced = to_source_form(
            nls_coefficients((0.0, 0.0, GAMMA2_FUENTE), 1j, 0.01 * ALPHA_UNIDAD),
            initial_state(source_grid, gauss(source_grid, width=ANCHO_FUENTE)),
            EnvelopeSpec(tau0=float(self.valor("excitation.tau0", 0.1))),
            rho=RHO_FUENTE,
        )
        row["source_gap"] = float(sourced.residual_after_ramp)

        plus, minus, states = bidirectional_pair(
            grid, (float(self.opcion("cross_gamma0", 1.5)), 0.0, GAMMA2), ALPHA_UNIDAD, 0j, np.pi / 3.0
        )
        a, b = integrate_bidirectional(plus, minus, states, t_end=1.0, dt=0.05)
        alone_a = integrate_enls(plus, states[0], t_end=1.0, dt=0.05, method="ifrk4")
        alone_b = integrate_enls(minus, states[1], t_end=1.0, dt=0.05, method="ifrk4")
        row["decoupling_gap"] = float(
            max(np.max(np.abs(a.z_plus - alone_a.z_plus)), np.max(np.abs(b.z_plus - alone_b.z_plus)))
        )
        report.add_row(row)
        report.notes["soliton_amplitude"] = amplitude
        logger.info("Solidez del integrador evaluada", extra=row)
        return report

    def _acoplamiento(self) -> ScalingReport:
        grid = self._grilla()
        gamma0 = float(self.opcion("cross_gamma0", 1.5))
        delta = complex(self.opcion("cross_delta", 0.5))
        dt = float(self.opcion("dt", 0.01))
        rhos = sorted(float(r) for r in self.opcion("cross_rhos", [0.04, 0.02, 0.01]))
        report = ScalingReport(
            name="enls_cross",
            x_column="rho",
            columns=("rho", "alpha", "cross"),
            criteria=(Criterion("cross", "slope", 1.0, float(self.tolerancia("cross_slope", 0.2))),),
        )

        def fila(rho: float) -> Dict[str, float]:
            # alpha_pi = rho
            alpha = rho * ALPHA_UNIDAD
            plus, minus, states = bidirectional_pair(grid, (gamma0, 0.0, 0.0), alpha, delta, np.pi / 3.0)
            a, _ = self.integrar(
                integrate_bidirectional,
                "integrate_bidirectional",
                {"rho": rho},
                coeffs_plus=plus,
                coeffs_minus=minus,
                states=states,
                t_end=1.0 / rho,
                dt=dt,
            )
            return {"rho": rho, "alpha": alpha, "cross": float(a.diagnostics["coupling_integral"])}

        barrido = self.ejecutor.barrer(fila, rhos)
        for row in barrido.resultados:
            report.add_row(row)
        report.notes["gamma0"] = gamma0
        report.notes["delta"] = [delta.real, delta.imag]
        return self.cerrar(report, barrido)

    def ejecutar(self) -> List[ScalingReport]:
        return [self._solidez(), self._acoplamiento()]
