"""
Dispersion balanced by the nonlinearity: the classical NLS from a sech
profile with the cubic term switched on and off.

With the nonlinearity the peak stays at the soliton amplitude over the slow
time window; without it the pulse spreads and its peak decays.
"""

from typing import List

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.enls import EnlsCoefficients, EnvelopeState, extract_coeffs, initial_state, integrate_enls
from dominio.exceptions import PreconditionException
from dominio.excitacion import soliton_amplitude

logger = get_logger(__name__)


class ExperimentoSoliton(BaseExperimento):
    nombre = "soliton"

    def _trayectoria(self, coeffs: EnlsCoefficients, state: EnvelopeState, beta: float, times: np.ndarray) -> np.ndarray:
        run = self.integrar(
            integrate_enls,
            "integrate_enls",
            {"beta": beta, "alpha_pi": coeffs.alpha_pi},
            coeffs=coeffs,
            state=state,
            beta=beta,
            t_end=float(times[-1]),
            dt=float(self.opcion("dt", 1.0)),
            method=str(self.valor("solver.method", "ifrk4")),
            snapshot_times=times,
            phase_limit=float(self.valor("solver.phase_limit", 0.1)),
            progress_every=self.configurador.progress_every,
        )
        return np.array([float(np.max(np.abs(s.z_plus))) for s in run.snapshots])

    def ejecutar(self) -> List[ScalingReport]:
        beta = float(self.opcion("beta", 0.08))
        escalas = self.configurador.crear_escalas(c_alpha=self.opcion("c_alpha"), c_rho=self.opcion("c_rho"))
        escalas.check(beta)
        alpha, rho = escalas.alpha(beta), escalas.rho(beta)

        model = self.configurador.crear_modelo()
        jet = self.configurador.crear_jet()
        rect = self.configurador.crear_rectificador(2)
        coeffs = extract_coeffs(model, jet, rect, nu=2, sigma=0, alpha=alpha)
        gamma2, q_imag = coeffs.gammas[2], float(np.imag(coeffs.Q_plus))
        if gamma2 * q_imag <= 0.0:
            raise PreconditionException(
                operation="run_soliton_balance",
                invariant="focusing: gamma2 * Im Q_plus > 0 (defocusing configuration)",
                context={"gamma2": gamma2, "q_imag": q_imag},
            )
        amplitude = soliton_amplitude(gamma2, coeffs.alpha_pi, q_imag, beta)

        grid = self.configurador.crear_grilla(beta, self.opcion("n_points", 2048), self.opcion("l_over_beta", 40.0))
        state = initial_state(
            grid, amplitude / np.cosh(beta * grid.x) + 0j, frame="comoving", gammas=coeffs.gammas
        )
        taus = np.linspace(0.0, float(self.opcion("tau_end", 1.0)), int(self.opcion("samples", 11)))
        times = taus / rho
        nonlinear = self._trayectoria(coeffs, state, beta, times)
        linear = self._trayectoria(coeffs.with_alpha(0.0), state, beta, times)

        report = ScalingReport(
            name="soliton",
            x_column="tau",
            columns=("tau", "peak_nl", "peak_lin", "deviation", "decay"),
            criteria=(
                Criterion("deviation", "max_le", float(self.opcion("max_deviation", 0.05))),
                Criterion("decay", "last_ge", float(self.opcion("min_linear_decay", 0.2))),
            ),
        )
        for tau, peak_nl, peak_lin in zip(taus, nonlinear, linear):
            report.add_row(
                {
                    "tau": tau,
                    "peak_nl": peak_nl,
                    "peak_lin": peak_lin,
                    "deviation": abs(peak_nl / amplitude - 1.0),
                    "decay": 1.0 - peak_lin / amplitude,
                }
            )
        report.notes.update(
            {"amplitude": amplitude, "alpha": alpha, "rho": rho, "beta": beta, "coefficients": coeffs.to_dict()}
        )
        logger.info(
            "Balance del solitón evaluado",
            extra={"amplitude": amplitude, "max_deviation": float(np.max(report.column("deviation")))},
        )
        return [report]
