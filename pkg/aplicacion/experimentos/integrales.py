"""
Interaction-integral benchmarks.

Stationary-phase expansions against closed-form Gaussian integrals, and the
time-harmonic susceptibility series against the causal-convolution oracle of
an exponential kernel.
"""

from typing import Dict, List, Sequence

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.interaccion import InteractionIntegrand, convolution_oracle, harmonic_expand, sphm_expand
from dominio.modelo import ExponentialKernel
from infraestructura.acceso_datos.exportadores import exportar_barrido, exportar_terminos

logger = get_logger(__name__)

GAUSS = "exp(-q1**2 - q2**2)"
FASE_BILINEAL = "2*q1*q2"
AMPLITUD_ASIMETRICA = "(1 + q1*q2)*" + GAUSS
THETA_REFERENCIA = 0.1


def gaussian_oracle(theta: float) -> complex:
    """Exact value of the bilinear-phase Gaussian integral at lam = 1/theta."""
    return complex(np.pi * theta / np.sqrt(1.0 + theta**2))


def asymmetric_oracle(theta: float) -> complex:
    """Exact value with the amplitude (1 + q1 q2) exp(-|q|**2)."""
    lam = 1.0 / theta
    return np.pi / np.sqrt(1.0 + lam**2) + 1j * np.pi * lam / (2.0 * (1.0 + lam**2) ** 1.5)


def relative_error(value: complex, exact: complex) -> float:
    return float(abs(value - exact) / abs(exact))


class ExperimentoIntegrales(BaseExperimento):
    nombre = "integrals"

    def _orden_sphm(self, thetas: Sequence[float], n_terms: Sequence[int]) -> ScalingReport:
        integrand = InteractionIntegrand.from_sympy(FASE_BILINEAL, AMPLITUD_ASIMETRICA, label="asymmetric")
        tolerance = float(self.tolerancia("sphm_slope_tolerance", 0.3))
        report = ScalingReport(
            name="sphm_order",
            x_column="theta",
            columns=("theta",) + tuple(f"rel_error_n{n}" for n in n_terms),
            criteria=tuple(Criterion(f"rel_error_n{n}", "slope", n + 1.0, tolerance) for n in n_terms),
        )

        def fila(theta: float) -> Dict[str, float]:
            exact = asymmetric_oracle(theta)
            row = {"theta": theta}
            for n in n_terms:
                row[f"rel_error_n{n}"] = relative_error(complex(sphm_expand(integrand, theta, n).values[0]), exact)
            return row

        barrido = self.ejecutor.barrer(fila, thetas)
        for row in barrido.resultados:
            report.add_row(row)
        report.documents["sphm_terms"] = exportar_terminos(sphm_expand(integrand, max(thetas), max(n_terms)))
        return self.cerrar(report, barrido)

    def _gaussiana(self, thetas: Sequence[float]) -> ScalingReport:
        integrand = InteractionIntegrand.from_sympy(FASE_BILINEAL, GAUSS, label="gaussian")
        criteria = ()
        if np.isclose(thetas[-1], THETA_REFERENCIA):
            criteria = (
                Criterion(
                    "rel_error",
                    "near",
                    float(self.tolerancia("sphm_reference_error", 4.96e-3)),
                    float(self.tolerancia("sphm_reference_tolerance", 0.05)),
                ),
            )
        report = ScalingReport(
            name="sphm_gaussian",
            x_column="theta",
            columns=("theta", "oracle", "approx", "rel_error"),
            criteria=criteria,
        )
        approx = [complex(sphm_expand(integrand, theta, 0).values[0]) for theta in thetas]
        oracle = [gaussian_oracle(theta) for theta in thetas]
        for theta, exact, value in zip(thetas, oracle, approx):
            report.add_row(
                {"theta": theta, "oracle": abs(exact), "approx": abs(value), "rel_error": relative_error(value, exact)}
            )
        report.tables.append(exportar_barrido(thetas, oracle, approx, nombre="sphm_gaussian_sweep"))
        return report

    def _armonico(self) -> ScalingReport:
        spec = self.configurador.seccion("interaction.harmonic")
        kernel = ExponentialKernel(c=float(spec.get("c", 1.0)))
        omegas = tuple(float(w) for w in spec.get("omegas", (0.5, 0.5, -0.5)))
        tau = float(spec.get("tau", 0.3))
        rhos = sorted(float(r) for r in spec.get("rhos", (0.01, 0.02, 0.04)))
        tolerances = list(self.tolerancia("harmonic_tolerances", [0.2, 0.3]))
        report = ScalingReport(
            name="harmonic",
            x_column="rho",
            columns=("rho", "error_n1_0", "error_n1_1"),
            criteria=(
                Criterion("error_n1_0", "slope", 1.0, float(tolerances[0])),
                Criterion("error_n1_1", "slope", 2.0, float(tolerances[-1])),
            ),
        )
        # envolventes exp(-s**2) evaluadas en s = tau
        a = float(np.exp(-(tau**2)))
        derivatives = {0: [[a]] * 3, 1: [[a, -2.0 * tau * a]] * 3}
        envelopes = [lambda s: np.exp(-(s**2))] * 3

        def fila(rho: float) -> Dict[str, float]:
            exact = convolution_oracle(kernel, omegas, envelopes, rho, tau / rho)
            row = {"rho": rho}
            for n1, slots in derivatives.items():
                series = harmonic_expand(kernel, omegas, n1, derivatives=slots, rho=rho)
                row[f"error_n1_{n1}"] = float(abs(series.value - exact))
            return row

        barrido = self.ejecutor.barrer(fila, rhos)
        for row in barrido.resultados:
            report.add_row(row)
        report.notes["kernel"] = kernel.describe()
        return self.cerrar(report, barrido)

    def ejecutar(self) -> List[ScalingReport]:
        thetas = sorted(float(t) for t in self.valor("interaction.thetas", [1e-3, 1e-2, 1e-1]))
        n_terms = [int(n) for n in self.valor("interaction.n_terms", [0, 1])]
        reports = [self._orden_sphm(thetas, n_terms), self._gaussiana(thetas), self._armonico()]
        logger.info("Integrales de interacción evaluadas", extra={"thetas": len(thetas), "reports": len(reports)})
        return reports
