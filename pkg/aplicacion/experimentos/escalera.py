"""
Accuracy ladder: envelope approximations of increasing order against the
truncated modal reference, across the beta sweep.

For every beta the reference and its first nonlinear response are computed
once; each rung then runs the sourced envelope equation driven by the same
current, assembles U_Z on the reference grid and measures the relative error
over slow times [tau0, tau_star]. The smallest beta is repeated on a doubled
quasimomentum grid; when its errors move by more than the convergence
threshold the row is flagged and left out of the slope fits.
"""

from typing import Any, Dict, List, Optional

import numpy as np

from aplicacion.ajuste import Criterion, ScalingReport
from aplicacion.experimentos.base import BaseExperimento
from config.logging_config import get_logger
from dominio.enls import LinearRampSource, extract_coeffs, initial_state, integrate_enls
from dominio.exceptions import NlsRegimeException
from dominio.excitacion import DoubletExcitation
from dominio.referencia import ModalField, assemble_uz, error_norm, matched_source_data, reference_grid
from dominio.rectificacion import RectifyMap

logger = get_logger(__name__)

ORDEN_REFERENCIA = 4


class ExperimentoEscalera(BaseExperimento):
    nombre = "ladder"

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.rungs = [dict(r) for r in self.opcion("rungs", [])]
        self.escalas = self.configurador.crear_escalas()

    def _excitacion(self, beta: float) -> DoubletExcitation:
        return self.configurador.crear_excitacion(beta, self.escalas.alpha(beta), self.escalas.rho(beta))

    def _error_peldano(
        self, rung: Dict[str, Any], exc: DoubletExcitation, reference: ModalField, fnlr: Optional[ModalField]
    ) -> float:
        model = self.configurador.crear_modelo()
        nu, sigma = int(rung["nu"]), int(rung.get("sigma", 0))
        jet = self.configurador.crear_jet(exc.k_star, exc.n0)
        reference_rect = RectifyMap(model, jet, ORDEN_REFERENCIA, domain_radius=exc.pi0)
        rect = RectifyMap(model, jet, nu, domain_radius=exc.pi0)
        coeffs = extract_coeffs(model, jet, rect, nu=nu, sigma=sigma, alpha=exc.alpha)
        grid = self.configurador.crear_grilla(exc.beta)
        h_hat = {s: matched_source_data(exc, reference_rect, rect, s, grid.xi) for s in (1, -1)}
        source = LinearRampSource(coeffs, grid, h_hat, exc.envelope, exc.rho, nu)
        zero = np.zeros(grid.n_points, dtype=complex)
        run = self.integrar(
            integrate_enls,
            "integrate_enls",
            {"beta": exc.beta, "rung": rung["name"]},
            coeffs=coeffs,
            state=initial_state(grid, zero, zero.copy()),
            order_spec={"nu": nu, "sigma": sigma, "quintic": bool(rung.get("quintic", False))},
            beta=exc.beta,
            rho=exc.rho,
            t_end=float(reference.times[-1]),
            dt=float(self.valor("solver.dt", 0.05)),
            method=str(self.valor("solver.method", "ifrk4")),
            source=source,
            snapshot_times=reference.times,
            phase_limit=float(self.valor("solver.phase_limit", 0.1)),
            progress_every=self.configurador.progress_every,
        )
        approx = assemble_uz(
            run,
            rect,
            reference,
            model=model,
            alpha=exc.alpha,
            fnlr=fnlr,
            sigma_g=int(self.valor("reference.sigma_g", 0)),
        )
        return error_norm(reference, approx, window=(exc.envelope.tau0, self.escalas.tau_star)).total

    def _errores(self, beta: float, refine: int = 1) -> Dict[str, float]:
        exc = self._excitacion(beta)
        jet = self.configurador.crear_jet(exc.k_star, exc.n0)
        t_end = self.escalas.tau_star / exc.rho
        k = reference_grid(beta, jet.velocity, t_end)
        if refine > 1:
            k = -np.pi + 2.0 * np.pi * np.arange(refine * k.size) / (refine * k.size)
        options = {
            "k_grid": k,
            "t_end": t_end,
            "record_taus": self.configurador.record_taus(exc.envelope.tau0, self.escalas.tau_star),
        }
        reference = self.referencia_modal(exc, **options)
        fnlr = None
        if self.valor("reference.indirect", "quasi_static") == "fnlr":
            fnlr = self.referencia_modal(exc, linearized=True, **options)
        errors = {rung["name"]: self._error_peldano(rung, exc, reference, fnlr) for rung in self.rungs}
        logger.info(
            "Punto de la escalera completado",
            extra={"beta": beta, "alpha": exc.alpha, "rho": exc.rho, "N": int(k.size), **errors},
        )
        return {"beta": beta, "alpha": exc.alpha, "rho": exc.rho, **errors}

    def _convergencia(self, row: Dict[str, float]) -> float:
        """Largest relative change of the rung errors on a doubled grid."""
        refined = self._errores(row["beta"], refine=2)
        changes = [abs(refined[name] - row[name]) / row[name] for name in self._nombres() if row[name] > 0.0]
        return float(max(changes, default=0.0))

    def _nombres(self) -> List[str]:
        return [str(r["name"]) for r in self.rungs]

    def ejecutar(self) -> List[ScalingReport]:
        self.escalas.check_sweep()
        report = ScalingReport(
            name="ladder",
            x_column="beta",
            columns=("beta", "alpha", "rho", *self._nombres(), "excluded", "grid_change"),
            criteria=tuple(
                Criterion(str(r["name"]), "slope", float(r["target"]), float(r["tolerance"])) for r in self.rungs
            ),
            exclude_column="excluded",
            min_points=int(self.opcion("min_fit_points", 4)),
        )
        report.notes["scaling"] = self.escalas.to_dict()
        betas = sorted(self.escalas.beta_sweep, reverse=True)
        barrido = self.ejecutor.barrer(self._errores, betas)
        rows = [dict(r, excluded=0.0, grid_change=float("nan")) for r in barrido.resultados]

        if barrido.completo and rows and self.opcion("convergence_check", True):
            smallest = rows[-1]
            try:
                smallest["grid_change"] = self._convergencia(smallest)
            except NlsRegimeException as e:
                barrido.error = e
            else:
                if smallest["grid_change"] > float(self.opcion("convergence_threshold", 0.05)):
                    smallest["excluded"] = 1.0
                    logger.warning(
                        "Beta mínimo excluido del ajuste por convergencia de malla",
                        extra={"beta": smallest["beta"], "grid_change": smallest["grid_change"]},
                    )
        for row in rows:
            report.add_row(row)
        return [self.cerrar(report, barrido)]
