"""
First nonlinear response of the envelope equation.

Expanding Z = Z0 + alpha Z1 + ... about the homogeneous linear solution
Z0_hat(xi, t) = exp(-i L_s(xi) t) H_s(xi) gives

    dZ1_s/dt = -i L_s Z1_s + (alpha_pi / alpha) p_s[Z0_s, Z0_s, Z0_-s],   Z1(0) = 0.

In the interaction picture z1_hat = exp(i L_s t) Z1_hat the equation is a
pure quadrature, evaluated here with Simpson steps on a fixed time lattice.
"""

from math import floor
from typing import Any, Dict, Mapping, Optional

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import ValidationException

from .coeficientes import EnlsCoefficients, alpha_pi
from .estado import EnvelopeGrid
from .integrador import EnvelopeSolver, OrderSpec

logger = get_logger(__name__)

PASO_CUADRATURA = 0.5


class FirstNonlinearResponse:
    """
    Interaction-picture first nonlinear response z1_hat on the grid frequencies.

    Args:
        coeffs: Coefficient set (its nonlinearity strength is ignored).
        grid: Spatial grid.
        h_hat: Per sign, linear data H_s on ``grid.xi``.
        order: Terms kept in p_s.
        dt: Quadrature step.
    """

    def __init__(
        self,
        coeffs: EnlsCoefficients,
        grid: EnvelopeGrid,
        h_hat: Mapping[int, np.ndarray],
        order: Optional[OrderSpec] = None,
        dt: float = PASO_CUADRATURA,
    ) -> None:
        if dt <= 0.0:
            raise ValidationException(field="fnlr.dt", value=dt, rule="dt > 0")
        order = order or OrderSpec(nu=coeffs.nu, sigma=coeffs.sigma)
        self.coeffs = coeffs
        self.grid = grid
        self.dt = dt
        self.h_hat = {s: np.asarray(h_hat[s], dtype=complex) for s in (1, -1)}
        self._solver = EnvelopeSolver(coeffs, grid, order, "lab")
        self.symbols = {s: self._solver.symbols[s] for s in (1, -1)}
        self.strength = alpha_pi(1.0)
        self._nodes: Dict[int, np.ndarray] = {1: np.zeros((1, grid.n_points), complex), -1: np.zeros((1, grid.n_points), complex)}

    def linear_spectrum(self, sign: int, t: float) -> np.ndarray:
        return np.exp(-1j * self.symbols[sign] * t) * self.h_hat[sign]

    def linear_field(self, sign: int, t: float) -> np.ndarray:
        return self.grid.inverse(self.linear_spectrum(sign, t))

    def forcing(self, sign: int, t: float) -> np.ndarray:
        """Spectrum of (alpha_pi / alpha) p_s[Z0] at time t (lab frame)."""
        za = self.linear_field(sign, t)
        zb = self.linear_field(-sign, t)
        return self.grid.fourier(self.strength * self._solver.cubic(sign, za, zb))

    def _integrand(self, sign: int, t: float) -> np.ndarray:
        return np.exp(1j * self.symbols[sign] * t) * self.forcing(sign, t)

    def _simpson(self, sign: int, a: float, b: float) -> np.ndarray:
        if b <= a:
            return np.zeros(self.grid.n_points, dtype=complex)
        mid = 0.5 * (a + b)
        return (b - a) / 6.0 * (self._integrand(sign, a) + 4.0 * self._integrand(sign, mid) + self._integrand(sign, b))

    def _extend(self, sign: int, n: int) -> np.ndarray:
        nodes = self._nodes[sign]
        if nodes.shape[0] > n:
            return nodes
        rows = [nodes]
        last = nodes[-1]
        for i in range(nodes.shape[0], n + 1):
            last = last + self._simpson(sign, (i - 1) * self.dt, i * self.dt)
            rows.append(last[None, :])
        self._nodes[sign] = np.vstack(rows)
        return self._nodes[sign]

    def slow(self, sign: int, t: float) -> np.ndarray:
        """z1_hat(xi, t) on the grid frequencies."""
        if t <= 0.0:
            return np.zeros(self.grid.n_points, dtype=complex)
        n = int(floor(t / self.dt))
        nodes = self._extend(sign, n)
        return nodes[n] + self._simpson(sign, n * self.dt, t)

    def spectrum(self, sign: int, t: float) -> np.ndarray:
        """Lab-frame spectrum Z1_hat(xi, t) on the grid frequencies."""
        return np.exp(-1j * self.symbols[sign] * t) * self.slow(sign, t)

    def spectrum_at(self, sign: int, xi: Any, t: float) -> np.ndarray:
        """Interaction-picture z1_hat at arbitrary xi by direct summation of the localized field."""
        xi = np.asarray(xi, dtype=float)
        field = self.grid.inverse(self.spectrum(sign, t))
        return np.exp(1j * self.coeffs.symbol(sign, xi, self._solver.order.nu) * t) * self.grid.fourier_at(field, xi)

    def forcing_at(self, sign: int, xi: Any, t: float) -> np.ndarray:
        """exp(i L_s t) times the spectrum of (alpha_pi / alpha) p_s[Z0] at arbitrary xi."""
        xi = np.asarray(xi, dtype=float)
        za = self.linear_field(sign, t)
        zb = self.linear_field(-sign, t)
        values = self.grid.fourier_at(self.strength * self._solver.cubic(sign, za, zb), xi)
        return np.exp(1j * self.coeffs.symbol(sign, xi, self._solver.order.nu) * t) * values

    def describe(self) -> Dict[str, Any]:
        return {"grid": self.grid.describe(), "dt": self.dt, "nu": self._solver.order.nu, "sigma": self._solver.order.sigma}
