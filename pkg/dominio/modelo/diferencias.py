"""
Central finite differences with Richardson extrapolation.

Used for band derivatives of solver-derived dispersion models and for the
quasimomentum derivatives of modal susceptibilities.
"""

from typing import Callable, Sequence, Tuple

import numpy as np

# 5-point central stencils (offsets -2..2) and their leading error order.
_ESTENCILES = {
    0: (np.array([0.0, 0.0, 1.0, 0.0, 0.0]), 0, 8),
    1: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, 1, 4),
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, 2, 4),
    3: (np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0, 3, 2),
    4: (np.array([1.0, -4.0, 6.0, -4.0, 1.0]), 4, 2),
}
_OFFSETS = np.arange(-2, 3, dtype=float)


def central_derivative(
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    order: int,
    h: float,
    levels: int = 2,
) -> Tuple[complex, float]:
    """
    Derivative of ``f`` at ``x0`` by a 5-point stencil and Richardson levels.

    The stencil is evaluated with steps h, 2h, ... 2**levels h; each level
    removes the next even error term. The coarse steps keep the round-off of
    high-order derivatives bounded.

    Returns:
        (estimate, error estimate), the error being the difference between
        the last two extrapolation levels.
    """
    if order == 0:
        value = complex(np.asarray(f(np.array([x0])))[0])
        return value, 0.0
    weights, power, p = _ESTENCILES[order]
    steps = h * 2.0 ** np.arange(levels + 1)
    raw = []
    for step in steps:
        samples = np.asarray(f(x0 + _OFFSETS * step))
        raw.append(np.dot(weights, samples) / step**power)
    table = [list(raw)]
    for level in range(levels):
        previous = table[-1]
        factor = 2.0 ** (p + 2 * level)
        table.append(
            [(factor * previous[i] - previous[i + 1]) / (factor - 1.0) for i in range(len(previous) - 1)]
        )
    best = table[-1][0]
    error = abs(best - table[-2][0]) if levels > 0 else abs(raw[0] - raw[1])
    return complex(best), float(error)


def partial_derivatives(
    f: Callable[[np.ndarray], complex],
    x0: Sequence[float],
    order: int,
    h: float,
) -> Tuple[complex, np.ndarray, np.ndarray]:
    """
    Value, gradient and Hessian of a function of several variables.

    Central differences of second order accuracy with one Richardson level
    (steps h and 2h). ``order`` limits what is computed: 0 value only, 1 adds
    the gradient, 2 adds the Hessian.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    value = complex(f(x0))
    gradient = np.zeros(n, dtype=complex)
    hessian = np.zeros((n, n), dtype=complex)
    if order == 0:
        return value, gradient, hessian

    def unit(i: int) -> np.ndarray:
        e = np.zeros(n)
        e[i] = 1.0
        return e

    def grad_i(i: int, step: float) -> complex:
        e = unit(i) * step
        return (f(x0 + e) - f(x0 - e)) / (2.0 * step)

    def hess_ij(i: int, j: int, step: float) -> complex:
        if i == j:
            e = unit(i) * step
            return (f(x0 + e) - 2.0 * value + f(x0 - e)) / step**2
        ei, ej = unit(i) * step, unit(j) * step
        return (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) / (4.0 * step**2)

    for i in range(n):
        gradient[i] = (4.0 * grad_i(i, h) - grad_i(i, 2 * h)) / 3.0
    if order >= 2:
        for i in range(n):
            for j in range(i, n):
                hessian[i, j] = (4.0 * hess_ij(i, j, h) - hess_ij(i, j, 2 * h)) / 3.0
                hessian[j, i] = hessian[i, j]
    return value, gradient, hessian
