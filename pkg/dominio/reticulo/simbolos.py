"""
Trigonometric dispersion symbols and difference operators on the unit lattice.

On plane waves exp(i m xi) the centered differences act as

    Delta_minus Z(m) = (Z(m + 1) - Z(m - 1)) / 2i   ->  sin(xi)
    Delta_plus  Z(m) = (Z(m + 1) + Z(m - 1)) / 2    ->  cos(xi)

so every trigonometric polynomial in sin and cos is a finite difference
operator. Symbol kinds:

* ``gamma2``: (w + w'') + w' sin(xi) - w'' cos(xi), the second-order symbol;
* ``sin-series``: sum_j w^(j) sin(xi)**j / j! up to order nu;
* ``mixed``: w + w' sin(xi) + sum_{j >= 2} w^(j) xi**j / j!, a centered
  difference for the transport term and continuum dispersion for the rest.
"""

from math import factorial
from typing import Any, Sequence, Tuple, Union

import numpy as np

from dominio.enls.coeficientes import EnlsCoefficients
from dominio.exceptions import PreconditionException, ValidationException
from dominio.modelo.jet import TaylorJet

SIMBOLOS = ("gamma2", "sin-series", "mixed")

Source = Union[TaylorJet, EnlsCoefficients, Sequence[float]]


def _derivatives(source: Source, nu: int) -> Tuple[float, ...]:
    """w^(j)(k_star) for j = 0..nu from a jet, a coefficient set or raw gammas."""
    if isinstance(source, TaylorJet):
        if len(source.derivs) < nu + 1:
            raise PreconditionException(operation="lattice_symbol", invariant=f"jet order >= {nu}")
        return tuple(float(d) for d in source.derivs[: nu + 1])
    gammas = source.gammas if isinstance(source, EnlsCoefficients) else tuple(source)
    if len(gammas) < nu + 1:
        raise PreconditionException(operation="lattice_symbol", invariant=f"jet order >= {nu}")
    return tuple(float(g) * factorial(j) for j, g in enumerate(gammas[: nu + 1]))


def lattice_symbol(source: Source, xi: Any, kind: str = "gamma2", nu: int = 2) -> np.ndarray:
    """
    Frequency symbol of the lattice envelope equation.

    Args:
        source: Taylor jet, coefficient set or gammas at the carrier.
        xi: Lattice quasimomentum in [-pi, pi].
        kind: gamma2, sin-series or mixed.
        nu: Order of the sin-series and mixed symbols (gamma2 is second order).

    Raises:
        PreconditionException: Jet of order below 2 (or below nu).
        ValidationException: Unknown symbol kind.
    """
    if kind not in SIMBOLOS:
        raise ValidationException(field="lattice.symbol", value=kind, rule="known symbol", expected=", ".join(SIMBOLOS))
    order = 2 if kind == "gamma2" else nu
    if order < 2:
        raise PreconditionException(operation="lattice_symbol", invariant="jet order >= 2")
    w = _derivatives(source, order)
    xi = np.asarray(xi, dtype=float)
    if kind == "gamma2":
        return (w[0] + w[2]) + w[1] * np.sin(xi) - w[2] * np.cos(xi)
    if kind == "sin-series":
        s = np.sin(xi)
        return sum((w[j] * s**j / factorial(j) for j in range(order + 1)), np.zeros(xi.shape))
    total = w[0] + w[1] * np.sin(xi)
    for j in range(2, order + 1):
        total = total + w[j] * xi**j / factorial(j)
    return total


def signed_lattice_symbol(source: Source, sign: int, xi: Any, kind: str = "gamma2", nu: int = 2) -> np.ndarray:
    """Symbol s * Gamma(s xi) of the member with frequency sign s."""
    return sign * lattice_symbol(source, sign * np.asarray(xi, dtype=float), kind, nu)


def shift(z: np.ndarray, step: int, periodic: bool = False) -> np.ndarray:
    """Z(m + step), zero beyond the lattice ends unless ``periodic``."""
    if periodic:
        return np.roll(z, -step)
    out = np.zeros_like(z)
    if step > 0:
        out[:-step] = z[step:]
    elif step < 0:
        out[-step:] = z[:step]
    else:
        out[:] = z
    return out


def delta_minus(z: np.ndarray, periodic: bool = False) -> np.ndarray:
    return (shift(z, 1, periodic) - shift(z, -1, periodic)) / 2j


def delta_plus(z: np.ndarray, periodic: bool = False) -> np.ndarray:
    return 0.5 * (shift(z, 1, periodic) + shift(z, -1, periodic))


def apply_gamma2(
    source: Source, sign: int, z: np.ndarray, skip_constant: bool = False, periodic: bool = False
) -> np.ndarray:
    """
    s * Gamma2(s D) Z by centered differences.

    With D the lattice generator (D Z = xi Z on plane waves), sin(s D) = s Delta_minus
    and cos(s D) = Delta_plus. ``skip_constant`` drops the s * w term, removed by
    the rotating frame.
    """
    w = _derivatives(source, 2)
    constant = 0.0 if skip_constant else w[0]
    return sign * (constant + w[2]) * z + w[1] * delta_minus(z, periodic) - sign * w[2] * delta_plus(z, periodic)


def apply_symbol(
    source: Source,
    sign: int,
    z: np.ndarray,
    kind: str = "gamma2",
    nu: int = 2,
    skip_constant: bool = False,
    periodic: bool = False,
) -> np.ndarray:
    """
    s * Gamma(s D) Z for any symbol kind.

    gamma2 and sin-series are finite differences; the mixed symbol applies its
    continuum part as a Fourier multiplier on the periodic extension of the sites.
    """
    if kind == "gamma2":
        return apply_gamma2(source, sign, z, skip_constant, periodic)
    if kind not in SIMBOLOS:
        raise ValidationException(field="lattice.symbol", value=kind, rule="known symbol", expected=", ".join(SIMBOLOS))
    w = _derivatives(source, nu)
    total = np.zeros_like(z) if skip_constant else sign * w[0] * z
    if kind == "sin-series":
        power = z
        for j in range(1, nu + 1):
            power = delta_minus(power, periodic)
            total = total + sign ** (j + 1) * w[j] / factorial(j) * power
        return total
    total = total + w[1] * delta_minus(z, periodic)
    xi = 2.0 * np.pi * np.fft.fftfreq(z.size)
    continuum = sum((w[j] * (sign * xi) ** j / factorial(j) for j in range(2, nu + 1)), np.zeros(xi.shape))
    return total + sign * np.fft.ifft(continuum * np.fft.fft(z))
