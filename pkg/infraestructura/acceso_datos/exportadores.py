"""
Tabular exporters: domain results flattened to named numeric tables.

Each exporter returns a :class:`Tabla` ready for :class:`MapeadorCsv`;
complex values are split into real and imaginary columns.
"""

from typing import Any, Dict, Sequence

import numpy as np

from infraestructura.acceso_datos.mapeador import Tabla


def _filas(*columnas: Any) -> tuple:
    return tuple(tuple(float(v) for v in fila) for fila in zip(*columnas))


def exportar_bandas(model: Any, k: Any, nombre: str = "bands") -> Tabla:
    """(k, omega_1 .. omega_N)."""
    k = np.asarray(k, dtype=float)
    table = model.band_table(k)
    columns = ("k",) + tuple(f"omega_{n}" for n in range(1, table.shape[1] + 1))
    return Tabla(nombre, columns, _filas(k, *table.T))


def exportar_residuos(rect: Any, n_points: int = 201, nombre: str = "rectify_residual") -> Tabla:
    """(eta, xi, residual) of a rectifying map over its domain."""
    rows = rect.residual_sweep(n_points)
    return Tabla(nombre, ("eta", "xi", "residual"), tuple(tuple(float(v) for v in r) for r in rows))


def exportar_campo(state: Any, sign: int = 1, nombre: str = "field") -> Tabla:
    """(x, re, im) of an envelope field."""
    values = state.field(sign)
    return Tabla(nombre, ("x", "re", "im"), _filas(state.grid.x, values.real, values.imag))


def exportar_sitios(state: Any, sign: int = 1, nombre: str = "lattice_sites") -> Tabla:
    """(m, re, im) of a lattice state."""
    values = state.z_plus if sign > 0 else state.z_minus
    return Tabla(nombre, ("m", "re", "im"), _filas(state.sites, values.real, values.imag))


def exportar_espectro(state: Any, sign: int = 1, nombre: str = "spectrum") -> Tabla:
    """(xi, abs) of the grid spectrum, xi ascending."""
    grid = state.grid
    spectrum = np.abs(grid.fourier(state.field(sign)))
    order = np.argsort(grid.xi)
    return Tabla(nombre, ("xi", "abs"), _filas(grid.xi[order], spectrum[order]))


def exportar_modal(field: Any, index: int = -1, nombre: str = "modal_snapshot") -> Tabla:
    """(k, sign, band, re, im) of the lab-frame modal amplitudes at one record."""
    rows = []
    for mode in field.modes:
        values = field.lab(mode, index)
        for k, v in zip(field.k_grid, values):
            rows.append((float(k), float(mode[0]), float(mode[1]), float(v.real), float(v.imag)))
    return Tabla(nombre, ("k", "sign", "band", "re", "im"), tuple(rows))


def exportar_barrido(
    parameter: Sequence[float],
    oracle: Sequence[complex],
    approx: Sequence[complex],
    nombre: str = "quadrature_sweep",
) -> Tabla:
    """(parameter, oracle, approx, rel_error) with magnitudes of complex values."""
    oracle = np.asarray(oracle, dtype=complex)
    approx = np.asarray(approx, dtype=complex)
    error = np.abs(approx - oracle) / np.where(np.abs(oracle) > 0.0, np.abs(oracle), 1.0)
    return Tabla(nombre, ("parameter", "oracle", "approx", "rel_error"), _filas(parameter, np.abs(oracle), np.abs(approx), error))


def exportar_terminos(expansion: Any) -> Dict[str, Any]:
    """JSON document of a stationary-phase expansion and its individual terms."""
    return {"expansion": expansion.describe(), "terms": expansion.term_dump()}
