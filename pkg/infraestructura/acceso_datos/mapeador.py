"""Mapping between report objects and their stored text.

This module converts the numeric tables and the JSON summary of an
experiment to and from text. CSV tables use '.' as decimal separator and
17 significant digits, so a stored value reads back bit-for-bit.

Classes:
    Tabla: Named table of numeric rows
    Mapeador: Abstract base class defining the mapping interface
    MapeadorCsv: Table to CSV text
    MapeadorJson: Nested dictionaries to JSON text
"""

import csv
import io
import json
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np

FORMATO_NUMERO = ".17g"


@dataclass(frozen=True)
class Tabla:
    """Named table of numeric rows."""

    name: str
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[float, ...], ...]

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.asarray([row[index] for row in self.rows], dtype=float)


class Mapeador(metaclass=ABCMeta):
    """Abstract base class for object-to-text mapping.

    Abstract Methods:
        ir_a_persistidor: Convert an object to its stored text
        venir_desde_persistidor: Convert stored text back to an object
    """

    extension = ""

    @abstractmethod
    def ir_a_persistidor(self, objeto: Any) -> str:
        """Text written to the store."""

    @abstractmethod
    def venir_desde_persistidor(self, texto: str) -> Any:
        """Object read back from the store."""


def formatear_numero(valor: float) -> str:
    """17 significant digits; 'nan', 'inf' and '-inf' for non-finite values."""
    return format(float(valor), FORMATO_NUMERO)


class MapeadorCsv(Mapeador):
    """Tabla <-> CSV with a header row."""

    extension = ".csv"

    def ir_a_persistidor(self, objeto: Tabla) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(objeto.columns)
        for row in objeto.rows:
            writer.writerow([formatear_numero(v) for v in row])
        return buffer.getvalue()

    def venir_desde_persistidor(self, texto: str, nombre: str = "") -> Tabla:
        reader = csv.reader(io.StringIO(texto))
        header = next(reader, None)
        if header is None:
            return Tabla(nombre, (), ())
        rows = tuple(tuple(float(v) for v in row) for row in reader if row)
        return Tabla(nombre, tuple(header), rows)


def _a_json(valor: Any) -> Any:
    if isinstance(valor, dict):
        return {str(k): _a_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_a_json(v) for v in valor]
    if isinstance(valor, np.ndarray):
        return _a_json(valor.tolist())
    if isinstance(valor, (np.bool_, bool)):
        return bool(valor)
    if isinstance(valor, (np.integer, int)):
        return int(valor)
    if isinstance(valor, (np.floating, float)):
        return float(valor) if np.isfinite(valor) else None
    if isinstance(valor, (complex, np.complexfloating)):
        return [_a_json(float(valor.real)), _a_json(float(valor.imag))]
    if valor is None or isinstance(valor, str):
        return valor
    return str(valor)


class MapeadorJson(Mapeador):
    """Nested dictionaries <-> JSON; numpy scalars and arrays become plain values, non-finite floats null."""

    extension = ".json"

    def ir_a_persistidor(self, objeto: Any) -> str:
        return json.dumps(_a_json(objeto), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"

    def venir_desde_persistidor(self, texto: str) -> Any:
        return json.loads(texto)
