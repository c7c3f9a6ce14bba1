"""
Spatial grids, envelope states and reference frames of the envelope solver.

Fourier convention: Z_hat(xi) = (1/2 pi) * integral of Z(x) exp(-i xi x) dx.
Grid spectra are kept in that normalization so that they can be compared
with continuum transforms and evaluated off the grid by direct summation.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from dominio.exceptions import ValidationException

FRAMES = ("lab", "rotating", "comoving")
EXTENSION_POR_BETA = 40.0


@dataclass(frozen=True)
class EnvelopeGrid:
    """
    Uniform periodic grid x_n = -L/2 + n L/N.

    Attributes:
        length: Extent L of the periodic domain.
        n_points: Number of points N (even).
    """

    length: float
    n_points: int

    def __post_init__(self) -> None:
        if self.length <= 0.0:
            raise ValidationException(field="grid.L", value=self.length, rule="L > 0")
        if self.n_points < 16 or self.n_points % 2:
            raise ValidationException(field="grid.N", value=self.n_points, rule="even N >= 16")

    @classmethod
    def for_beta(cls, beta: float, n_points: int, l_over_beta: float = EXTENSION_POR_BETA) -> "EnvelopeGrid":
        return cls(length=l_over_beta / beta, n_points=n_points)

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.length + self.dx * np.arange(self.n_points)

    @property
    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def _phase(self) -> np.ndarray:
        return np.exp(0.5j * self.xi * self.length)

    def fourier(self, z: np.ndarray) -> np.ndarray:
        """Continuum-normalized spectrum on the grid frequencies ``xi``."""
        return self.dx / (2.0 * np.pi) * self._phase * np.fft.fft(z)

    def inverse(self, z_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(z_hat / self._phase) * (2.0 * np.pi / self.dx)

    def derivative(self, z: np.ndarray, order: int) -> np.ndarray:
        """(-i d/dx)**order applied spectrally."""
        if order == 0:
            return z
        return np.fft.ifft(self.xi**order * np.fft.fft(z))

    def fourier_at(self, z: np.ndarray, xi: Any) -> np.ndarray:
        """Spectrum at arbitrary frequencies by direct summation (band-limited interpolation)."""
        xi = np.asarray(xi, dtype=float)
        flat = xi.reshape(-1)
        values = np.empty(flat.shape, dtype=complex)
        x = self.x
        for start in range(0, flat.size, 256):
            block = flat[start:start + 256]
            values[start:start + 256] = np.exp(-1j * np.outer(block, x)) @ z
        return (self.dx / (2.0 * np.pi) * values).reshape(xi.shape)

    def norm(self, z: np.ndarray) -> float:
        """L2 norm of grid samples."""
        return float(np.sqrt(self.dx * np.sum(np.abs(z) ** 2)))

    def describe(self) -> Dict[str, Any]:
        return {"L": self.length, "N": self.n_points}


def frame_phase(gammas: Tuple[float, ...], sign: int, xi: Any, frame: str) -> np.ndarray:
    """
    Part Theta(xi) of the linear symbol removed by ``frame``.

    lab removes nothing; rotating removes s*gamma0; comoving also removes the
    transport term gamma1*xi.
    """
    xi = np.asarray(xi, dtype=float)
    if frame not in FRAMES:
        raise ValidationException(field="frame", value=frame, rule="frame in lab, rotating, comoving")
    theta = np.zeros(xi.shape)
    if frame in ("rotating", "comoving"):
        theta = theta + sign * gammas[0]
    if frame == "comoving" and len(gammas) > 1:
        theta = theta + gammas[1] * xi
    return theta


@dataclass(frozen=True)
class Snapshot:
    """Fields of both doublet members at time ``t``."""

    t: float
    z_plus: np.ndarray
    z_minus: np.ndarray


@dataclass(frozen=True)
class EnvelopeState:
    """
    Fields Z_plus, Z_minus on a grid at fast time t, in a reference frame.

    Attributes:
        grid: Spatial grid.
        z_plus: Field of the positive-frequency doublet member.
        z_minus: Field of the negative-frequency member.
        t: Fast time.
        frame: lab, rotating or comoving.
        gammas: Dispersion coefficients defining the frame.
        snapshots: States recorded during the run that produced this one.
        diagnostics: Run diagnostics (norm drift, residuals, step counts).
    """

    grid: EnvelopeGrid
    z_plus: np.ndarray
    z_minus: np.ndarray
    t: float = 0.0
    frame: str = "lab"
    gammas: Tuple[float, ...] = (0.0, 0.0)
    snapshots: Tuple[Snapshot, ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def field(self, sign: int) -> np.ndarray:
        return self.z_plus if sign > 0 else self.z_minus

    def spectrum_at(self, sign: int, xi: Any, frame: str = "lab", snapshot: Optional[Snapshot] = None) -> np.ndarray:
        """Spectrum of Z_sign at arbitrary xi, converted to ``frame``."""
        source = snapshot or Snapshot(self.t, self.z_plus, self.z_minus)
        z = source.z_plus if sign > 0 else source.z_minus
        xi = np.asarray(xi, dtype=float)
        values = self.grid.fourier_at(z, xi)
        shift = frame_phase(self.gammas, sign, xi, self.frame) - frame_phase(self.gammas, sign, xi, frame)
        return values * np.exp(-1j * shift * source.t)

    def in_frame(self, frame: str) -> "EnvelopeState":
        """Same state expressed in another frame (exact spectral phase)."""
        if frame == self.frame:
            return self
        xi = self.grid.xi
        fields = []
        for sign, z in ((1, self.z_plus), (-1, self.z_minus)):
            shift = frame_phase(self.gammas, sign, xi, self.frame) - frame_phase(self.gammas, sign, xi, frame)
            fields.append(self.grid.inverse(np.exp(-1j * shift * self.t) * self.grid.fourier(z)))
        return replace(self, z_plus=fields[0], z_minus=fields[1], frame=frame, snapshots=())

    def conjugation_defect(self) -> float:
        """max |Z_minus - conj(Z_plus)|."""
        return float(np.max(np.abs(self.z_minus - np.conj(self.z_plus))))

    def norm(self, sign: int = 1) -> float:
        return self.grid.norm(self.field(sign))

    def peak(self, sign: int = 1) -> float:
        return float(np.max(np.abs(self.field(sign))))


def initial_state(
    grid: EnvelopeGrid,
    z_plus: np.ndarray,
    z_minus: Optional[np.ndarray] = None,
    frame: str = "lab",
    gammas: Tuple[float, ...] = (0.0, 0.0),
) -> EnvelopeState:
    """State at t = 0; ``z_minus`` defaults to conj(z_plus)."""
    z_plus = np.asarray(z_plus, dtype=complex)
    z_minus = np.conj(z_plus) if z_minus is None else np.asarray(z_minus, dtype=complex)
    if z_plus.shape != (grid.n_points,) or z_minus.shape != (grid.n_points,):
        raise ValidationException(field="state", value=z_plus.shape, rule=f"fields of length {grid.n_points}")
    frame_phase(gammas, 1, 0.0, frame)
    return EnvelopeState(grid=grid, z_plus=z_plus, z_minus=z_minus, frame=frame, gammas=tuple(gammas))
