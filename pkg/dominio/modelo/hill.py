"""
Plane-wave solver for the one-dimensional Hill operator.

The scalar surrogate of the periodic Maxwell eigenproblem is

    -u'' = omega**2 * eps(r) * u,    eps(r + 1) = eps(r) > 0,

with Bloch solutions u = exp(ikr) P(r, k). Expanding P in 2M + 1 plane waves
gives the generalized Hermitian problem A c = omega**2 B c with
A = diag((k + 2 pi m)**2) and the Toeplitz matrix B[m, m'] = eps_hat[m - m'].
"""

from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, ValidationException

from .dispersion import BaseBand, DispersionModel
from .susceptibilidad import SusceptibilityProvider, as_complex

logger = get_logger(__name__)

UMBRAL_DEGENERACION = 1e-6


def fourier_coefficients(profile: Mapping[str, Any], n_max: int) -> np.ndarray:
    """
    Exact Fourier coefficients eps_hat_j, j = -n_max..n_max, of a profile.

    Args:
        profile: ``{"constant": v}`` or ``{"piecewise": [[r0, v0], [r1, v1], ...]}``
            where v_i holds on [r_i, r_{i+1}) and the last piece ends at 1.
    """
    j = np.arange(-n_max, n_max + 1)
    if "constant" in profile:
        coeffs = np.zeros(j.size, dtype=complex)
        coeffs[n_max] = float(profile["constant"])
        return coeffs
    pieces = sorted((float(r), float(v)) for r, v in profile.get("piecewise", []))
    if not pieces or pieces[0][0] != 0.0 or pieces[-1][0] >= 1.0:
        raise ValidationException(
            field="potential.piecewise",
            value=pieces,
            rule="breakpoints start at 0 and lie in [0, 1)",
        )
    starts = np.array([p[0] for p in pieces])
    ends = np.append(starts[1:], 1.0)
    values = np.array([p[1] for p in pieces])
    coeffs = np.zeros(j.size, dtype=complex)
    nonzero = j != 0
    jj = j[nonzero][:, None]
    phase = -2j * np.pi * jj
    coeffs[nonzero] = np.sum(values * (np.exp(phase * ends) - np.exp(phase * starts)) / phase, axis=1)
    coeffs[~nonzero] = np.sum(values * (ends - starts))
    return coeffs


def sample_profile(profile: Mapping[str, Any], r: np.ndarray) -> np.ndarray:
    """Profile values at points r (taken modulo 1)."""
    if "constant" in profile:
        return np.full(r.shape, float(profile["constant"]))
    pieces = sorted((float(a), float(v)) for a, v in profile["piecewise"])
    starts = np.array([p[0] for p in pieces])
    values = np.array([p[1] for p in pieces])
    index = np.searchsorted(starts, np.mod(r, 1.0), side="right") - 1
    return values[index]


class HillSolver:
    """
    Plane-wave eigen-solver at arbitrary quasimomenta.

    Solutions are computed at |k| and mirrored, P(r, -k) = conj P(r, k), so the
    bands are exactly even. Eigenvector phases are fixed by making the largest
    coefficient real and positive.
    """

    def __init__(self, potential: Mapping[str, Any], n_bands: int, n_plane_waves: int = 41, weight: str = "epsilon") -> None:
        if weight not in ("epsilon", "unit"):
            raise ValidationException(field="weight", value=weight, rule="epsilon or unit")
        if n_plane_waves % 2 == 0 or n_plane_waves < 2 * n_bands + 1:
            raise ValidationException(
                field="n_plane_waves", value=n_plane_waves, rule="odd and at least 2*n_bands + 1"
            )
        self.potential = dict(potential)
        self.n_bands = n_bands
        self.m_max = n_plane_waves // 2
        self.weight = weight
        self.orders = np.arange(-self.m_max, self.m_max + 1)
        eps_hat = fourier_coefficients(self.potential, 2 * self.m_max)
        diff = self.orders[:, None] - self.orders[None, :]
        self.b_matrix = eps_hat[diff + 2 * self.m_max]
        if np.min(linalg.eigvalsh(self.b_matrix)) <= 0.0:
            raise ValidationException(field="potential", value=self.potential, rule="eps(r) > 0")

    @lru_cache(maxsize=4096)
    def _solve_nonnegative(self, k: float) -> Tuple[np.ndarray, np.ndarray]:
        a_matrix = np.diag((k + 2.0 * np.pi * self.orders) ** 2).astype(complex)
        try:
            eigvals, eigvecs = linalg.eigh(
                a_matrix, self.b_matrix, subset_by_index=[0, self.n_bands - 1]
            )
        except linalg.LinAlgError as exc:
            raise ConvergenceException(operation="hill eigen-solve", context={"k": k}, cause=exc) from exc
        omegas = np.sqrt(np.clip(eigvals, 0.0, None))
        if self.weight == "unit":
            eigvecs = eigvecs / np.linalg.norm(eigvecs, axis=0)
        pivot = np.argmax(np.abs(eigvecs), axis=0)
        phases = eigvecs[pivot, np.arange(eigvecs.shape[1])]
        eigvecs = eigvecs * (np.abs(phases) / phases)
        return omegas, eigvecs

    def solve(self, k: float) -> Tuple[np.ndarray, np.ndarray]:
        """Frequencies and plane-wave coefficients (columns) of the lowest bands at k."""
        omegas, vecs = self._solve_nonnegative(abs(float(k)))
        if k < 0.0:
            # c_m(-k) = conj c_{-m}(k)
            vecs = np.conj(vecs[::-1, :])
        return omegas, vecs

    def periodic_part(self, n: int, k: float, r: np.ndarray) -> np.ndarray:
        """P_n(r, k) sampled at r."""
        _, vecs = self.solve(k)
        basis = np.exp(2j * np.pi * np.outer(r, self.orders))
        return basis @ vecs[:, n - 1]


class HillBand(BaseBand):
    """
    Band n of a :class:`HillSolver`, evaluated by direct eigen-solves.

    A real potential makes every band even in k; the solve runs at |k| so the
    symmetry holds exactly on any grid.
    """

    def __init__(self, solver: HillSolver, n: int) -> None:
        self.solver = solver
        self.n = n

    def __call__(self, k: Any) -> np.ndarray:
        k_arr = np.asarray(k, dtype=float)
        wrapped = np.abs(np.mod(k_arr + np.pi, 2.0 * np.pi) - np.pi)
        values = np.array([self.solver.solve(float(kk))[0][self.n - 1] for kk in wrapped.ravel()])
        return values.reshape(k_arr.shape)

    def describe(self) -> Dict[str, Any]:
        return {"kind": "hill", "band": self.n, "plane_waves": 2 * self.solver.m_max + 1}


class HillOverlapSusceptibility(SusceptibilityProvider):
    """
    Cell-averaged quartic overlap of Bloch modes against a periodic chi3(r).

    Q̆ = q_s * mean_r[ chi3(r) exp(i(k1 + k2 + k3 - k) r) conj(P_end) P_1 P_2 P_3 ].
    Not factorized: usable for coefficient extraction only.
    """

    factorized = False

    def __init__(self, solver: HillSolver, chi3: Optional[Mapping[str, Any]] = None, coupling: complex = 1j, n_r: int = 256) -> None:
        self.solver = solver
        self.chi3_spec = dict(chi3 or {"constant": 1.0})
        self.coupling = complex(coupling)
        self.r = np.arange(n_r) / n_r
        self.chi3 = sample_profile(self.chi3_spec, self.r)

    def _scalar(self, sign: int, bands: Sequence[int], ks: Sequence[float]) -> complex:
        end = self.solver.periodic_part(bands[0], ks[0], self.r)
        product = np.conj(end) * np.exp(1j * (ks[1] + ks[2] + ks[3] - ks[0]) * self.r) * self.chi3
        for n, k in zip(bands[1:], ks[1:]):
            product = product * self.solver.periodic_part(n, k, self.r)
        q = self.coupling if sign > 0 else self.coupling.conjugate()
        return complex(q * np.mean(product))

    def value(self, signs, bands, ks, freqs) -> np.ndarray:
        arrays = np.broadcast_arrays(*[np.asarray(k, dtype=float) for k in ks])
        flat = [a.ravel() for a in arrays]
        out = np.array(
            [self._scalar(signs[0], bands, [f[i] for f in flat]) for i in range(flat[0].size)],
            dtype=complex,
        )
        return out.reshape(arrays[0].shape)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "hill-overlap",
            "chi3": self.chi3_spec,
            "coupling": [self.coupling.real, self.coupling.imag],
            "weight": self.solver.weight,
        }


def find_degeneracies(table: np.ndarray, k_grid: np.ndarray, threshold: float = UMBRAL_DEGENERACION) -> List[Dict[str, float]]:
    """Grid points where consecutive bands are closer than ``threshold``."""
    found = []
    gaps = np.diff(table, axis=1)
    for i, j in zip(*np.nonzero(gaps < threshold)):
        found.append({"band": int(j + 1), "k": float(k_grid[i]), "gap": float(gaps[i, j])})
    return found


def hill_bands(
    potential: Mapping[str, Any],
    n_bands: int = 4,
    n_k: int = 128,
    n_plane_waves: int = 41,
    weight: str = "epsilon",
    susceptibility: Optional[SusceptibilityProvider] = None,
    chi3: Optional[Mapping[str, Any]] = None,
    coupling: Any = (0.0, 1.0),
) -> DispersionModel:
    """
    Band structure of a Hill operator sampled on a uniform k-grid.

    Args:
        potential: Permittivity profile, see :func:`fourier_coefficients`.
        n_bands: Number of bands kept (>= 1).
        n_k: Grid size on [-pi, pi] (>= 16).
        n_plane_waves: Odd plane-wave count 2M + 1.
        weight: ``"epsilon"`` (eps-weighted unit norm) or ``"unit"``.
        susceptibility: Provider override; the overlap provider by default.
        chi3: Periodic chi3 profile of the overlap provider.
        coupling: Coupling constant of the overlap provider.

    Returns:
        Model with provenance ``"hill-solver"``; degenerate grid points are
        listed in ``metadata["degenerate_points"]``.
    """
    if n_bands < 1:
        raise ValidationException(field="n_bands", value=n_bands, rule="n_bands >= 1")
    if n_k < 16:
        raise ValidationException(field="n_k", value=n_k, rule="n_k >= 16")

    solver = HillSolver(potential, n_bands, n_plane_waves, weight)
    bands = tuple(HillBand(solver, n) for n in range(1, n_bands + 1))
    k_grid = np.linspace(-np.pi, np.pi, n_k)
    table = np.stack([b(k_grid) for b in bands], axis=-1)
    degenerate = find_degeneracies(table, k_grid)
    if degenerate:
        logger.warning("Bandas degeneradas en la grilla", extra={"points": len(degenerate)})
    provider = susceptibility or HillOverlapSusceptibility(solver, chi3, as_complex(coupling))
    logger.info(
        "Bandas de Hill calculadas",
        extra={"n_bands": n_bands, "n_k": n_k, "plane_waves": n_plane_waves, "weight": weight},
    )
    return DispersionModel(
        bands=bands,
        susceptibility=provider,
        provenance="hill-solver",
        k_grid=k_grid,
        metadata={
            "potential": dict(potential),
            "weight": weight,
            "plane_waves": n_plane_waves,
            "degenerate_points": degenerate,
        },
    )
