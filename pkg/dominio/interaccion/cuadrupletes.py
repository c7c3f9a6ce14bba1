"""
Interaction quadruplets and selection rules.

A cubic interaction couples three origin modes (sign, band, k) to one end
mode. Its frequency mismatch is

    phi = s * omega_n(k) - sum_i s_i * omega_{n_i}(k_i),

and the quadruplet is frequency matched (FM) when the origin signs add up to
the end sign within the excited band. Non-FM interactions are suppressed by
the fast phase; FM interactions across the two doublets still fail the
group-velocity condition.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import PreconditionException, ValidationException
from dominio.excitacion.corriente import RADIO_CORTE, wrap_zone
from dominio.modelo.dispersion import DispersionModel

logger = get_logger(__name__)

TOLERANCIA_MOMENTO = 1e-9

FM = "FM"
NO_FM_OPUESTO = "nonFM-opposite"
NO_FM_TERCER_ARMONICO = "nonFM-third-harmonic"
VIOLA_VELOCIDAD = "GVM-violating"
CLASIFICACIONES = (FM, NO_FM_OPUESTO, NO_FM_TERCER_ARMONICO, VIOLA_VELOCIDAD)


@dataclass(frozen=True)
class Mode:
    """Bloch mode with frequency sign ``sign``, band ``band`` and quasimomentum ``k``."""

    sign: int
    band: int
    k: float

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValidationException(field="mode.sign", value=self.sign, rule="sign in {+1, -1}")
        if self.band < 1:
            raise ValidationException(field="mode.band", value=self.band, rule="band >= 1")
        if not -np.pi - 1e-12 <= self.k <= np.pi + 1e-12:
            raise ValidationException(field="mode.k", value=self.k, rule="k in the Brillouin zone [-pi, pi]")

    def frequency(self, model: DispersionModel) -> float:
        return float(model.signed_omega(self.sign, self.band, np.array([self.k]))[0])


@dataclass(frozen=True)
class Quadruplet:
    """
    End mode and its three origins.

    Raises:
        ValidationException: k differs from k' + k'' + k''' modulo 2 pi.
    """

    end: Mode
    origins: Tuple[Mode, Mode, Mode]

    def __post_init__(self) -> None:
        if len(self.origins) != 3:
            raise ValidationException(field="quadruplet.origins", value=len(self.origins), rule="three origins")
        if self.momentum_mismatch > TOLERANCIA_MOMENTO:
            raise ValidationException(
                field="quadruplet.k", value=self.momentum_mismatch, rule="k = k' + k'' + k''' mod 2 pi",
            )

    @property
    def momentum_mismatch(self) -> float:
        total = sum(m.k for m in self.origins)
        return float(abs(wrap_zone(self.end.k - total)))

    @property
    def signs(self) -> Tuple[int, int, int, int]:
        return (self.end.sign,) + tuple(m.sign for m in self.origins)  # type: ignore[return-value]

    @property
    def bands(self) -> Tuple[int, int, int, int]:
        return (self.end.band,) + tuple(m.band for m in self.origins)  # type: ignore[return-value]

    @classmethod
    def build(cls, signs, bands, ks) -> "Quadruplet":
        """Quadruplet from (end, origin', origin'', origin''') tuples."""
        modes = [Mode(int(s), int(n), float(k)) for s, n, k in zip(signs, bands, ks)]
        return cls(end=modes[0], origins=(modes[1], modes[2], modes[3]))

    @classmethod
    def canonical(cls, sign: int, n0: int, k_star: float) -> "Quadruplet":
        """Self-interaction (s; s, s, -s) of the doublet member at s k_star."""
        k = sign * k_star
        return cls.build((sign, sign, sign, -sign), (n0,) * 4, (k, k, k, -k))

    def describe(self) -> Dict[str, Any]:
        return {
            "signs": list(self.signs),
            "bands": list(self.bands),
            "ks": [self.end.k] + [m.k for m in self.origins],
        }


def phase_value(model: DispersionModel, quad: Quadruplet) -> float:
    """Frequency mismatch s omega_n(k) - sum_i s_i omega_{n_i}(k_i)."""
    return quad.end.frequency(model) - sum(m.frequency(model) for m in quad.origins)


@dataclass(frozen=True)
class QuadrupletClass:
    """
    Outcome of ``classify_quadruplet``.

    Attributes:
        label: One of FM, nonFM-opposite, nonFM-third-harmonic, GVM-violating.
        phi: Frequency mismatch at the quadruplet.
        gvm_margin: Largest difference between the signed group velocities
            s_i omega'(k_i) of the origins.
        doublets: Doublet label of every mode (+1 at +k_star, -1 at -k_star,
            0 for an end mode outside both doublets).
        localization: Distance of each origin to its doublet center.
    """

    label: str
    phi: float
    gvm_margin: float
    doublets: Tuple[int, int, int, int]
    localization: Tuple[float, float, float]

    @property
    def frequency_matched(self) -> bool:
        return self.label in (FM, VIOLA_VELOCIDAD)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "phi": self.phi,
            "gvm_margin": self.gvm_margin,
            "doublets": list(self.doublets),
            "localization": list(self.localization),
        }


def _doublet_of(mode: Mode, k_star: float, pi0: float) -> Tuple[int, float]:
    """Doublet label d with k ~ d * sign * k_star, and the distance to that center."""
    best, gap = 0, np.inf
    for d in (1, -1):
        distance = float(abs(wrap_zone(mode.k - d * mode.sign * k_star)))
        if distance < gap:
            best, gap = d, distance
    return (best, gap) if gap <= pi0 else (0, gap)


def classify_quadruplet(
    model: DispersionModel,
    k_star: float,
    n0: int,
    quad: Quadruplet,
    pi0: float = RADIO_CORTE,
    tolerance: float = 1e-9,
) -> QuadrupletClass:
    """
    Selection-rule verdict of a quadruplet whose origins are excited modes.

    Args:
        model: Dispersion model.
        k_star: Carrier quasimomentum of the positive-frequency member.
        n0: Excited band.
        quad: Quadruplet to classify.
        pi0: Localization radius around the doublet centers.
        tolerance: Velocity difference below which group velocities match.

    Raises:
        PreconditionException: An origin lies outside band n0 or farther
            than pi0 from both doublet centers.
    """
    origins = []
    for m in quad.origins:
        label, gap = _doublet_of(m, k_star, pi0)
        if m.band != n0 or label == 0:
            raise PreconditionException(
                operation="classify_quadruplet",
                invariant="origins localized within pi0 of the excited doublets in band n0",
                context={"mode": [m.sign, m.band, m.k], "distance": gap},
            )
        origins.append((label, gap))
    end_label, _ = _doublet_of(quad.end, k_star, pi0)
    if quad.end.band != n0:
        end_label = 0

    phi = phase_value(model, quad)
    velocities = [m.sign * float(model.derivative(m.band, np.array([m.k]), 1)[0]) for m in quad.origins]
    margin = float(max(abs(a - b) for a in velocities for b in velocities))

    total = sum(m.sign for m in quad.origins)
    if quad.end.band != n0 or abs(total) == 3:
        label = NO_FM_TERCER_ARMONICO
    elif total == -quad.end.sign:
        label = NO_FM_OPUESTO
    elif len({d for d, _ in origins}) > 1 or margin > tolerance:
        label = VIOLA_VELOCIDAD
    else:
        label = FM

    result = QuadrupletClass(
        label=label,
        phi=phi,
        gvm_margin=margin,
        doublets=(end_label,) + tuple(d for d, _ in origins),  # type: ignore[arg-type]
        localization=tuple(g for _, g in origins),  # type: ignore[arg-type]
    )
    logger.debug("Cuadruplete clasificado", extra=result.to_dict())
    return result
