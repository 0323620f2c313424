"""Laser light as a product of coherent states, one per (polarization, ell) mode.

A passive linear optical element maps creation operators linearly,
``a+_m -> sum_m' U[m', m] a+_m'``, and sends a product of coherent states
``|alpha_m>`` to the product ``|sum_m U[m', m] alpha_m>``. Evolving the
amplitude map is therefore the whole quantum description, and the output is a
product state by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .modes import Mode, Pol, apply_to_amplitudes, sort_modes, step_mode_map
from .walk import StepParams

__all__ = [
    "CoherentField",
    "SeparabilityReport",
    "evolve_coherent",
    "mean_photon_spectrum",
    "separability_certificate",
]


@dataclass(frozen=True)
class CoherentField:
    alphas: Mapping[Mode, complex] = field(default_factory=dict)

    def __post_init__(self):
        for mode, a in self.alphas.items():
            if not math.isfinite(abs(a)):
                raise ValueError(f"non-finite coherent amplitude at {mode}")

    @classmethod
    def from_polarization(
        cls, alpha: complex, c_r: complex, c_l: complex, ell: int = 0
    ) -> "CoherentField":
        """Single-OAM beam with polarization (c_R, c_L) and total amplitude ``alpha``."""
        return cls({(Pol.R, ell): alpha * c_r, (Pol.L, ell): alpha * c_l})

    @property
    def mean_photon_number(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.alphas.values())


def evolve_coherent(field: CoherentField, params: StepParams = StepParams()) -> CoherentField:
    """One walk step: q-plate rule on each a+, then the coin plate."""
    mode_map = step_mode_map(params.q, params.coin_unitary)
    return CoherentField(apply_to_amplitudes(dict(field.alphas), mode_map))


def mean_photon_spectrum(field: CoherentField) -> dict[int, float]:
    out: dict[int, float] = {}
    for (_, ell), a in field.alphas.items():
        out[ell] = out.get(ell, 0.0) + abs(a) ** 2
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class SeparabilityReport:
    valid: bool
    modes: list[Mode]
    amplitudes: list[complex]
    populated_modes: int
    representation_size: int

    @property
    def factors(self) -> list[tuple[Mode, complex]]:
        return list(zip(self.modes, self.amplitudes))


def separability_certificate(field: CoherentField, atol: float = 0.0) -> SeparabilityReport:
    """Certify the state is a product of single-mode coherent states.

    The field is stored as one amplitude per mode, i.e. as the list of factors
    of a tensor product, so the certificate is structural: the representation
    holds exactly one complex number per populated mode. An entangled
    multimode state has no such description.
    """
    populated = [m for m in sort_modes(field.alphas) if abs(field.alphas[m]) > atol]
    amps = [complex(field.alphas[m]) for m in populated]
    size = len(field.alphas)
    valid = size == len(set(field.alphas)) and all(math.isfinite(abs(a)) for a in amps)
    return SeparabilityReport(valid, populated, amps, len(populated), size)
