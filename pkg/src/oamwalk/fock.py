"""Few-photon Fock states under the walk's linear mode map.

A configuration is the sorted tuple of occupied modes, one entry per photon,
so ``((R, 0), (R, 0))`` is two photons in mode (R, 0). Its basis ket is
``prod_m (a+_m)^{n_m} / sqrt(n_m!) |0>``. Evolution substitutes every creation
operator by its image and re-expands the (commuting) product.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .modes import ACCUM_TOL, Mode, ModeMap, Pol, step_mode_map
from .walk import COIN_PRESETS, CoinVector, StepParams, WalkState, run

MAX_PHOTONS = 2

Config = tuple[Mode, ...]

__all__ = [
    "MAX_PHOTONS",
    "FockState",
    "apply_linear_map",
    "apply_mode_map",
    "hom_two_roundtrips",
    "coincidence_amplitudes",
    "distinguishable_coincidence_probability",
    "single_photon_equivalence",
]


def _key(mode: Mode):
    return (mode[1], mode[0].index)


def make_config(modes) -> Config:
    return tuple(sorted(modes, key=_key))


def _occupation_factor(config: Config) -> int:
    """prod_m n_m! for a sorted configuration."""
    if len(config) < 2:
        return 1
    return math.prod(math.factorial(n) for n in Counter(config).values())


@dataclass(frozen=True)
class FockState:
    terms: Mapping[Config, complex]

    def __post_init__(self):
        sizes = {len(c) for c in self.terms}
        if len(sizes) > 1:
            raise ValueError(f"mixed photon numbers {sorted(sizes)} in one state")
        if sizes and max(sizes) > MAX_PHOTONS:
            raise ValueError(f"at most {MAX_PHOTONS} photons are supported")

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls({(): 1 + 0j})

    @classmethod
    def from_modes(cls, *modes: Mode) -> "FockState":
        """Normalized ``prod a+_m |0>`` for the listed modes (repeats allowed)."""
        return cls({make_config(modes): 1 + 0j})

    @property
    def photon_number(self) -> int:
        return len(next(iter(self.terms), ()))

    @property
    def norm2(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.terms.values())

    def amplitude(self, *modes: Mode) -> complex:
        return self.terms.get(make_config(modes), 0j)

    def probabilities(self) -> dict[Config, float]:
        return {c: abs(a) ** 2 for c, a in self.terms.items()}


def apply_linear_map(state: FockState, mode_map: ModeMap) -> FockState:
    """Substitute ``a+_m -> sum image(m)`` in every term and re-normalize the basis."""
    monomials: dict[Config, complex] = {}
    for config, amp in state.terms.items():
        pref = amp / math.sqrt(_occupation_factor(config))
        images = [mode_map(m) for m in config]
        for combo in itertools.product(*images):
            coeff = pref
            for _, a in combo:
                coeff *= a
            out = make_config(m for m, _ in combo)
            monomials[out] = monomials.get(out, 0j) + coeff
    return FockState(
        {c: v * math.sqrt(_occupation_factor(c)) for c, v in monomials.items()}
    )


def apply_mode_map(state: FockState, params: StepParams = StepParams()) -> FockState:
    return apply_linear_map(state, step_mode_map(params.q, params.coin_unitary))


def hom_two_roundtrips(ell: int = 0, params: StepParams = StepParams()) -> FockState:
    """Photons in (R, ell) and (L, ell + 2) after two round trips of the ring."""
    state = FockState.from_modes((Pol.R, ell), (Pol.L, ell + 2))
    for _ in range(2):
        state = apply_mode_map(state, params)
    return state


def coincidence_amplitudes(state: FockState, ell_a: int, ell_b: int) -> dict[Config, complex]:
    """Amplitudes of configurations with one photon at ``ell_a`` and one at ``ell_b``."""
    return {
        c: a
        for c, a in state.terms.items()
        if len(c) == 2 and sorted(m[1] for m in c) == sorted((ell_a, ell_b))
    }


def distinguishable_coincidence_probability(
    ell: int = 0, params: StepParams = StepParams(), n_steps: int = 2
) -> float:
    """Coincidence probability at (ell, ell + 2) for two labeled photons.

    Each photon is evolved on its own and the joint distribution is the product,
    i.e. no exchange symmetry.
    """
    mode_map = step_mode_map(params.q, params.coin_unitary)
    singles = []
    for start in ((Pol.R, ell), (Pol.L, ell + 2)):
        s = FockState.from_modes(start)
        for _ in range(n_steps):
            s = apply_linear_map(s, mode_map)
        p: dict[int, float] = {}
        for (m,), a in s.terms.items():
            p[m[1]] = p.get(m[1], 0.0) + abs(a) ** 2
        singles.append(p)
    p1, p2 = singles
    return p1.get(ell, 0) * p2.get(ell + 2, 0) + p1.get(ell + 2, 0) * p2.get(ell, 0)


def single_photon_equivalence(
    n: int,
    coin: CoinVector | None = None,
    params: StepParams = StepParams(),
) -> float:
    """Max |Fock amplitude - walk amplitude| after ``n`` steps for one photon at ell=0."""
    if not 0 <= n <= 20:
        raise ValueError("n must lie in [0, 20]")
    coin = coin or COIN_PRESETS["symmetric"]
    fock = FockState({((Pol.R, 0),): coin.up, ((Pol.L, 0),): coin.down})
    for _ in range(n):
        fock = apply_mode_map(fock, params)
    walk = run(WalkState({0: coin}), params, n)[-1]
    residual = 0.0
    ells = {m[1] for (m,) in fock.terms} | set(walk.amplitudes)
    for ell in ells:
        c = walk.amplitude(ell)
        residual = max(
            residual,
            abs(fock.amplitude((Pol.R, ell)) - c.up),
            abs(fock.amplitude((Pol.L, ell)) - c.down),
        )
    return residual


def check_normalized(state: FockState, tol: float = ACCUM_TOL) -> None:
    if abs(state.norm2 - 1) > tol:
        raise ValueError(f"Fock state norm² = {state.norm2!r}, expected 1")
