"""Discrete-time quantum walk in polarization x OAM space.

Four descriptions of the same walk: the abstract coined walk (:mod:`.walk`),
classical Jones fields over OAM modes (:mod:`.jones`) including the ring
interferometer (:mod:`.ring`), coherent states (:mod:`.coherent`) and
few-photon Fock states (:mod:`.fock`).
"""

from .modes import ACCUM_TOL, DOWN, OP_TOL, UP, Pol
from .walk import (
    COIN_PRESETS,
    CoinVector,
    StepParams,
    WalkState,
    distribution,
    hadamard,
    run,
    shift,
    spread_stats,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "ACCUM_TOL",
    "OP_TOL",
    "Pol",
    "UP",
    "DOWN",
    "COIN_PRESETS",
    "CoinVector",
    "StepParams",
    "WalkState",
    "hadamard",
    "shift",
    "step",
    "run",
    "distribution",
    "spread_stats",
]
