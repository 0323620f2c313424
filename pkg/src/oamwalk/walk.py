"""Abstract coined quantum walk on the OAM lattice.

The state is an unbounded sparse map ``ell -> CoinVector``. One step is the
coin-conditioned shift followed by the coin flip, ``(I x coin) S``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .modes import ACCUM_TOL, is_unitary, shift_magnitude

__all__ = [
    "CoinVector",
    "WalkState",
    "StepParams",
    "COIN_PRESETS",
    "hadamard",
    "shift",
    "step",
    "inverse_step",
    "run",
    "distribution",
    "spread_stats",
    "classical_distribution",
    "check_normalized",
]


@dataclass(frozen=True, slots=True)
class CoinVector:
    up: complex
    down: complex

    def __post_init__(self):
        if not (cmath.isfinite(self.up) and cmath.isfinite(self.down)):
            raise ValueError(f"coin amplitudes must be finite, got {self!r}")

    @property
    def norm2(self) -> float:
        return abs(self.up) ** 2 + abs(self.down) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)

    @classmethod
    def from_array(cls, v) -> "CoinVector":
        return cls(complex(v[0]), complex(v[1]))


_S2 = 1 / math.sqrt(2)

COIN_PRESETS: dict[str, CoinVector] = {
    "symmetric": CoinVector(_S2, 1j * _S2),
    "up": CoinVector(1, 0),
    "down": CoinVector(0, 1),
}


def hadamard() -> np.ndarray:
    """(1/√2)[[1, 1], [1, -1]] in the (up, down) basis."""
    return np.array([[1, 1], [1, -1]], dtype=complex) * _S2


@dataclass(frozen=True)
class StepParams:
    q: Fraction | float = Fraction(1, 2)
    coin_unitary: np.ndarray = field(default_factory=hadamard)

    def __post_init__(self):
        shift_magnitude(self.q)
        u = np.asarray(self.coin_unitary, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError(f"coin_unitary must be 2x2, got shape {u.shape}")
        if not is_unitary(u):
            raise ValueError("coin_unitary is not unitary within 1e-12")
        object.__setattr__(self, "coin_unitary", u)

    @property
    def shift(self) -> int:
        """Signed lattice displacement of the up component, ``2q``."""
        return shift_magnitude(self.q)


@dataclass(frozen=True)
class WalkState:
    amplitudes: Mapping[int, CoinVector]
    step_count: int = 0

    def __post_init__(self):
        if self.step_count < 0:
            raise ValueError("step_count must be non-negative")

    @classmethod
    def localized(cls, coin: CoinVector | str = "symmetric", ell: int = 0) -> "WalkState":
        if isinstance(coin, str):
            coin = COIN_PRESETS[coin]
        return cls({ell: coin})

    @property
    def norm2(self) -> float:
        return math.fsum(c.norm2 for c in self.amplitudes.values())

    def support(self, atol: float = 0.0) -> list[int]:
        """Sorted sites carrying weight above ``atol``."""
        return sorted(ell for ell, c in self.amplitudes.items() if c.norm2 > atol)

    def amplitude(self, ell: int) -> CoinVector:
        return self.amplitudes.get(ell, CoinVector(0, 0))


def shift(state: WalkState, q) -> WalkState:
    """Move up amplitudes by +2q and down amplitudes by -2q; a pure relabeling."""
    d = shift_magnitude(q)
    moved: dict[int, list[complex]] = {}
    for ell, c in state.amplitudes.items():
        moved.setdefault(ell + d, [0j, 0j])[0] += c.up
        moved.setdefault(ell - d, [0j, 0j])[1] += c.down
    return WalkState(
        {ell: CoinVector(a, b) for ell, (a, b) in moved.items()}, state.step_count
    )


def _apply_coin(state: WalkState, u: np.ndarray, step_count: int) -> WalkState:
    u00, u01, u10, u11 = (complex(x) for x in u.ravel())
    return WalkState(
        {
            ell: CoinVector(u00 * c.up + u01 * c.down, u10 * c.up + u11 * c.down)
            for ell, c in state.amplitudes.items()
        },
        step_count,
    )


def step(state: WalkState, params: StepParams = StepParams()) -> WalkState:
    shifted = shift(state, params.q)
    return _apply_coin(shifted, params.coin_unitary, state.step_count + 1)


def inverse_step(state: WalkState, params: StepParams = StepParams()) -> WalkState:
    """Undo :func:`step`: coin adjoint first, then the opposite shift."""
    if state.step_count == 0:
        raise ValueError("cannot step back from step_count 0")
    uncoined = _apply_coin(state, params.coin_unitary.conj().T, state.step_count)
    back = shift(uncoined, -Fraction(params.shift, 2))
    return WalkState(back.amplitudes, state.step_count - 1)


def run(initial: WalkState, params: StepParams = StepParams(), n_steps: int = 1) -> list[WalkState]:
    """States after 0, 1, ..., n_steps steps (element 0 is ``initial``)."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    states = [initial]
    for _ in range(n_steps):
        states.append(step(states[-1], params))
    return states


def distribution(state: WalkState) -> dict[int, float]:
    return {ell: c.norm2 for ell, c in sorted(state.amplitudes.items())}


def spread_stats(dist: Mapping[int, float]) -> tuple[float, float]:
    """Mean and variance of ``ell`` under a normalized distribution.

    Raises
    ------
    ValueError
        If the probabilities do not sum to one within 1e-10.
    """
    total = math.fsum(dist.values())
    if abs(total - 1) > ACCUM_TOL:
        raise ValueError(f"distribution sums to {total!r}, not 1")
    mean = math.fsum(ell * p for ell, p in dist.items())
    var = math.fsum((ell - mean) ** 2 * p for ell, p in dist.items())
    return mean, var


def classical_distribution(n: int, shift: int = 1, ell0: int = 0) -> dict[int, float]:
    """Unbiased classical random walk after ``n`` steps of ±shift (binomial)."""
    return {
        ell0 + shift * (2 * k - n): math.comb(n, k) / 2**n for k in range(n + 1)
    }


def check_normalized(state: WalkState, tol: float = ACCUM_TOL) -> None:
    if abs(state.norm2 - 1) > tol:
        raise ValueError(f"state norm² = {state.norm2!r}, expected 1")

