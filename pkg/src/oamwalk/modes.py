"""Mode bookkeeping shared by every layer.

A mode is a pair ``(polarization, ell)``. Circular polarization doubles as the
walk coin: right-handed light is the "up" coin state (it gains OAM at the
q-plate) and left-handed light is "down".

The creation-operator maps defined here are the single-particle rules used by
the coherent and Fock layers::

    q-plate:    a+(R, l) -> a+(L, l + 2q),   a+(L, l) -> a+(R, l - 2q)
    coin plate: a+(s, l) -> sum_s' C[s', s] a+(s', l)

with ``C = coin @ SIGMA_X`` so that the pair reproduces shift-then-coin.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

OP_TOL = 1e-12
ACCUM_TOL = 1e-10


class Pol(str, Enum):
    """Circular polarization; ``index`` is the position in (R, L) vectors."""

    R = "R"
    L = "L"

    index: int
    opposite: "Pol"


POLS = (Pol.R, Pol.L)
# plain attributes: these sit on hot paths
Pol.R.index, Pol.L.index = 0, 1
Pol.R.opposite, Pol.L.opposite = Pol.L, Pol.R
UP = Pol.R
DOWN = Pol.L

Mode = tuple[Pol, int]
ModeMap = Callable[[Mode], list[tuple[Mode, complex]]]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def shift_magnitude(q) -> int:
    """Return the integer OAM shift ``2q``, validating that ``q`` is a half integer."""
    try:
        exact = Fraction(q)
        two_q = 2 * exact.limit_denominator(1_000_000)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"q must be a number, got {q!r}") from exc
    if two_q.denominator != 1 or abs(float(two_q) - 2 * float(exact)) > OP_TOL:
        raise ValueError(f"q must be a half integer (2q integer), got {q}")
    if two_q == 0:
        raise ValueError("q must be nonzero")
    return int(two_q)


def is_unitary(matrix: np.ndarray, tol: float = OP_TOL) -> bool:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=tol))


def qplate_map(q) -> ModeMap:
    d = shift_magnitude(q)

    def image(mode: Mode) -> list[tuple[Mode, complex]]:
        pol, ell = mode
        if pol is Pol.R:
            return [((Pol.L, ell + d), 1 + 0j)]
        return [((Pol.R, ell - d), 1 + 0j)]

    return image


def constant_map(matrix: np.ndarray) -> ModeMap:
    """Polarization-only map acting with ``matrix`` in the (R, L) ordering."""
    m = np.asarray(matrix, dtype=complex)

    def image(mode: Mode) -> list[tuple[Mode, complex]]:
        pol, ell = mode
        col = m[:, pol.index]
        return [((p, ell), complex(col[p.index])) for p in POLS if col[p.index] != 0]

    return image


def compose(*maps: ModeMap) -> ModeMap:
    """Chain maps left to right: ``compose(a, b)`` applies ``a`` first."""

    def image(mode: Mode) -> list[tuple[Mode, complex]]:
        terms = {mode: 1 + 0j}
        for f in maps:
            nxt: dict[Mode, complex] = {}
            for m, amp in terms.items():
                for m2, a2 in f(m):
                    nxt[m2] = nxt.get(m2, 0j) + amp * a2
            terms = nxt
        return list(terms.items())

    return image


def step_mode_map(q, coin: np.ndarray) -> ModeMap:
    """Single-particle map of one walk step: q-plate, then the coin plate."""
    full = compose(qplate_map(q), constant_map(np.asarray(coin, dtype=complex) @ SIGMA_X))
    # translation invariant: tabulate the images of (pol, 0) once
    table = {pol: [(m[0], m[1], a) for m, a in full((pol, 0))] for pol in POLS}

    def image(mode: Mode) -> list[tuple[Mode, complex]]:
        ell = mode[1]
        return [((p, ell + dl), a) for p, dl, a in table[mode[0]]]

    return image


def apply_to_amplitudes(
    amplitudes: dict[Mode, complex], mode_map: ModeMap
) -> dict[Mode, complex]:
    out: dict[Mode, complex] = {}
    for mode, amp in amplitudes.items():
        for m2, a2 in mode_map(mode):
            out[m2] = out.get(m2, 0j) + amp * a2
    return out


def sort_modes(modes: Iterable[Mode]) -> list[Mode]:
    return sorted(modes, key=lambda m: (m[1], m[0].index))
