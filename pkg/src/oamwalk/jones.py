"""Jones calculus over OAM modes.

Jones vectors and matrices use the circular basis in the order (R, L).
Azimuthally varying elements are stored symbolically: every matrix entry is a
finite Fourier series ``{m: c}`` meaning ``sum_m c * exp(i m phi)``. A factor
``exp(i m phi)`` raises the OAM index by ``m``, so compiling an element to a
mode operator is exact and never samples ``phi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .modes import ACCUM_TOL, OP_TOL, POLS, SIGMA_X, Pol, is_unitary, shift_magnitude
from .walk import CoinVector, StepParams, WalkState, hadamard

__all__ = [
    "NonCompilableElementError",
    "FourierMatrix",
    "JonesElement",
    "JonesField",
    "ModeOperator",
    "rotation_matrix",
    "wave_plate_matrix",
    "qwp_matrix",
    "qplate_matrix",
    "coin_from_qwp",
    "compile_to_modes",
    "apply",
    "step_operator",
    "qwp_step_operator",
    "factorization_check",
]


class NonCompilableElementError(ValueError):
    """Raised when an element's phi-dependence is not a sum of exp(i m phi), m integer."""


def rotation_matrix(angle: float) -> np.ndarray:
    """Circular-basis rotation ``diag(e^{i angle}, e^{-i angle})``."""
    return np.diag([cmath.exp(1j * angle), cmath.exp(-1j * angle)])


def _rotate(j: np.ndarray, angle: float) -> np.ndarray:
    return rotation_matrix(-angle) @ j @ rotation_matrix(angle)


def wave_plate_matrix(retardance: float, axis_angle: float = 0.0) -> np.ndarray:
    """Wave plate of the given retardance with its optic axis at ``axis_angle``.

    At zero angle the circular-basis matrix is
    ``cos(retardance/2) I + i sin(retardance/2) sigma_x``; a quarter-wave plate
    gives (1/√2)[[1, i], [i, 1]].
    """
    j = math.cos(retardance / 2) * np.eye(2, dtype=complex) + 1j * math.sin(
        retardance / 2
    ) * SIGMA_X
    return _rotate(j, axis_angle)


def qwp_matrix(axis_angle: float = math.pi / 4) -> np.ndarray:
    return wave_plate_matrix(math.pi / 2, axis_angle)


def qplate_matrix(q, phi: float) -> np.ndarray:
    """Local q-plate matrix ``[[0, e^{-i2q phi}], [e^{i2q phi}, 0]]``."""
    a = 2 * float(q) * phi
    return np.array([[0, cmath.exp(-1j * a)], [cmath.exp(1j * a), 0]], dtype=complex)


def coin_from_qwp(axis_angle: float = math.pi / 4) -> np.ndarray:
    """Coin realized by a q-plate followed by a QWP at ``axis_angle``.

    The q-plate swaps polarizations, so the effective coin is ``W(theta) sigma_x``;
    at 45 degrees this is exactly the Hadamard matrix.
    """
    return qwp_matrix(axis_angle) @ SIGMA_X


Series = Mapping  # Fourier index -> coefficient


@dataclass(frozen=True)
class FourierMatrix:
    """2x2 matrix with entries ``sum_m c_m exp(i m phi)``."""

    entries: tuple[tuple[Series, Series], tuple[Series, Series]]

    @classmethod
    def constant(cls, matrix) -> "FourierMatrix":
        m = np.asarray(matrix, dtype=complex)
        return cls(
            tuple(
                tuple(({0: complex(m[i, j])} if m[i, j] != 0 else {}) for j in range(2))
                for i in range(2)
            )
        )

    def evaluate(self, phi: float) -> np.ndarray:
        out = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[i, j] = sum(
                    c * cmath.exp(1j * float(m) * phi) for m, c in self.entries[i][j].items()
                )
        return out

    def __matmul__(self, other: "FourierMatrix") -> "FourierMatrix":
        rows = []
        for i in range(2):
            row = []
            for j in range(2):
                acc: dict = {}
                for k in range(2):
                    for m1, c1 in self.entries[i][k].items():
                        for m2, c2 in other.entries[k][j].items():
                            acc[m1 + m2] = acc.get(m1 + m2, 0j) + c1 * c2
                row.append({m: c for m, c in acc.items() if c != 0})
            rows.append(tuple(row))
        return FourierMatrix(tuple(rows))

    def dagger(self) -> "FourierMatrix":
        e = self.entries
        return FourierMatrix(
            tuple(
                tuple({-m: complex(c).conjugate() for m, c in e[j][i].items()} for j in range(2))
                for i in range(2)
            )
        )


@dataclass(frozen=True)
class JonesElement:
    """An optical element: ``wave_plate``, ``q_plate``, ``free_rotation`` or ``constant``.

    ``params`` holds the kind's parameters (``retardance``/``axis_angle``, ``q``,
    ``angle``, or ``matrix``). ``adjoint`` marks the inverse element.
    """

    kind: str
    params: Mapping = field(default_factory=dict)
    adjoint: bool = False

    @classmethod
    def wave_plate(cls, retardance: float, axis_angle: float = 0.0) -> "JonesElement":
        return cls("wave_plate", {"retardance": retardance, "axis_angle": axis_angle})

    @classmethod
    def quarter_wave_plate(cls, axis_angle: float = math.pi / 4) -> "JonesElement":
        return cls.wave_plate(math.pi / 2, axis_angle)

    @classmethod
    def q_plate(cls, q) -> "JonesElement":
        return cls("q_plate", {"q": q})

    @classmethod
    def free_rotation(cls, angle: float) -> "JonesElement":
        return cls("free_rotation", {"angle": angle})

    @classmethod
    def constant(cls, matrix) -> "JonesElement":
        m = np.asarray(matrix, dtype=complex)
        if not is_unitary(m):
            raise ValueError("constant Jones element must be unitary")
        return cls("constant", {"matrix": m})

    def inverse(self) -> "JonesElement":
        return JonesElement(self.kind, self.params, not self.adjoint)

    @property
    def fourier(self) -> FourierMatrix:
        p = self.params
        if self.kind == "wave_plate":
            fm = FourierMatrix.constant(wave_plate_matrix(p["retardance"], p["axis_angle"]))
        elif self.kind == "free_rotation":
            fm = FourierMatrix.constant(rotation_matrix(p["angle"]))
        elif self.kind == "constant":
            fm = FourierMatrix.constant(p["matrix"])
        elif self.kind == "q_plate":
            two_q = 2 * Fraction(p["q"]).limit_denominator(1_000_000)
            m = int(two_q) if two_q.denominator == 1 else two_q
            fm = FourierMatrix((({}, {-m: 1 + 0j}), ({m: 1 + 0j}, {})))
        else:
            raise NonCompilableElementError(f"unknown element kind {self.kind!r}")
        return fm.dagger() if self.adjoint else fm

    def matrix(self, phi: float = 0.0) -> np.ndarray:
        return self.fourier.evaluate(phi)


@dataclass(frozen=True)
class ModeOperator:
    """Translation-invariant linear map on (polarization, ell) modes.

    ``action[s]`` lists ``(s', dl, amplitude)``: mode ``(s, ell)`` feeds
    ``(s', ell + dl)`` with that amplitude, for every ``ell``.
    """

    action: Mapping[Pol, tuple[tuple[Pol, int, complex], ...]]

    def images(self, pol: Pol, ell: int) -> list[tuple[Pol, int, complex]]:
        return [(s2, ell + dl, a) for s2, dl, a in self.action[pol]]

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        """``self @ other`` applies ``other`` first."""
        action = {}
        for s in POLS:
            acc: dict[tuple[Pol, int], complex] = {}
            for s1, d1, a1 in other.action[s]:
                for s2, d2, a2 in self.action[s1]:
                    acc[(s2, d1 + d2)] = acc.get((s2, d1 + d2), 0j) + a1 * a2
            action[s] = tuple((s2, d, a) for (s2, d), a in acc.items() if a != 0)
        return ModeOperator(action)

    def dense(self, ells: Iterable[int]) -> np.ndarray:
        """Matrix on the truncated window, basis index ``2*k + pol.index``.

        Images that leave the window are dropped.
        """
        ells = list(ells)
        pos = {ell: k for k, ell in enumerate(ells)}
        out = np.zeros((2 * len(ells), 2 * len(ells)), dtype=complex)
        for k, ell in enumerate(ells):
            for s in POLS:
                for s2, ell2, a in self.images(s, ell):
                    if ell2 in pos:
                        out[2 * pos[ell2] + s2.index, 2 * k + s.index] += a
        return out

    def is_isometry(self, tol: float = OP_TOL) -> bool:
        # translation invariance: the columns of one site span every site
        cols = {s: {(s2, d): a for s2, d, a in self.action[s]} for s in POLS}
        for s in POLS:
            for t in POLS:
                ip = sum(
                    a.conjugate() * cols[t].get(key, 0j) for key, a in cols[s].items()
                )
                if abs(ip - (1 if s is t else 0)) > tol:
                    return False
        return True


def compile_to_modes(element: JonesElement) -> ModeOperator:
    """Turn an element's Fourier-series matrix into an exact mode operator.

    Raises
    ------
    NonCompilableElementError
        If an entry carries a non-integer Fourier index (e.g. q not a half integer).
    """
    fm = element.fourier
    action = {}
    for s in POLS:
        terms = []
        for s2 in POLS:
            for m, c in fm.entries[s2.index][s.index].items():
                if Fraction(m).denominator != 1:
                    raise NonCompilableElementError(
                        f"{element.kind} has phi-dependence exp(i*{m}*phi); "
                        "only integer OAM changes compile to modes"
                    )
                if c != 0:
                    terms.append((s2, int(m), complex(c)))
        action[s] = tuple(terms)
    return ModeOperator(action)


@dataclass(frozen=True)
class JonesField:
    """Jones vector expanded over OAM: ``ell -> (c_R, c_L)`` times ``overall_scale``."""

    amplitudes: Mapping[int, tuple[complex, complex]]
    overall_scale: complex = 1.0

    @classmethod
    def from_polarization(cls, c_r: complex, c_l: complex, ell: int = 0) -> "JonesField":
        return cls({ell: (complex(c_r), complex(c_l))})

    @classmethod
    def from_walk(cls, state: WalkState, overall_scale: complex = 1.0) -> "JonesField":
        return cls(
            {ell: (c.up, c.down) for ell, c in state.amplitudes.items()}, overall_scale
        )

    def to_walk(self, step_count: int = 0) -> WalkState:
        return WalkState(
            {ell: CoinVector(r, l) for ell, (r, l) in self.amplitudes.items()}, step_count
        )

    @property
    def norm2(self) -> float:
        return math.fsum(abs(r) ** 2 + abs(l) ** 2 for r, l in self.amplitudes.values())

    def is_normalized(self, tol: float = ACCUM_TOL) -> bool:
        return abs(self.norm2 - 1) <= tol

    def mode_amplitudes(self) -> dict[tuple[Pol, int], complex]:
        out = {}
        for ell, (r, l) in self.amplitudes.items():
            out[(Pol.R, ell)] = r
            out[(Pol.L, ell)] = l
        return out

    def intensity(self) -> dict[int, float]:
        """Polarization-summed weight per OAM index."""
        return {ell: abs(r) ** 2 + abs(l) ** 2 for ell, (r, l) in sorted(self.amplitudes.items())}

    def field_at(self, phi: float) -> np.ndarray:
        """Jones vector (without ``overall_scale``) at azimuth ``phi``."""
        v = np.zeros(2, dtype=complex)
        for ell, (r, l) in self.amplitudes.items():
            ph = cmath.exp(1j * ell * phi)
            v += ph * np.array([r, l])
        return v


def apply(op: ModeOperator, field: JonesField) -> JonesField:
    out: dict[int, list[complex]] = {}
    for ell, amps in field.amplitudes.items():
        for s in POLS:
            a = amps[s.index]
            if a == 0:
                continue
            for s2, ell2, c in op.images(s, ell):
                out.setdefault(ell2, [0j, 0j])[s2.index] += c * a
    return JonesField({ell: (v[0], v[1]) for ell, v in out.items()}, field.overall_scale)


def step_operator(params: StepParams = StepParams()) -> ModeOperator:
    """One round trip: q-plate then a constant plate realizing ``params.coin_unitary``."""
    qp = compile_to_modes(JonesElement.q_plate(params.q))
    coin = params.coin_unitary @ SIGMA_X
    if np.allclose(params.coin_unitary, hadamard(), rtol=0, atol=OP_TOL):
        plate = JonesElement.quarter_wave_plate(math.pi / 4)
    else:
        plate = JonesElement.constant(coin)
    return compile_to_modes(plate) @ qp


def qwp_step_operator(q=Fraction(1, 2), axis_angle: float = math.pi / 4) -> ModeOperator:
    """The physical round trip: q-plate followed by a QWP at ``axis_angle``."""
    return compile_to_modes(JonesElement.quarter_wave_plate(axis_angle)) @ compile_to_modes(
        JonesElement.q_plate(q)
    )


def _walk_dense(q, coin: np.ndarray, ells: list[int], coin_first: bool, up: Pol) -> np.ndarray:
    """Dense ``(I x coin) S`` (or ``S (I x coin)``) written from the operator formula."""
    d = shift_magnitude(q)
    pos = {ell: k for k, ell in enumerate(ells)}
    idx = {up: up.index, up.opposite: up.opposite.index}  # coin index -> Jones index
    up_i, down_i = idx[up], idx[up.opposite]
    n = 2 * len(ells)
    s_mat = np.zeros((n, n), dtype=complex)
    for k, ell in enumerate(ells):
        if ell + d in pos:
            s_mat[2 * pos[ell + d] + up_i, 2 * k + up_i] = 1
        if ell - d in pos:
            s_mat[2 * pos[ell - d] + down_i, 2 * k + down_i] = 1
    c = np.zeros((2, 2), dtype=complex)
    for a, ia in ((0, up_i), (1, down_i)):
        for b, ib in ((0, up_i), (1, down_i)):
            c[ia, ib] = coin[a, b]
    c_mat = np.kron(np.eye(len(ells)), c)
    return s_mat @ c_mat if coin_first else c_mat @ s_mat


def factorization_check(
    q=Fraction(1, 2),
    n_sites: int = 41,
    *,
    coin_first: bool = False,
    up: Pol = Pol.R,
) -> float:
    """Max |W(pi/4) J_q - (I x H) S| over a truncated lattice of ``n_sites`` sites.

    ``up`` picks which circular polarization is identified with the up coin
    state; ``coin_first`` swaps the walk operator's order. Both exist to show
    the residual is O(1) for the wrong choices.
    """
    half = n_sites // 2
    ells = list(range(-half, n_sites - half))
    optical = qwp_step_operator(q, math.pi / 4).dense(ells)
    walk = _walk_dense(q, hadamard(), ells, coin_first, up)
    return float(np.max(np.abs(optical - walk)))
