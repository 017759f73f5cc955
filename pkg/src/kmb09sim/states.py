"""State vectors, the paired e/f bases and Born-rule sampling.

Indices on every public surface are 1-based (``e_1 .. e_N``); arrays are
stored 0-based internally.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-9


class BasisId(enum.Enum):
    E = "E"
    F = "F"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised N-dimensional pure state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size < 2:
            raise ValueError(f"state dimension must be >= 2, got {amps.size}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (|a|^2 sums to {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "StateVector", tol: float = NORM_TOL) -> bool:
        return abs(abs(self.overlap(other)) - 1.0) < tol

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.dimension == other.dimension and np.allclose(
            self.amplitudes, other.amplitudes, atol=NORM_TOL, rtol=0
        )

    def __repr__(self):
        return f"StateVector({np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class BasisSet:
    """The computational basis ``e`` and its Fourier partner ``f``.

    ``e_matrix[i]`` and ``f_matrix[j]`` hold the amplitudes of ``e_{i+1}`` and
    ``f_{j+1}`` as rows.
    """

    dimension: int
    e_matrix: np.ndarray = field(repr=False)
    f_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "e_matrix", _frozen(self.e_matrix))
        object.__setattr__(self, "f_matrix", _frozen(self.f_matrix))
        n = self.dimension
        if self.e_matrix.shape != (n, n) or self.f_matrix.shape != (n, n):
            raise ValueError("basis matrices must be N x N")

    def _check(self, index: int) -> int:
        if not 1 <= index <= self.dimension:
            raise IndexError(f"basis index {index} outside 1..{self.dimension}")
        return index - 1

    def e(self, index: int) -> StateVector:
        return StateVector(self.e_matrix[self._check(index)])

    def f(self, index: int) -> StateVector:
        return StateVector(self.f_matrix[self._check(index)])

    def matrix(self, basis: BasisId) -> np.ndarray:
        return self.e_matrix if basis is BasisId.E else self.f_matrix

    @property
    def e_states(self) -> list[StateVector]:
        return [StateVector(row) for row in self.e_matrix]

    @property
    def f_states(self) -> list[StateVector]:
        return [StateVector(row) for row in self.f_matrix]

    @property
    def all_states(self) -> np.ndarray:
        """Rows e_1..e_N followed by f_1..f_N, shape (2N, N)."""
        return np.vstack([self.e_matrix, self.f_matrix])


def build_bases(N: int) -> BasisSet:
    """Standard basis plus its discrete-Fourier transform.

    ``f_j[k] = exp(2*pi*i*j*k/N) / sqrt(N)`` (0-based j, k) is mutually
    unbiased with the standard basis for every N.
    """
    if int(N) != N or N < 2:
        raise ValueError(f"invalid dimension N={N!r}; need an integer N >= 2")
    N = int(N)
    k = np.arange(N)
    f = np.exp(2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)
    # N=2 gives exact real (1, -1)/sqrt(2); scrub the tiny imaginary residue
    f = np.where(np.abs(f.imag) < 1e-15, f.real, f)
    return BasisSet(N, np.eye(N, dtype=np.complex128), f)


def born_probabilities(state, basis) -> np.ndarray:
    """Outcome probabilities ``|<b_j|s>|^2`` for a projective measurement.

    ``basis`` is either a sequence of StateVectors or an (N, N) array whose
    rows are the basis vectors.
    """
    s = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    if isinstance(basis, np.ndarray):
        rows = basis
    else:
        rows = np.array(
            [b.amplitudes if isinstance(b, StateVector) else b for b in basis]
        )
    if rows.ndim != 2 or rows.shape[1] != s.size or rows.shape[0] != s.size:
        raise ValueError(
            f"dimension mismatch: state has {s.size} amplitudes, basis shape {rows.shape}"
        )
    p = np.abs(rows.conj() @ s) ** 2
    return p


def sample_outcome(p, u: float) -> int:
    """Return the smallest 1-based j whose cumulative probability exceeds u."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be one-dimensional and non-empty")
    if np.any(p < -NORM_TOL) or not np.all(np.isfinite(p)):
        raise ValueError(f"malformed probability vector {p!r}")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform variate {u!r} outside [0, 1)")
    cum = np.cumsum(p)
    j = int(np.count_nonzero(cum <= u))
    # rounding can leave cum[-1] a hair below u
    return min(j, p.size - 1) + 1
