"""Truncated Hilbert space of one qubit and two bosonic modes.

Basis ordering is qubit (x) mode a (x) mode b throughout, so the composite
flat index of ``|q, m, n>`` is ``q*N**2 + m*N + n`` with ``N = n_max + 1``.
Motional-only states use the trailing ``m*N + n`` part.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDimensionError

__all__ = [
    "Qubit",
    "Dims",
    "BasisIndex",
    "StateVector",
    "OperatorMatrix",
    "make_annihilation",
    "make_number",
    "make_exchange_generator",
    "identity",
    "sigma_x",
    "embed",
    "inner",
]


class Qubit(enum.IntEnum):
    """Internal ion levels; ``DOWN`` is the ground state."""

    DOWN = 0
    UP = 1

    @classmethod
    def parse(cls, label) -> "Qubit":
        if isinstance(label, cls):
            return label
        if isinstance(label, str):
            return cls[label.upper()]
        return cls(int(label))


@dataclass(frozen=True)
class Dims:
    """Truncation of the composite space; each mode holds 0..n_max quanta."""

    n_max: int
    qubit_dim: int = 2

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidDimensionError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if self.qubit_dim != 2:
            raise InvalidDimensionError("qubit_dim is always 2")

    @property
    def N(self) -> int:
        return self.n_max + 1

    @property
    def modes_dim(self) -> int:
        return self.N * self.N

    @property
    def total(self) -> int:
        return self.qubit_dim * self.N * self.N

    def flat_index(self, q, m: int, n: int) -> int:
        return BasisIndex(Qubit.parse(q), m, n).flat(self)

    def unflatten(self, index: int) -> "BasisIndex":
        if not 0 <= index < self.total:
            raise IndexError(index)
        q, rest = divmod(index, self.modes_dim)
        m, n = divmod(rest, self.N)
        return BasisIndex(Qubit(q), m, n)

    def total_excitation(self) -> np.ndarray:
        """``m + n`` for every motional basis index, in flat order."""
        occ = np.arange(self.N)
        return (occ[:, None] + occ[None, :]).ravel()


class BasisIndex(NamedTuple):
    q: Qubit
    m: int
    n: int

    def flat(self, dims: Dims) -> int:
        if not (0 <= self.m <= dims.n_max and 0 <= self.n <= dims.n_max):
            raise IndexError(f"occupation ({self.m}, {self.n}) outside 0..{dims.n_max}")
        return int(self.q) * dims.modes_dim + self.m * dims.N + self.n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over either the composite space or the two-mode space.

    The space is implied by the length of ``amps``: ``2*N**2`` for the
    composite qubit-and-modes space, ``N**2`` for a motional state.
    """

    dims: Dims
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).ravel()
        if amps.size not in (self.dims.total, self.dims.modes_dim):
            raise InvalidDimensionError(
                f"{amps.size} amplitudes do not fit n_max={self.dims.n_max}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def has_qubit(self) -> bool:
        return self.amps.size == self.dims.total

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVector(self.dims, self.amps / nrm)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2, N, N)`` or ``(N, N)``."""
        N = self.dims.N
        return self.amps.reshape((2, N, N) if self.has_qubit else (N, N))

    def amplitude(self, m: int, n: int, q=None) -> complex:
        if self.has_qubit:
            return complex(self.tensor()[Qubit.parse(q), m, n])
        return complex(self.tensor()[m, n])

    def __repr__(self):
        space = "composite" if self.has_qubit else "modes"
        return f"StateVector(n_max={self.dims.n_max}, {space}, norm={self.norm():.6g})"


class OperatorMatrix:
    """Immutable sparse complex matrix with canonically sorted storage."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        self._m = m

    @property
    def rows(self) -> int:
        return self._m.shape[0]

    @property
    def cols(self) -> int:
        return self._m.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._m.shape

    @property
    def csr(self) -> sp.csr_matrix:
        return self._m.copy()

    def entries(self) -> list[tuple[int, int, complex]]:
        """Nonzero ``(row, col, value)`` triplets in (row, col) order."""
        coo = self._m.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[i]), int(coo.col[i]), complex(coo.data[i])) for i in order]

    def to_dense(self) -> np.ndarray:
        return self._m.toarray()

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self._m.conj().T)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self._m @ other._m)
        if isinstance(other, StateVector):
            if other.amps.size != self.cols:
                raise InvalidDimensionError(
                    f"operator of shape {self.shape} cannot act on {other.amps.size} amplitudes"
                )
            return StateVector(other.dims, self._m @ other.amps)
        return self._m @ np.asarray(other)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self._m + other._m)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self._m - other._m)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self._m * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"OperatorMatrix(shape={self.shape}, nnz={self._m.nnz})"


def _check_n_max(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise InvalidDimensionError(f"n_max must be an integer >= 1, got {n_max!r}")


def make_annihilation(n_max: int) -> OperatorMatrix:
    """Single-mode lowering operator with ``<m-1|a|m> = sqrt(m)``."""
    _check_n_max(n_max)
    m = np.arange(1, n_max + 1)
    return OperatorMatrix(sp.coo_matrix((np.sqrt(m), (m - 1, m)), shape=(n_max + 1, n_max + 1)))


def make_number(n_max: int) -> OperatorMatrix:
    """``a^dag a`` stored as its exact integer diagonal."""
    _check_n_max(n_max)
    return OperatorMatrix(sp.diags(np.arange(n_max + 1, dtype=complex)))


def identity(dim: int) -> OperatorMatrix:
    return OperatorMatrix(sp.identity(dim, dtype=complex, format="csr"))


def sigma_x() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, 1], [1, 0]], dtype=complex))


def make_exchange_generator(n_max: int) -> OperatorMatrix:
    """Two-mode exchange generator ``K = a^dag b + a b^dag`` (hard-truncated)."""
    _check_n_max(n_max)
    a = make_annihilation(n_max).csr
    eye = sp.identity(n_max + 1, dtype=complex, format="csr")
    A = sp.kron(a, eye)
    B = sp.kron(eye, a)
    return OperatorMatrix(A.conj().T @ B + A @ B.conj().T)


_SLOTS = ("qubit", "modeA", "modeB", "modesAB")


def embed(op: OperatorMatrix, slot: str, dims: Dims, space: str = "full") -> OperatorMatrix:
    """Lift ``op`` acting on ``slot`` to the whole space, identity elsewhere.

    ``space="modes"`` lifts into the two-mode space only (no qubit factor).
    """
    if slot not in _SLOTS:
        raise ValueError(f"unknown slot {slot!r}; expected one of {_SLOTS}")
    if space not in ("full", "modes"):
        raise ValueError(f"unknown space {space!r}")
    if space == "modes" and slot == "qubit":
        raise InvalidDimensionError("the two-mode space has no qubit slot")
    expected = {"qubit": 2, "modeA": dims.N, "modeB": dims.N, "modesAB": dims.modes_dim}[slot]
    if op.shape != (expected, expected):
        raise InvalidDimensionError(f"operator shape {op.shape} does not match slot {slot} ({expected})")

    eye_q = sp.identity(2, format="csr")
    eye_n = sp.identity(dims.N, format="csr")
    m = op.csr
    if slot == "qubit":
        factors = [m, eye_n, eye_n]
    elif slot == "modeA":
        factors = [eye_q, m, eye_n]
    elif slot == "modeB":
        factors = [eye_q, eye_n, m]
    else:
        factors = [eye_q, m]
    if space == "modes":
        factors = factors[1:]
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return OperatorMatrix(out)


def inner(u: StateVector, v: StateVector) -> complex:
    """``<u|v>``, conjugating the first argument."""
    if u.dims != v.dims or u.amps.size != v.amps.size:
        raise InvalidDimensionError("inner product of states from different spaces")
    return complex(np.vdot(u.amps, v.amps))
