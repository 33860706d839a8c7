"""Builders for Fock, coherent, spin-coherent and cat states."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import DegenerateStateError, OccupationError, TruncationError
from .hilbert import Dims, Qubit, StateVector

__all__ = [
    "CoherentParams",
    "Su2Params",
    "DEFAULT_LEAK_TOL",
    "make_fock",
    "make_motional_fock",
    "make_qubit_superposition",
    "attach_qubit",
    "make_coherent",
    "coherent_amplitudes",
    "coherent_overlap",
    "make_su2_coherent",
    "make_cat_reference",
]

DEFAULT_LEAK_TOL = 1e-10
_DEGENERATE_NORM = 1e-12


@dataclass(frozen=True)
class CoherentParams:
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class Su2Params:
    """Spin-coherent parameters; ``twice_j`` is ``2j``, the total excitation."""

    zeta: complex
    twice_j: int

    def __post_init__(self):
        if self.twice_j < 1 or int(self.twice_j) != self.twice_j:
            raise ValueError(f"twice_j must be a positive integer, got {self.twice_j!r}")

    @property
    def j(self) -> float:
        return self.twice_j / 2


def _check_occupation(dims: Dims, *occ: int):
    for k in occ:
        if not 0 <= k <= dims.n_max:
            raise OccupationError(f"occupation {k} outside 0..{dims.n_max}")


def make_motional_fock(m: int, n: int, dims: Dims) -> StateVector:
    """Two-mode Fock state ``|m>_a |n>_b`` without the qubit factor."""
    _check_occupation(dims, m, n)
    amps = np.zeros(dims.modes_dim, dtype=complex)
    amps[m * dims.N + n] = 1.0
    return StateVector(dims, amps)


def make_fock(q, m: int, n: int, dims: Dims) -> StateVector:
    _check_occupation(dims, m, n)
    amps = np.zeros(dims.total, dtype=complex)
    amps[dims.flat_index(q, m, n)] = 1.0
    return StateVector(dims, amps)


def attach_qubit(qubit_amps, motional: StateVector) -> StateVector:
    """Tensor a qubit state ``(c_down, c_up)`` onto a motional state."""
    if motional.has_qubit:
        raise ValueError("motional state already carries a qubit factor")
    q = np.asarray(qubit_amps, dtype=complex)
    return StateVector(motional.dims, np.kron(q, motional.amps))


def make_qubit_superposition(sign, motional: StateVector) -> StateVector:
    """``(|up> +/- |down>)/sqrt(2)`` tensored with ``motional``.

    The minus state carries the positive sign on ``|up>``.
    """
    s = _parse_sign(sign)
    return attach_qubit(np.array([s, 1.0]) / math.sqrt(2), motional)


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Untruncated-normalization coherent amplitudes for occupations 0..n_max."""
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for m in range(1, n_max + 1):
        amps[m] = amps[m - 1] * alpha / math.sqrt(m)
    return amps


def _poisson_tail(mean: float, n_max: int) -> float:
    # P(X > n_max) for X ~ Poisson(mean)
    if mean == 0:
        return 0.0
    return float(gammainc(n_max + 1, mean))


def coherent_overlap(a: complex, b: complex) -> complex:
    """Analytic single-mode overlap ``<a|b>``."""
    return cmath.exp(-abs(a) ** 2 / 2 - abs(b) ** 2 / 2 + a.conjugate() * b)


def make_coherent(
    params: CoherentParams,
    q=None,
    dims: Dims | None = None,
    *,
    leak_tol: float = DEFAULT_LEAK_TOL,
    override: bool = False,
) -> tuple[StateVector, float]:
    """Two-mode coherent product ``|alpha>_a |beta>_b``, renormalized.

    Returns the state and the truncation leakage ``1 - norm**2`` of the raw
    truncated amplitudes. With ``q=None`` the state is motional only.
    """
    if dims is None:
        raise TypeError("dims is required")
    alpha, beta = complex(params.alpha), complex(params.beta)
    limit = dims.n_max / 4
    if not override and (abs(alpha) ** 2 > limit or abs(beta) ** 2 > limit):
        raise TruncationError(
            f"|alpha|^2={abs(alpha)**2:.4g}, |beta|^2={abs(beta)**2:.4g} exceed n_max/4={limit:.4g}"
        )
    ta = _poisson_tail(abs(alpha) ** 2, dims.n_max)
    tb = _poisson_tail(abs(beta) ** 2, dims.n_max)
    leakage = ta + tb - ta * tb
    if leakage > leak_tol and not override:
        raise TruncationError(
            f"coherent-state leakage {leakage:.3e} exceeds leak_tol={leak_tol:.1e}", leakage=leakage
        )
    motional = np.kron(coherent_amplitudes(alpha, dims.n_max), coherent_amplitudes(beta, dims.n_max))
    state = StateVector(dims, motional).normalize()
    if q is not None:
        qa = np.zeros(2)
        qa[Qubit.parse(q)] = 1.0
        state = attach_qubit(qa, state)
    return state, leakage


def make_su2_coherent(params: Su2Params, dims: Dims) -> StateVector:
    """Spin-coherent state in the Schwinger sector of total excitation ``2j``.

    ``(1+|z|^2)^-j  sum_k sqrt(C(2j,k)) z^k |k>_a |2j-k>_b``, with ``|j,-j>``
    mapped to ``|0>_a |2j>_b``.
    """
    tj = params.twice_j
    if tj > dims.n_max:
        raise OccupationError(f"2j={tj} exceeds n_max={dims.n_max}")
    zeta = complex(params.zeta)
    if not cmath.isfinite(zeta):
        raise ValueError("zeta must be finite")
    r = abs(zeta)
    phase = zeta / r if r > 0 else 1.0
    # |z|^k (1+|z|^2)^-j written as cos^(2j-k) sin^k of the polar angle, never overflows
    half = math.atan(r)
    c, s = math.cos(half), math.sin(half)
    amps = np.zeros(dims.modes_dim, dtype=complex)
    for k in range(tj + 1):
        amps[k * dims.N + (tj - k)] = math.sqrt(math.comb(tj, k)) * c ** (tj - k) * s**k * phase**k
    return StateVector(dims, amps)


def _parse_sign(sign) -> int:
    if sign in ("+", "plus", 1, +1.0):
        return 1
    if sign in ("-", "minus", -1, -1.0):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _normalized_sum(first: StateVector, second: StateVector, sign: int) -> StateVector:
    raw = StateVector(first.dims, first.amps + sign * second.amps)
    if raw.norm() < _DEGENERATE_NORM:
        raise DegenerateStateError("superposition has vanishing norm")
    return raw.normalize()


def make_cat_reference(kind: str, params, sign, dims: Dims, *, phase: complex = 1.0,
                       leak_tol: float = DEFAULT_LEAK_TOL) -> StateVector:
    """Normalized two-branch motional superposition ``first +/- second``.

    ``kind`` selects the branches:

    * ``"su2_cat"``: ``params`` is a :class:`Su2Params`; ``|z,j> +/- |-z,j>``.
    * ``"number_cat"``: ``params`` is ``n``; ``phase**n |n,0> +/- |0,n>``.
    * ``"coherent_cat"``: ``params`` is a pair of :class:`CoherentParams`.
    """
    s = _parse_sign(sign)
    if kind == "su2_cat":
        first = make_su2_coherent(params, dims)
        second = make_su2_coherent(Su2Params(-complex(params.zeta), params.twice_j), dims)
    elif kind == "number_cat":
        n = int(params)
        first = make_motional_fock(n, 0, dims)
        first = StateVector(dims, complex(phase) ** n * first.amps)
        second = make_motional_fock(0, n, dims)
    elif kind == "coherent_cat":
        p1, p2 = params
        first, _ = make_coherent(p1, None, dims, leak_tol=leak_tol)
        second, _ = make_coherent(p2, None, dims, leak_tol=leak_tol)
    else:
        raise ValueError(f"unknown cat kind {kind!r}")
    return _normalized_sum(first, second, s)
