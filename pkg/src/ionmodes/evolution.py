"""Unitary evolution under the conditional and plain two-mode beam splitters.

``U(theta) = exp(-i theta K)`` with ``K = a^dag b + a b^dag``.  Pulse ``H2``
applies ``U(theta)`` to the modes; pulse ``H1`` applies
``exp(-i theta K sigma_x)``, i.e. ``U(+theta)`` on the ``sigma_x = +1`` part of
the qubit and ``U(-theta)`` on the ``sigma_x = -1`` part.

Two independent routes build ``U``: a closed-form expansion per
total-excitation block (default) and a dense matrix exponential of the
truncated generator (oracle).  ``K`` conserves ``m + n``, so blocks with
``m + n <= n_max`` are exact; weight in higher blocks is cut by the
truncation box and is dropped and booked as leakage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import OracleFailureError, TruncationError
from .hilbert import (
    Dims,
    OperatorMatrix,
    StateVector,
    embed,
    identity,
    make_exchange_generator,
    sigma_x,
)
from .states import DEFAULT_LEAK_TOL

__all__ = [
    "PulseSpec",
    "EvolutionConfig",
    "beam_splitter_block",
    "beam_splitter_matrix",
    "beam_splitter_expm_oracle",
    "apply_pulse",
    "apply_h1",
    "apply_h2",
    "run_sequence",
]

METHODS = ("closed_form", "expm_oracle")


@dataclass(frozen=True)
class PulseSpec:
    hamiltonian: str
    theta: float

    def __post_init__(self):
        if self.hamiltonian not in ("H1", "H2"):
            raise ValueError(f"hamiltonian must be 'H1' or 'H2', got {self.hamiltonian!r}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True)
class EvolutionConfig:
    method: str = "closed_form"
    leak_tol: float = DEFAULT_LEAK_TOL

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.leak_tol > 0:
            raise ValueError("leak_tol must be positive")


@lru_cache(maxsize=None)
def _block_magnitudes(s: int) -> tuple:
    """Exact real prefactors of the binomial expansion for block ``s``.

    Entry ``(p, m, k)`` holds ``C(m,k) C(n,l) sqrt(p!(s-p)!/(m!n!))`` with
    ``n = s-m`` and ``l = k+n-p``.
    """
    fact = [math.factorial(i) for i in range(s + 1)]
    out = {}
    for m in range(s + 1):
        n = s - m
        for p in range(s + 1):
            terms = []
            for k in range(max(0, p - n), min(m, p) + 1):
                l = k + n - p
                ratio = Fraction(fact[p] * fact[s - p], fact[m] * fact[n])
                mag = math.comb(m, k) * math.comb(n, l) * math.sqrt(ratio)
                terms.append((k, l, mag))
            out[p, m] = tuple(terms)
    return out


def beam_splitter_block(theta: float, s: int) -> np.ndarray:
    """Closed-form ``U(theta)`` on the block ``{|p, s-p>: p = 0..s}``.

    Expands ``(c a^dag - i s b^dag)^m (c b^dag - i s a^dag)^n |0,0>``; every
    term feeding ``|p, s-p>`` shares the phase ``(-i)^(s+p-n)`` up to the sign
    ``(-1)^k``, so the real parts are summed with ``math.fsum``.
    """
    c, sn = math.cos(theta), math.sin(theta)
    mags = _block_magnitudes(s)
    block = np.zeros((s + 1, s + 1), dtype=complex)
    for (p, m), terms in mags.items():
        n = s - m
        total = math.fsum(
            (-1) ** k * mag * c ** (k + l) * sn ** (s - k - l) for k, l, mag in terms
        )
        block[p, m] = total * (-1j) ** ((s + p - n) % 4)
    return block


def _sector_indices(s: int, n_max: int) -> np.ndarray:
    N = n_max + 1
    return np.array([p * N + (s - p) for p in range(s + 1)])


@lru_cache(maxsize=64)
def beam_splitter_matrix(theta: float, n_max: int) -> OperatorMatrix:
    """``U(theta)`` on the two-mode space, assembled block by block.

    Rows and columns with ``m + n > n_max`` are left as identity; those
    sectors are not represented faithfully by the truncation.
    """
    dims = Dims(n_max)
    rows, cols, vals = [], [], []
    for s in range(n_max + 1):
        idx = _sector_indices(s, n_max)
        block = beam_splitter_block(theta, s)
        r, c = np.nonzero(block)
        rows.append(idx[r])
        cols.append(idx[c])
        vals.append(block[r, c])
    unreliable = np.nonzero(dims.total_excitation() > n_max)[0]
    rows.append(unreliable)
    cols.append(unreliable)
    vals.append(np.ones(unreliable.size, dtype=complex))
    return OperatorMatrix(
        sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dims.modes_dim, dims.modes_dim),
        )
    )


def _checked_expm(generator: np.ndarray) -> np.ndarray:
    U = scipy.linalg.expm(generator)
    if not np.all(np.isfinite(U)):
        raise OracleFailureError("matrix exponential returned non-finite entries")
    dev = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
    if dev > 1e-9:
        raise OracleFailureError(f"matrix exponential is not unitary (deviation {dev:.2e})")
    return U


@lru_cache(maxsize=64)
def beam_splitter_expm_oracle(theta: float, n_max: int) -> OperatorMatrix:
    """``U(theta)`` by scaling-and-squaring exponentiation of the truncated ``K``.

    Same contract as :func:`beam_splitter_matrix`, including identity rows
    and columns for the unreliable sectors.
    """
    dims = Dims(n_max)
    K = make_exchange_generator(n_max).to_dense()
    U = _checked_expm(-1j * theta * K)
    unreliable = dims.total_excitation() > n_max
    U[unreliable, :] = 0
    U[:, unreliable] = 0
    U[unreliable, unreliable] = 1
    return OperatorMatrix(U)


@lru_cache(maxsize=16)
def _h1_expm_oracle(theta: float, n_max: int) -> OperatorMatrix:
    dims = Dims(n_max)
    gen = embed(sigma_x(), "qubit", dims) @ embed(make_exchange_generator(n_max), "modesAB", dims)
    return OperatorMatrix(_checked_expm(-1j * theta * gen.to_dense()))


def _beam_splitter(theta: float, n_max: int, method: str) -> OperatorMatrix:
    if method == "closed_form":
        return beam_splitter_matrix(float(theta), n_max)
    return beam_splitter_expm_oracle(float(theta), n_max)


def _lift(op: OperatorMatrix, state: StateVector) -> OperatorMatrix:
    if state.has_qubit:
        return embed(op, "modesAB", state.dims)
    return op


def _drop_unreliable(state: StateVector, cfg: EvolutionConfig) -> tuple[StateVector, float]:
    dims = state.dims
    weights = np.abs(state.tensor()) ** 2
    if state.has_qubit:
        weights = weights.sum(axis=0)
    excitation = dims.total_excitation().reshape(dims.N, dims.N)
    outside = excitation > dims.n_max
    leakage = float(weights[outside].sum())
    if leakage == 0.0:
        return state, 0.0
    if leakage > cfg.leak_tol:
        per_sector = np.bincount(excitation[outside], weights=weights[outside])
        worst = int(np.argmax(per_sector))
        raise TruncationError(
            f"weight {leakage:.3e} in sectors m+n > n_max={dims.n_max} exceeds "
            f"leak_tol={cfg.leak_tol:.1e}; largest in sector m+n={worst}",
            leakage=leakage,
            sector=worst,
        )
    keep = OperatorMatrix(sp.diags((~outside).ravel().astype(complex)))
    return _lift(keep, state) @ state, leakage


def apply_pulse(
    state: StateVector, pulse: PulseSpec, cfg: EvolutionConfig = EvolutionConfig()
) -> tuple[StateVector, float]:
    """Apply one pulse; return the renormalized state and its leakage."""
    state, leakage = _drop_unreliable(state, cfg)
    dims, theta = state.dims, float(pulse.theta)
    if pulse.hamiltonian == "H2":
        out = _lift(_beam_splitter(theta, dims.n_max, cfg.method), state) @ state
    else:
        if not state.has_qubit:
            raise ValueError("H1 pulses need a state with the qubit factor")
        if cfg.method == "expm_oracle":
            out = _h1_expm_oracle(theta, dims.n_max) @ state
        else:
            sx = sigma_x()
            half = identity(2) * 0.5
            proj_plus = embed(half + sx * 0.5, "qubit", dims)
            proj_minus = embed(half - sx * 0.5, "qubit", dims)
            fwd = embed(_beam_splitter(theta, dims.n_max, cfg.method), "modesAB", dims)
            back = embed(_beam_splitter(-theta, dims.n_max, cfg.method), "modesAB", dims)
            out = StateVector(dims, (proj_plus @ fwd @ state).amps + (proj_minus @ back @ state).amps)
    norm2 = out.norm() ** 2
    if abs(norm2 - 1.0) > cfg.leak_tol:
        raise TruncationError(
            f"norm^2 {norm2:.12f} after {pulse.hamiltonian} departs from 1 by more than leak_tol",
            leakage=abs(1 - norm2),
        )
    return out.normalize(), leakage


def apply_h2(state: StateVector, theta: float, cfg: EvolutionConfig = EvolutionConfig()) -> StateVector:
    return apply_pulse(state, PulseSpec("H2", theta), cfg)[0]


def apply_h1(state: StateVector, theta: float, cfg: EvolutionConfig = EvolutionConfig()) -> StateVector:
    return apply_pulse(state, PulseSpec("H1", theta), cfg)[0]


def _as_pulse(p) -> PulseSpec:
    return p if isinstance(p, PulseSpec) else PulseSpec(*p)


def run_sequence(
    state: StateVector,
    pulses: Iterable[PulseSpec | Sequence],
    cfg: EvolutionConfig = EvolutionConfig(),
) -> tuple[StateVector, list[float]]:
    """Apply pulses left to right; the log holds each pulse's leakage."""
    log = []
    for pulse in pulses:
        state, leak = apply_pulse(state, _as_pulse(pulse), cfg)
        log.append(leak)
    return state, log
