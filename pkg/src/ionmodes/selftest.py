"""Numerical self-checks of the evolution, analysis and measurement code."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution
from .analysis import entanglement_entropy
from .hilbert import Dims, StateVector
from .measurement import measure_qubit
from .states import make_cat_reference

SELFTEST_N_MAX = (4, 12, 30)
SELFTEST_THETAS = (0.1, math.pi / 4, math.pi / 2, 1.9)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    n_max: int
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def _reliable(dims: Dims) -> np.ndarray:
    return dims.total_excitation() <= dims.n_max


def _random_reliable_state(dims: Dims, rng, with_qubit=False) -> StateVector:
    mask = _reliable(dims)
    amps = (rng.normal(size=dims.modes_dim) + 1j * rng.normal(size=dims.modes_dim)) * mask
    if with_qubit:
        q = rng.normal(size=2) + 1j * rng.normal(size=2)
        amps = np.kron(q, amps)
    return StateVector(dims, amps).normalize()


def oracle_equivalence(n_max: int) -> CheckResult:
    dev = 0.0
    for theta in SELFTEST_THETAS:
        closed = evolution.beam_splitter_matrix(theta, n_max).to_dense()
        oracle = evolution.beam_splitter_expm_oracle(theta, n_max).to_dense()
        dev = max(dev, float(np.abs(closed - oracle).max()))
    return CheckResult("oracle-equivalence", n_max, dev, 1e-10)


def unitarity(n_max: int, rng) -> CheckResult:
    dims = Dims(n_max)
    dev = 0.0
    for theta in SELFTEST_THETAS:
        U = evolution.beam_splitter_matrix(theta, n_max)
        for _ in range(3):
            psi = _random_reliable_state(dims, rng)
            dev = max(dev, abs((U @ psi).norm() - psi.norm()))
    return CheckResult("unitarity", n_max, dev, 1e-12)


def group_law(n_max: int, rng) -> CheckResult:
    dims = Dims(n_max)
    dev = 0.0
    for t1, t2 in ((0.2, 0.5), (math.pi / 4, math.pi / 4), (1.9, -0.7)):
        lhs = (evolution.beam_splitter_matrix(t1, n_max) @ evolution.beam_splitter_matrix(t2, n_max)).to_dense()
        rhs = evolution.beam_splitter_matrix(t1 + t2, n_max).to_dense()
        dev = max(dev, float(np.abs(lhs - rhs).max()))
        psi = _random_reliable_state(dims, rng, with_qubit=True)
        two, _ = evolution.run_sequence(psi, [("H1", t1), ("H1", t2)])
        one, _ = evolution.run_sequence(psi, [("H1", t1 + t2)])
        dev = max(dev, float(np.abs(two.amps - one.amps).max()))
    return CheckResult("group-law", n_max, dev, 1e-10)


def conservation(n_max: int) -> CheckResult:
    dims = Dims(n_max)
    excitation = dims.total_excitation()
    off = 0.0
    for theta in SELFTEST_THETAS:
        U = evolution.beam_splitter_matrix(theta, n_max)
        for m in range(n_max + 1):
            for n in range(n_max + 1 - m):
                amps = np.zeros(dims.modes_dim, dtype=complex)
                amps[m * dims.N + n] = 1.0
                out = U @ StateVector(dims, amps)
                off = max(off, float(np.sum(np.abs(out.amps[excitation != m + n]) ** 2)))
    return CheckResult("conservation", n_max, off, 0.0)


def entropy_number_cat(n_max: int) -> CheckResult:
    dims = Dims(n_max)
    dev = 0.0
    for n in range(1, n_max + 1):
        cat = make_cat_reference("number_cat", n, "+", dims)
        dev = max(dev, abs(entanglement_entropy(cat) - 1.0))
    return CheckResult("entropy", n_max, dev, 1e-10)


def measurement_sums(n_max: int, rng, count: int = 100) -> CheckResult:
    dims = Dims(n_max)
    dev = 0.0
    for k in range(count):
        amps = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
        psi = StateVector(dims, amps).normalize()
        basis = "z" if k % 2 == 0 else "x"
        dev = max(dev, abs(sum(r.probability for r in measure_qubit(psi, basis)) - 1.0))
    return CheckResult("measurement", n_max, dev, 1e-12)


def run_checks(n_max_values=SELFTEST_N_MAX, seed: int = 20240917) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for n_max in n_max_values:
        results.append(oracle_equivalence(n_max))
        results.append(unitarity(n_max, rng))
        results.append(group_law(n_max, rng))
        results.append(conservation(n_max))
        results.append(entropy_number_cat(n_max))
        results.append(measurement_sums(n_max, rng))
    return results
