"""Figures of merit for motional states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, UndefinedPhaseError
from .hilbert import StateVector, inner

__all__ = [
    "JointNumberDistribution",
    "SCHMIDT_CUTOFF",
    "fidelity",
    "schmidt_coefficients",
    "entanglement_entropy",
    "joint_number_distribution",
    "extract_relative_phase",
    "reduced_density_a",
]

SCHMIDT_CUTOFF = 1e-12


def _motional(state: StateVector) -> StateVector:
    if state.has_qubit:
        raise InvalidDimensionError("expected a motional state without the qubit factor")
    return state


def fidelity(u: StateVector, v: StateVector) -> float:
    """``|<u|v>|^2``, clipped to [0, 1]."""
    return float(min(1.0, max(0.0, abs(inner(u, v)) ** 2)))


def schmidt_coefficients(state: StateVector) -> np.ndarray:
    """Squared Schmidt coefficients (mode a | mode b), descending, cut at 1e-12."""
    sv = np.linalg.svd(_motional(state).tensor(), compute_uv=False)
    sv = sv[sv > SCHMIDT_CUTOFF]
    return sv**2


def entanglement_entropy(state: StateVector) -> float:
    """Von Neumann entropy of mode a in bits."""
    lam = schmidt_coefficients(state)
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def reduced_density_a(state: StateVector) -> np.ndarray:
    psi = _motional(state).tensor()
    return psi @ psi.conj().T


@dataclass(frozen=True)
class JointNumberDistribution:
    n_max: int
    p: np.ndarray

    def marginal_a(self) -> np.ndarray:
        return self.p.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def support(self, tol: float = 0.0) -> list[tuple[int, int]]:
        return [tuple(map(int, mn)) for mn in np.argwhere(self.p > tol)]


def joint_number_distribution(state: StateVector) -> JointNumberDistribution:
    p = np.abs(_motional(state).tensor()) ** 2
    p.setflags(write=False)
    return JointNumberDistribution(state.dims.n_max, p)


def extract_relative_phase(state: StateVector, first: tuple[int, int], second: tuple[int, int]) -> complex:
    """Unit-modulus ratio ``amp(first) / amp(second)`` of two Fock amplitudes."""
    a = _motional(state).amplitude(*first)
    b = state.amplitude(*second)
    if abs(a) <= 1e-12 or abs(b) <= 1e-12:
        raise UndefinedPhaseError(f"amplitude at {first if abs(a) <= 1e-12 else second} vanishes")
    ratio = a / b
    return ratio / abs(ratio)
