"""Projective readout of the ion's internal state with post-selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import StateVector

__all__ = [
    "MeasurementRecord",
    "ZERO_PROBABILITY",
    "outcome_labels",
    "measure_qubit",
    "sample_measurement",
    "sample_outcomes",
]

ZERO_PROBABILITY = 1e-14

# Bra vectors (c_down, c_up) of each outcome; |-> = (|up> - |down>)/sqrt(2).
_BRAS = {
    "z": {"down": np.array([1.0, 0.0]), "up": np.array([0.0, 1.0])},
    "x": {
        "plus": np.array([1.0, 1.0]) / math.sqrt(2),
        "minus": np.array([-1.0, 1.0]) / math.sqrt(2),
    },
}


def _basis_key(basis: str) -> str:
    key = {"z": "z", "z_basis": "z", "x": "x", "x_basis": "x"}.get(basis)
    if key is None:
        raise ValueError(f"basis must be 'z' or 'x', got {basis!r}")
    return key


def outcome_labels(basis: str) -> tuple[str, ...]:
    return tuple(_BRAS[_basis_key(basis)])


@dataclass(frozen=True)
class MeasurementRecord:
    """One readout branch; ``collapsed`` is the motional state, or None."""

    basis: str
    outcome: str
    probability: float
    collapsed: StateVector | None


def measure_qubit(state: StateVector, basis: str = "z") -> tuple[MeasurementRecord, ...]:
    """Enumerate both readout branches with Born probabilities."""
    if not state.has_qubit:
        raise ValueError("state has no qubit factor to measure")
    key = _basis_key(basis)
    t = state.tensor()
    records = []
    for label, bra in _BRAS[key].items():
        branch = np.tensordot(bra.conj(), t, axes=1)
        prob = float(np.vdot(branch, branch).real)
        if prob < ZERO_PROBABILITY:
            records.append(MeasurementRecord(f"{key}_basis", label, 0.0, None))
            continue
        collapsed = StateVector(state.dims, branch / math.sqrt(prob))
        records.append(MeasurementRecord(f"{key}_basis", label, prob, collapsed))
    return tuple(records)


def sample_outcomes(state: StateVector, basis: str, shots: int, rng_seed: int) -> list[str]:
    """Draw ``shots`` readout labels from one seeded generator."""
    records = measure_qubit(state, basis)
    probs = np.array([r.probability for r in records])
    rng = np.random.default_rng(rng_seed)
    picks = rng.choice(len(records), size=shots, p=probs / probs.sum())
    return [records[i].outcome for i in picks]


def sample_measurement(state: StateVector, basis: str, rng_seed: int) -> MeasurementRecord:
    """Draw a single readout branch with Born probability."""
    records = measure_qubit(state, basis)
    probs = np.array([r.probability for r in records])
    rng = np.random.default_rng(rng_seed)
    return records[int(rng.choice(len(records), p=probs / probs.sum()))]
