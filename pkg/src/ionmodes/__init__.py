"""State-vector simulation of an ion qubit coupled to two truncated motional modes."""

from .analysis import (
    JointNumberDistribution,
    entanglement_entropy,
    extract_relative_phase,
    fidelity,
    joint_number_distribution,
)
from .errors import (
    DegenerateStateError,
    InvalidDimensionError,
    IonModesError,
    OccupationError,
    OracleFailureError,
    TruncationError,
    UndefinedPhaseError,
)
from .evolution import (
    EvolutionConfig,
    PulseSpec,
    apply_h1,
    apply_h2,
    apply_pulse,
    beam_splitter_expm_oracle,
    beam_splitter_matrix,
    run_sequence,
)
from .hilbert import (
    BasisIndex,
    Dims,
    OperatorMatrix,
    Qubit,
    StateVector,
    embed,
    identity,
    inner,
    make_annihilation,
    make_exchange_generator,
    make_number,
    sigma_x,
)
from .measurement import MeasurementRecord, measure_qubit, sample_measurement, sample_outcomes
from .protocols import (
    ProtocolReport,
    exchange_phase,
    run_p1_su2_cat,
    run_p2_entangled_number,
    run_p3_entangled_coherent,
    run_p4_fredkin,
)
from .states import (
    CoherentParams,
    Su2Params,
    make_cat_reference,
    make_coherent,
    make_fock,
    make_motional_fock,
    make_qubit_superposition,
    make_su2_coherent,
)

__version__ = "0.1.0"
