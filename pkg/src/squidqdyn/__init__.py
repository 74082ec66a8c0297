"""Truncated charge-basis simulator for Josephson-junction qubits."""

from .charge import (
    ChargeBasis,
    HermitianOperator,
    QubitParams,
    build_single_hamiltonian,
    josephson_energy,
    split_h0_hc,
)
from .coupled import (
    CapacitiveCoupling,
    FourLevelEffective,
    InductiveCoupling,
    InductiveCorrections,
    build_capacitive_hamiltonian,
    build_inductive_hamiltonian,
    capacitive_cnot,
    cnot_fidelity_scan,
    he_corrected,
    ho_block,
    ho_effective,
    inductive_error_curve,
)
from .dynamics import (
    EvolutionReport,
    ProbeSet,
    error_curve,
    fit_loglog_slope,
    project_computational,
    trace_distance,
)
from .numerics import SpectralDecomposition, eigh, evolve_unitary
from .perturbation import (
    CorrectionMode,
    CorrectionPair,
    TwoLevelHamiltonian,
    corrections,
    effective_corrected,
    effective_first_order,
)

__version__ = "0.1.0"
