"""Simulation, tomography and certification of the four-qubit Smolin state."""

from .analysis import (
    AnalysisReport,
    BipartiteCut,
    Estimate,
    analyze_state,
    concurrence,
    fidelity,
    max_product_overlap,
    min_product_overlap,
    min_pt_eigenvalue,
    pt_spectrum,
    tangle,
    witness_expectation,
    witness_geometry_check,
    witness_operator,
)
from .errors import (
    InfeasibleSourceError,
    NotInformationallyCompleteError,
    NullProjectionError,
    NumericalError,
    SmolinError,
    ValidationError,
)
from .linalg import partial_trace, partial_transpose, pauli_string, permute_qubits, tensor
from .mle import ReconstructionConfig, independent_mle_oracle, log_likelihood, mle_reconstruct
from .montecarlo import McConfig, McResult, monte_carlo, monte_carlo_errors
from .states import (
    SourceModel,
    bell_projector,
    bell_state,
    imperfect_source,
    noisy_smolin,
    smolin,
    source_state,
    twirl_sample,
    twirled_state,
    werner_state,
)
from .tomography import (
    CountTable,
    basis_settings,
    combine_complementary,
    expected_counts,
    overcomplete_settings,
    simulate_counts,
    witness_from_counts,
)
from .unlocking import BellProjectionSpec, bell_project, simulate_unlocking_run, unlocked_state

__version__ = "0.1.0"
