"""Local energy extraction in bipartite quantum systems.

The package decides whether a joint state and Hamiltonian admit any
completely positive trace-preserving map on subsystem A that lowers the
global energy, computes the optimal extraction via a semidefinite program,
and evaluates analytic threshold bounds for thermal states.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .config import DEFAULT, Tolerances
from .errors import (
    CplpError,
    DimensionMismatch,
    EnergyIdentityError,
    GroundStateError,
    InvalidState,
    ModelError,
    NotHermitian,
)
from .operators import (
    BipartiteSpace,
    DensityMatrix,
    HermitianOperator,
    boltzmann_weights,
    density_matrix,
    eig_hermitian,
    gibbs,
    herm,
    op_norm,
    partial_trace,
    partial_transpose_a,
    schmidt_spectrum,
    tensor,
    trace_norm,
)
from .models import (
    SpinChainSpec,
    TwoQubitSpec,
    build_chain,
    build_two_qubit,
    chain_split,
    eigenmixture,
    rotated_thermal,
    two_qubit_split,
)
from .passivity import (
    ExtractionOperator,
    PassivityReport,
    check_passivity,
    extraction_bound,
    extraction_operator,
)
from .sdp import (
    CertificateReport,
    ChoiMatrix,
    SdpSolution,
    apply_choi,
    choi_matrix,
    depolarizing_choi,
    identity_choi,
    solve_extraction,
    verify_certificate,
)
from .scan import (
    ConvergenceReport,
    ScanResult,
    ThermalModel,
    ThresholdResult,
    chain_convergence,
    rotated_thermal_model,
    sweep_kappa,
    sweep_parameter,
    thermal_model,
    threshold_temperature,
    write_scan_csv,
    write_scan_json,
)
from .classical import (
    ClassicalInstance,
    ClassicalResult,
    SupportCondition,
    check_support_condition,
    classical_instance,
    solve_classical,
)
from .bounds import (
    FrustrationResult,
    ShieldedRegionInputs,
    ShieldedRegionReport,
    SpectralData,
    TemperatureBound,
    clustering_estimate,
    frustration,
    shielded_region_check,
    spectral_data,
    threshold_population,
    threshold_temperature_bound,
)
