"""Macroscopic-state structure of finite-dimensional quantum systems under a
fixed measurement and prior: Petz retrodiction, coarse-graining maps, the
maximal projective post-processing, observational entropy and deficit,
the resource theory of microscopicity, and observational discord."""

from .correlations import (
    DiscordReport,
    LocalFrame,
    LocalMicroBound,
    discord_vanishing_test,
    locally_macro_test,
    observational_discord,
    rel_ent_local_micro_upper,
)
from .entropy import (
    EntropyValue,
    mutual_information,
    observational_deficit,
    observational_entropy,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    ImageNotInvertible,
    IndeterminateDifference,
    InvalidPovm,
    InvalidStochasticMap,
    MacroscopeError,
    MarginalNotInvertible,
    MpppNotTrivial,
    NontrivialMultiplicity,
    NotARepresentation,
    NotHermitian,
    NotPSD,
    PreconditionViolated,
    PriorNotInvertible,
    SchemaError,
    TheoremViolation,
    TooManyOutcomes,
)
from .evolution import evolve_trajectory, macroscopic_initial_state
from .linalg import (
    DEFAULT_TOL,
    HermitianEigen,
    Tolerance,
    hermitian_eig,
    mat_inv_sqrt,
    mat_log2,
    mat_pow,
    mat_sqrt,
    partial_trace,
    partial_transpose,
    support_projector,
    tensor,
)
from .mppp import (
    DisconnectionGraph,
    InferentialFrame,
    MacroReport,
    Partition,
    brute_force_mppp,
    compute_mppp,
    disconnection_graph,
    fixed_point_space_dim,
    macro_test,
    resource_destroying_map,
)
from .quantum import (
    Channel,
    ClassicalState,
    DensityMatrix,
    LinearMap,
    Povm,
    StochasticMap,
    adjoint_channel,
    apply_channel,
    basis_pvm,
    channel_compose,
    channel_tensor_identity,
    check_deterministic_postprocessing,
    identity_channel,
    is_pvm,
    maximally_mixed,
    measure_probabilities,
    measurement_channel,
    post_process,
    unitary_channel,
)
from .resources import (
    ChannelClassification,
    FreeStateSet,
    classify_channel,
    gibbs_state,
    is_free_state,
    minimize_divergence_over_simplex,
    rel_ent_microscopicity,
    scenario_asymmetry,
    scenario_athermality,
    scenario_coherence,
)
from .retrodiction import (
    CoarseGrainingMap,
    adjoint_coarse_grain_povm,
    cesaro_average,
    coarse_grain,
    coarse_graining_map,
    petz_map,
)

__version__ = "0.1.0"
