"""Referral-chain (RDS) sampling simulation and estimation on block-structured networks."""

from .dcsbm import (
    AssumptionReport,
    DcsbmParams,
    GenerationResult,
    check_assumptions,
    contiguous_labels,
    expected_degree,
    generate,
    homogeneous_theta,
    params_from_config,
    params_to_config,
    powerlaw_theta,
    scale_to_mean_degree,
)
from .estimators import (
    DEFAULT_SMOOTHING,
    BlockSummary,
    EstimateResult,
    block_counts,
    block_transition,
    blockwise_vh,
    equilibrium_eigen,
    harmonic_mean_degree,
    ipw,
    pi_hat,
    ps,
    sample_mean,
    vh,
)
from .experiments import (
    DcsbmNetwork,
    ExperimentConfig,
    ExperimentReport,
    ExternalNetwork,
    OutcomeConfig,
    ReportRow,
    SamplingConfig,
    ScalingStudyResult,
    config_from_doc,
    read_report,
    run,
    sweep,
    variance_scaling_study,
    write_report,
)
from .graph import (
    BlockAssignment,
    DegenerateNodeError,
    DisconnectedGraphError,
    Graph,
    ParseError,
    largest_connected_component,
    load_edge_list,
    load_labels,
    stationary_distribution,
)
from .oracle import (
    TreeChainMoments,
    WalkDistribution,
    enumerate_walks,
    exact_moments,
    tree_chain_moments,
    zeta,
)
from .population import (
    ConcentrationReport,
    PopulationBlockModel,
    empirical_block_affinity,
    node_block_transition,
    population_model,
    transition_concentration,
)
from .sampling import (
    RdsSample,
    RdsSampleBatch,
    SamplingFailureError,
    SamplingTree,
    SeedPolicy,
    TreeExtinctError,
    complete_ary_tree,
    poisson_tree,
    sample_from_json,
    sample_to_json,
    sample_with_replacement,
    sample_with_replacement_batch,
    sample_without_replacement,
    select_seed,
)

__version__ = "0.1.0"
