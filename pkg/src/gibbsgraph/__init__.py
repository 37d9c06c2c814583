"""Gibbs random graphs over a line of vertices: sampling, path-length
functionals, hierarchical constructions, cutpoint bounds, and layer
certification."""

__version__ = "0.1.0"

from .graph import (
    Graph,
    DistanceCache,
    ModelParams,
    new_graph,
    graph_from_edges,
    graph_to_json,
    graph_from_json,
    apsp,
    avg_path_length,
    cost,
    add_edge_incremental,
    remove_edge_recompute,
    count_edges_of_length_at_least,
    diameter_exact,
)
from .constructions import (
    dyadic_edges,
    topdown_construction,
    bottomup_construction,
    critical_construction,
    theoretical_exponent,
    band_gap,
    critical_exponent,
)
from .cutpoints import (
    CutpointReport,
    LocalCutpointReport,
    is_sigma_cutpoint,
    cutpoint_sequence,
    h1_lower_bound_cutpoints,
    reach,
    local_cutpoints,
    h1_lower_bound_local,
    endpoints_of_long_edges,
)
from .layers import (
    CertParams,
    LayerCertificate,
    MassReport,
    cover_count,
    cover_profile,
    cost_psi_identity,
    irregular_vertices,
    level1_decompose,
    level2_decompose,
    level3_layers,
    certify_long_edge_mass,
)
from .gibbs import (
    ChainRecord,
    ChainState,
    ExactSummary,
    edge_log_odds,
    energy,
    sample_reference,
    new_chain,
    metropolis_step,
    run_chain,
    enumerate_exact,
    explicit_transition_matrix,
)
from .experiments import (
    SweepConfig,
    ExponentEstimate,
    estimate_exponent,
    staircase_sweep,
    ldp_check,
    cutpoint_density_experiment,
)
