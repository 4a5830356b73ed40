"""Coverage statistics for Latin hypercube and orthogonal sampling designs.

Exact rational expectations, closed-form laws with error bounds, pinned
reproducible samplers, Monte Carlo estimation, brute-force oracles, and
threshold sweeps, with a CSV-first command line.
"""

__version__ = "0.1.0"

from .design import (
    DesignSpec,
    EdgeProjection,
    SubBlockCoord,
    Trial,
    decode_subblock_value,
    encode_subblock_value,
    is_latin,
    is_orthogonal,
    project_edges,
)
from .exact import (
    ExactRational,
    IntersectionKind,
    KindParams,
    count_lh_trials,
    count_os_trials,
    count_trials_containing_edge,
    count_trials_containing_tuple,
    coverage_universe,
    expected_coverage_multiset,
    expected_covered_cells_multiset,
    expected_intersection,
    kind_params,
)
from .errors import (
    CapExceededError,
    GuardExceededError,
    HypercovError,
    InvalidModeError,
    StructuralError,
    UnsupportedSpecError,
)
from .laws import (
    BracketReport,
    CoverageLaw,
    ErrorBounds,
    LawModel,
    asymptotic_law,
    bracket_exact_vs_asymptotic,
    conjecture_law,
    coverage_closed_form,
    error_bounds,
    iid_law,
    lambda_for,
    lambda_fraction,
)
from .oracle import (
    CheckResult,
    EnumeratedTrialSet,
    default_verification_suite,
    edge_occurrence_counts,
    enumerate_trials,
    oracle_expected_coverage,
    oracle_expected_intersection,
    tuple_occurrence_counts,
)
from .sampling import (
    SampleKind,
    SamplerConfig,
    assemble_orthogonal,
    gen_lh_trial,
    gen_os_trial,
    gen_trial,
    gen_trials,
)
from .simulate import (
    CoverageReport,
    FullTuple,
    Projected,
    SimPlan,
    SubblockEdge,
    coverage_curve,
    simulate_coverage,
    subblock_uniformity,
    summarize,
)
from .sweep import (
    FitResult,
    SweepMode,
    SweepResult,
    find_k_for_target,
    fit_slope,
    run_sweep,
)
