"""bellopt: quantum bounds, error tolerance, and threshold detection
efficiencies of a weighted CH-type Bell functional with a three-outcome
setting, via multistart conjugate-gradient search with independent oracles."""

__version__ = "0.1.0"

from .quantum import (  # noqa: F401
    Basis,
    Povm3,
    PovmAngles,
    ProjectiveSetting,
    TwoQubitPureState,
    joint_probability,
    make_phi_plus,
    make_state,
    min_eigenvalue,
    positivity_residuals,
    povm_from_angles,
    projector_pair,
)
from .inequality import (  # noqa: F401
    RankClass,
    RankProfile,
    Scenario,
    bob_overlap,
    i3_value,
    ich3_value,
    ich_value,
    lhv_max,
    projective_variant_params,
    rank_profile,
)
from .optimizer import (  # noqa: F401
    OptimizationRecord,
    OptimizerConfig,
    cg_maximize,
    multistart,
    objective,
    sweep,
)
from .efficiency import (  # noqa: F401
    EfficiencyResult,
    NoThresholdError,
    NoViolationError,
    efficiency_value,
    eta_crit_ratio,
    eta_crit_root,
    minimize_eta_crit,
)
from .error_tolerance import (  # noqa: F401
    RecordPair,
    ToleranceReport,
    collect_records,
    max_supported_delta,
    povm_advantage,
    violation_margin,
)
from .oracle import (  # noqa: F401
    OracleReport,
    gradient_check,
    local_unitary_check,
    random_search,
)
