from .hull import (
    DegenerateInputError,
    HullFacets,
    HullFailure,
    ValidityReport,
    incremental_hull,
    validate_hull,
)
from .predicates import (
    MajorityResult,
    OrientationSign,
    Point3,
    orient_base,
    orient_exact,
    orient_majority,
    orient_majority_detail,
    orientation_determinant,
)
from .search import (
    OrientCounterexample,
    OrientSearchConfig,
    SearchReport,
    gen_near_coplanar,
    gen_near_coplanar_cloud,
    search_disagreement,
)
from .smt import emit_smt

__all__ = [
    "DegenerateInputError",
    "HullFacets",
    "HullFailure",
    "ValidityReport",
    "incremental_hull",
    "validate_hull",
    "MajorityResult",
    "OrientationSign",
    "Point3",
    "orient_base",
    "orient_exact",
    "orient_majority",
    "orient_majority_detail",
    "orientation_determinant",
    "OrientCounterexample",
    "OrientSearchConfig",
    "SearchReport",
    "gen_near_coplanar",
    "gen_near_coplanar_cloud",
    "search_disagreement",
    "emit_smt",
]
