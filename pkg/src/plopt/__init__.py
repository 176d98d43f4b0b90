"""Quality scoring, gap detection and modification selection for product-line architectures."""

from plopt.assessment import (
    IrrelevancePolicy,
    Product,
    ResolvedAssessment,
    ScoreMatrix,
    adherence,
    product_quality,
    resolve_irrelevance,
    validate_assessment,
    weighted_score,
)
from plopt.catalog import (
    Catalog,
    ConflictGraph,
    Modification,
    PerFeatureGains,
    PerProductGains,
    apply,
    count_feasible,
    is_feasible,
    subset_cost,
    subset_gain,
    total_cost,
    validate_catalog,
)
from plopt.gaps import (
    GapReport,
    build_gap_report,
    feature_stats,
    high_impact_features,
    product_major_gaps,
)
from plopt.optimizer import (
    Budget,
    Plan,
    Ratio,
    enumerate_feasible,
    optimize,
    optimize_budget,
    optimize_ratio,
    pareto_export,
)
from plopt.quality_model import (
    Characteristic,
    Feature,
    QualityModel,
    apply_default_characteristic_weights,
    feature_overall_weight,
    max_adherence,
    renormalize,
    validate_model,
)
from plopt.validation import Issue, ValidationReport

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "Catalog",
    "Characteristic",
    "ConflictGraph",
    "Feature",
    "GapReport",
    "IrrelevancePolicy",
    "Issue",
    "Modification",
    "PerFeatureGains",
    "PerProductGains",
    "Plan",
    "Product",
    "QualityModel",
    "Ratio",
    "ResolvedAssessment",
    "ScoreMatrix",
    "ValidationReport",
    "adherence",
    "apply",
    "apply_default_characteristic_weights",
    "build_gap_report",
    "count_feasible",
    "enumerate_feasible",
    "feature_overall_weight",
    "feature_stats",
    "high_impact_features",
    "is_feasible",
    "max_adherence",
    "optimize",
    "optimize_budget",
    "optimize_ratio",
    "pareto_export",
    "product_major_gaps",
    "product_quality",
    "renormalize",
    "resolve_irrelevance",
    "subset_cost",
    "subset_gain",
    "total_cost",
    "validate_assessment",
    "validate_catalog",
    "validate_model",
    "weighted_score",
]
