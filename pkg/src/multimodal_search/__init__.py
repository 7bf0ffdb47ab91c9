"""Multimodal linear search: strategy simulation, optimal parameters and audits."""

from .analysis import (
    CrReport,
    WitnessSequences,
    analytic_cr_limit,
    audit_min_growth,
    audit_odd_lower_bound,
    cr_convergence_series,
    empirical_cr,
    extract_witness,
    recurrence_collapse,
    worst_case_targets,
)
from .coverage import (
    ALL,
    NONE,
    IslandSnapshot,
    MotionSegment,
    Trajectory,
    TrajectoryBuilder,
    coverage_islands,
    exploration_time,
    exploration_times,
    mode_cover_time,
    position_at,
)
from .solver import (
    OptimalEven,
    OptimalOdd,
    compliant_cell_count,
    discriminant_poly,
    even_bracket,
    even_optimal,
    lower_bound_floor,
    odd_optimal,
    optimal,
    optimal_cr,
    sign_change_audit,
)
from .strategies import (
    CompliantPlan,
    StrategyParams,
    Variant,
    build_trajectory,
    cell_search,
    compliant_plan,
    compliant_thorough_search,
    discrete_thorough_search,
    even_search,
    odd_search,
    practical_search,
    thorough_search,
)

__version__ = "0.1.0"

__all__ = [
    "ALL",
    "NONE",
    "analytic_cr_limit",
    "audit_min_growth",
    "audit_odd_lower_bound",
    "build_trajectory",
    "cell_search",
    "compliant_cell_count",
    "compliant_plan",
    "compliant_thorough_search",
    "CompliantPlan",
    "coverage_islands",
    "cr_convergence_series",
    "CrReport",
    "discrete_thorough_search",
    "discriminant_poly",
    "empirical_cr",
    "even_bracket",
    "even_optimal",
    "even_search",
    "exploration_time",
    "exploration_times",
    "extract_witness",
    "IslandSnapshot",
    "lower_bound_floor",
    "mode_cover_time",
    "MotionSegment",
    "odd_optimal",
    "odd_search",
    "optimal",
    "optimal_cr",
    "OptimalEven",
    "OptimalOdd",
    "position_at",
    "practical_search",
    "recurrence_collapse",
    "sign_change_audit",
    "StrategyParams",
    "thorough_search",
    "Trajectory",
    "TrajectoryBuilder",
    "Variant",
    "WitnessSequences",
    "worst_case_targets",
]
