"""Generalized shape expansion planners (GSE, GSE*) and benchmarks."""

from .geometry import (
    AxisBox,
    ConvexHullCloud,
    Environment,
    GeometryError,
    PointInObstacleError,
    SamplingBudgetExceeded,
    Sphere,
    estimate_free_measure,
    max_angular_spread,
    min_distance_vector,
    sample_free,
    segment_collision_free,
)
from .shape import GeneralizedShape, build_shape, contains, free_length_along, shapes_connect
from .roadmap import PathResult, Roadmap
from .planners import (
    ConfigError,
    GSEPlanner,
    GSEStarPlanner,
    PlannerConfig,
    PRMStarPlanner,
    RunTrace,
    connection_radius,
    gamma_lower_bound,
    prm_star_plan,
    steer,
    steer_gse,
)

__version__ = "0.1.0"

__all__ = [
    "AxisBox",
    "ConfigError",
    "ConvexHullCloud",
    "Environment",
    "GSEPlanner",
    "GSEStarPlanner",
    "GeneralizedShape",
    "GeometryError",
    "PRMStarPlanner",
    "PathResult",
    "PlannerConfig",
    "PointInObstacleError",
    "Roadmap",
    "RunTrace",
    "SamplingBudgetExceeded",
    "Sphere",
    "build_shape",
    "connection_radius",
    "contains",
    "estimate_free_measure",
    "free_length_along",
    "gamma_lower_bound",
    "max_angular_spread",
    "min_distance_vector",
    "prm_star_plan",
    "sample_free",
    "segment_collision_free",
    "shapes_connect",
    "steer",
    "steer_gse",
]
