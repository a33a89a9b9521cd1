"""Numerical toolkit for planar Hilbert geometries."""

from .domains import (
    Chord,
    ConvexDomain,
    Ellipse,
    Line2,
    PBall,
    Polygon,
    PowerCap,
    ProjectiveImage,
    ProjectiveMap,
    SmoothedPolygon,
    domain_from_json,
    domain_from_spec,
    regular_polygon,
    unit_disk,
)
from .errors import (
    DegenerateVertices,
    GeometryError,
    ImproperImage,
    InsufficientSignal,
    InvalidTriangle,
    NoConvergence,
    NotConvex,
    NotOnBoundary,
    PointNotInterior,
    PreconditionViolated,
    RegionOutsideDomain,
    SegmentNotInDomain,
    SingularConstraints,
    StripTooWide,
)
from .measure import (
    QuadratureEstimate,
    ball_area,
    ball_boundary_polygon,
    densities,
    density,
    region_area,
    unit_ball_area,
    unit_ball_areas,
)
from .metric import (
    DeltaEstimate,
    FourPointConfig,
    ThinTriangleConfig,
    boundary_biased_points,
    delta_four_point,
    delta_four_point_grid,
    delta_thin,
    finsler_norm,
    finsler_norms,
    gromov_product,
    hilbert_distance,
    hilbert_distances,
    point_to_segment_distance,
    point_to_segment_distances,
    reevaluate_witness,
    triangle_thinness,
    window_candidates,
)
from .normalize import (
    AlphaFit,
    GraphStrip,
    NormalizationResult,
    boundary_graph,
    graph_alpha_fit,
    normalize_many,
    normalize_triangle_pointed,
)
from .regularity import (
    DerivativeHolderResult,
    RegularityReport,
    SampledFunction,
    boundary_regularity_report,
    chain_constants,
    derivative_holder_check,
    holder_bound_check,
    qs_constant,
    qsc_constant,
)
from .suites import (
    CheckResult,
    SuiteReport,
    point_at_distance,
    power_cap_corner_bound,
    run_suite,
)
from .triangles import (
    CornerDecomposition,
    CornerLadder,
    IdealTriangle,
    SupAreaResult,
    TriangleSamplerConfig,
    corner_decomposition,
    ideal_triangle_area,
    ideal_triangle_area_detail,
    ideal_triangle_from_points,
    make_ideal_triangle,
    sup_area_search,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFit",
    "CheckResult",
    "Chord",
    "ConvexDomain",
    "CornerDecomposition",
    "CornerLadder",
    "DegenerateVertices",
    "DeltaEstimate",
    "DerivativeHolderResult",
    "Ellipse",
    "FourPointConfig",
    "GeometryError",
    "GraphStrip",
    "IdealTriangle",
    "ImproperImage",
    "InsufficientSignal",
    "InvalidTriangle",
    "Line2",
    "NoConvergence",
    "NormalizationResult",
    "NotConvex",
    "NotOnBoundary",
    "PBall",
    "PointNotInterior",
    "Polygon",
    "PowerCap",
    "PreconditionViolated",
    "ProjectiveImage",
    "ProjectiveMap",
    "QuadratureEstimate",
    "RegionOutsideDomain",
    "RegularityReport",
    "SampledFunction",
    "SegmentNotInDomain",
    "SingularConstraints",
    "SmoothedPolygon",
    "StripTooWide",
    "SuiteReport",
    "SupAreaResult",
    "ThinTriangleConfig",
    "TriangleSamplerConfig",
    "ball_area",
    "ball_boundary_polygon",
    "boundary_biased_points",
    "boundary_graph",
    "boundary_regularity_report",
    "chain_constants",
    "corner_decomposition",
    "delta_four_point",
    "delta_four_point_grid",
    "delta_thin",
    "densities",
    "density",
    "derivative_holder_check",
    "domain_from_json",
    "domain_from_spec",
    "finsler_norm",
    "finsler_norms",
    "graph_alpha_fit",
    "gromov_product",
    "hilbert_distance",
    "hilbert_distances",
    "holder_bound_check",
    "ideal_triangle_area",
    "ideal_triangle_area_detail",
    "ideal_triangle_from_points",
    "make_ideal_triangle",
    "normalize_many",
    "normalize_triangle_pointed",
    "point_at_distance",
    "point_to_segment_distance",
    "point_to_segment_distances",
    "power_cap_corner_bound",
    "qs_constant",
    "qsc_constant",
    "reevaluate_witness",
    "region_area",
    "regular_polygon",
    "run_suite",
    "sup_area_search",
    "triangle_thinness",
    "unit_ball_area",
    "unit_ball_areas",
    "unit_disk",
    "window_candidates",
]
