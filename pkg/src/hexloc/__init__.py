"""Mobile-anchor hexagonal path planning and range-free localization.

A deterministic simulator and analysis toolkit: beacon-point geometry,
the distributed stack-guided anchor protocol for connected networks, a
hexagon-tiling coverage planner for bounded rectangles, and closed-form
path-length comparisons against prior coverage schemes.
"""

from .geom import (Circle, Lrh, Point2D, circle_circle_intersections, dist,
                   lrh_from_vertex, point_in_hexagon, polyline_length)
from .localizer import (BeaconPoint, BeaconRecord, CandidatePair,
                        LocalizationParams, U_RATIO_SAFE,
                        U_RATIO_TWO_BEACON_EXACT, candidate_positions,
                        disambiguate, error_bound, extract_beacon_points)
from .planner import (CoverageReport, PathPlan, Rect, TilingPlan,
                      coverage_margin, d_hexagon_formula, plan_rect_path,
                      verify_coverage)
from .protocol import (LocalizationResult, Network, build_network,
                       bootstrap_localize, path_length_bound,
                       run_localization, select_next_destination)
from .comparators import (SchemeParams, d_chia_ho_ou, d_circles, d_doublescan,
                          d_hilbert, d_s_curves, d_scan, leading_coefficients)

__all__ = [
    "Circle", "Lrh", "Point2D", "circle_circle_intersections", "dist",
    "lrh_from_vertex", "point_in_hexagon", "polyline_length",
    "BeaconPoint", "BeaconRecord", "CandidatePair", "LocalizationParams",
    "U_RATIO_SAFE", "U_RATIO_TWO_BEACON_EXACT", "candidate_positions",
    "disambiguate", "error_bound", "extract_beacon_points",
    "CoverageReport", "PathPlan", "Rect", "TilingPlan", "coverage_margin",
    "d_hexagon_formula", "plan_rect_path", "verify_coverage",
    "LocalizationResult", "Network", "build_network", "bootstrap_localize",
    "path_length_bound", "run_localization", "select_next_destination",
    "SchemeParams", "d_chia_ho_ou", "d_circles", "d_doublescan", "d_hilbert",
    "d_s_curves", "d_scan", "leading_coefficients",
]

__version__ = "0.1.0"
