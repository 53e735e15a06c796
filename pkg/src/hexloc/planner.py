"""Coverage path planning for a bounded rectangle.

The anchor drives the perimeters of regular hexagons of side r laid out on
a staggered grid.  One full perimeter of broadcasts guarantees two beacon
points to every sensor inside the concentric *coverage hexagon* of side
2r - X, where the margin X shrinks the ideal 2r hexagon just enough that
a sensor at a coverage-hexagon vertex still hears two broadcasts exactly
r away.  Rows of coverage hexagons are vertex-up, horizontally pitched
sqrt(3)*(2r-X), vertically pitched 1.5*(2r-X), with alternate rows offset
half a pitch.

The nominal hexagon counts ceil(L / (sqrt(3)(2r-X))) per row and
ceil(2L / (3(2r-X))) rows drive the closed-form length estimate; the
generated grid additionally extends offset rows by one hexagon and adds a
final row when those ceilings fall short of sealing the boundary, so the
generated plan always covers the full rectangle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geom import (Lrh, Point2D, dist, hexagon_perimeter_point,
                   lrh_from_vertex, polyline_length)
from .localizer import (LocalizationParams, best_schedule_match,
                        candidate_positions, largest_pair, BeaconPoint)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; origin is the lower-left corner."""

    width: float
    height: float
    origin: Point2D = Point2D(0.0, 0.0)

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("rectangle sides must be positive")


@dataclass(frozen=True)
class TilingPlan:
    """Staggered hexagon grid over a rectangle.

    `hexes_per_row` and `row_count` are the nominal ceiling counts used by
    the closed-form length estimate; `row_lengths` holds the actual number
    of hexagons laid per row (offset rows may carry one extra, and one
    extra row may follow the nominal ones, both only when needed to seal
    the rectangle boundary).
    """

    hex_centers: tuple[Point2D, ...]
    hexes_per_row: int
    row_count: int
    side: float           # traversed hexagon side (= r)
    coverage_side: float  # coverage hexagon side (= 2r - X)
    row_lengths: tuple[int, ...]


@dataclass(frozen=True)
class PlannedTraversal:
    """One full hexagon perimeter with its broadcast schedule."""

    lrh: Lrh
    entry_time: float
    beacon_spacing: float

    @property
    def arc_count(self) -> int:
        # Broadcasts at arcs 0, u, ..., 6r inclusive (last closes the loop).
        return round(6.0 * self.lrh.circumradius / self.beacon_spacing) + 1

    def arc_positions(self) -> list[Point2D]:
        u = self.beacon_spacing
        return [hexagon_perimeter_point(self.lrh, k * u) for k in range(self.arc_count)]

    def schedule(self) -> list[Point2D]:
        """Unique broadcast positions (the closing broadcast repeats arc 0)."""
        return self.arc_positions()[:-1]


@dataclass(frozen=True)
class PathPlan:
    waypoints: tuple[Point2D, ...]
    beacon_spacing: float
    total_length: float
    traversals: tuple[PlannedTraversal, ...] = field(default=())


@dataclass
class CoverageReport:
    worst_error: float
    uncovered: list[Point2D]
    min_pair_distance: float
    localized_count: int = 0
    sensor_count: int = 0


def coverage_margin(r: float, u: float) -> float:
    """Margin X = r + u/2 - sqrt(4r^2 - 3u^2)/2, always in (0, u).

    Shrinking the 2r coverage hexagon by X guarantees a sensor at a
    coverage vertex hears two broadcasts u apart on the traversed side.
    """
    if not (0 < u < r):
        raise ValueError("need 0 < u < r")
    return r + u / 2.0 - math.sqrt(4.0 * r * r - 3.0 * u * u) / 2.0


def d_hexagon_formula(L: float, r: float, X: float) -> float:
    """Closed-form length estimate for covering an L x L square."""
    if not (L > 0 and r > 0 and X > 0):
        raise ValueError("L, r, X must be positive")
    if not X < 2 * r:
        raise ValueError("margin must be below 2r")
    s = 2.0 * r - X
    per_row = math.ceil(L / (SQRT3 * s))
    rows = math.ceil(2.0 * L / (3.0 * s))
    return per_row * rows * 6.0 * r + L * rows + 3.0 * r * rows + L


def _hex_vertices_up(center: Point2D, side: float) -> list[Point2D]:
    """Vertex-up hexagon corners, counter-clockwise from the top vertex."""
    return [Point2D(center.x + side * math.cos(math.radians(90 + 60 * k)),
                    center.y + side * math.sin(math.radians(90 + 60 * k)))
            for k in range(6)]


def coverage_hexagon(center: Point2D, coverage_side: float) -> Lrh:
    return lrh_from_vertex(center, Point2D(center.x, center.y + coverage_side))


def build_tiling(region: Rect, r: float, X: float) -> TilingPlan:
    """Lay out hexagon centers so coverage hexagons seal the rectangle.

    The bottom row is centered on the rectangle's lower edge so boundary
    points cut hexagons through their wide mid-band; a coverage hexagon is
    weakest at its corners, and this placement keeps every corner either
    outside the rectangle or flanked by the neighboring hexagons whose
    pooled broadcasts localize it.
    """
    s = 2.0 * r - X
    if s <= 0:
        raise ValueError("margin must be below 2r")
    pitch = SQRT3 * s
    half = pitch / 2.0
    n_even = math.ceil(region.width / pitch)
    n_odd = math.ceil(max(region.width - half, 0.0) / pitch) + 1
    rows_nominal = math.ceil(2.0 * region.height / (3.0 * s))
    rows_actual = max(1, math.ceil((region.height - s / 2.0) / (1.5 * s)) + 1)

    centers: list[Point2D] = []
    row_lengths: list[int] = []
    oy = region.origin.y
    ox = region.origin.x
    for j in range(rows_actual):
        y = oy + 1.5 * s * j
        if j % 2 == 0:
            count, x0 = n_even, ox + half
        else:
            count, x0 = n_odd, ox
        row_lengths.append(count)
        for i in range(count):
            centers.append(Point2D(x0 + pitch * i, y))
    return TilingPlan(hex_centers=tuple(centers), hexes_per_row=n_even,
                      row_count=rows_nominal, side=r, coverage_side=s,
                      row_lengths=tuple(row_lengths))


def plan_rect_path(region: Rect, r: float, X: float, u: float) -> PathPlan:
    """Serpentine route over the tiling, one full perimeter per hexagon.

    The anchor starts at the rectangle origin, enters each hexagon at the
    grid vertex nearest its current position, walks the perimeter
    counter-clockwise broadcasting every u metres, and moves between
    hexagons on straight silent segments.  Requires X at least the
    coverage margin and u dividing r so broadcasts land on every vertex.
    """
    margin = coverage_margin(r, u)
    if X < margin * (1.0 - 1e-12):
        raise ValueError("margin below coverage requirement")
    k = r / u
    if abs(k - round(k)) > 1e-9 * k or round(k) < 1:
        raise ValueError("beacon distance must divide the side length")

    tiling = build_tiling(region, r, X)
    rows: list[list[Point2D]] = []
    idx = 0
    for count in tiling.row_lengths:
        rows.append(list(tiling.hex_centers[idx:idx + count]))
        idx += count

    start = region.origin
    waypoints: list[Point2D] = [start]
    traversals: list[PlannedTraversal] = []
    pos = start
    clock = 0.0  # anchor moves at 1 m/s; transits are silent
    for j, row in enumerate(rows):
        ordered = row if j % 2 == 0 else list(reversed(row))
        for center in ordered:
            verts = _hex_vertices_up(center, r)
            entry = min(range(6), key=lambda i: (dist(verts[i], pos), i))
            loop = verts[entry:] + verts[:entry]
            clock += dist(pos, loop[0])
            traversals.append(PlannedTraversal(
                lrh=Lrh(center=center, circumradius=r, vertices=tuple(loop)),
                entry_time=clock, beacon_spacing=u))
            waypoints.extend(loop)
            waypoints.append(loop[0])  # close the perimeter
            clock += 6.0 * r
            pos = loop[0]
    total = polyline_length(waypoints)
    return PathPlan(waypoints=tuple(waypoints), beacon_spacing=u,
                    total_length=total, traversals=tuple(traversals))


@dataclass
class SensorOutcome:
    position: Point2D
    estimate: Optional[Point2D]
    error: float
    pair_distance: float
    beacon_point_count: int
    reason: str = ""


def simulate_plan_reception(plan: PathPlan, positions: list[Point2D],
                            params: LocalizationParams) -> list[SensorOutcome]:
    """Run the localization pipeline for static sensors under a plan.

    For each sensor and each traversal it can hear, beacon points are the
    heard broadcasts flanking silence gaps; the first and the closing
    broadcast of a traversal are start/stop artifacts without boundary
    meaning and are never used as beacon points.  A sensor deep inside one
    coverage hexagon gets a wide pair from that traversal alone, but near
    coverage boundaries the in-traversal chords shrink, so the pipeline
    pools beacon points across traversals: every flank lies between r-u
    and r of the sensor, hence any pool pair supports the annulus
    construction.  The widest pair (needs separation of at least r - u)
    localizes; the mirror ambiguity is resolved against the broadcast
    schedules of every hexagon near either candidate.
    """
    r, u = params.r, params.u
    pts = np.array([[p.x, p.y] for p in positions], dtype=float)
    n = len(positions)
    sensor_bps: list[list[BeaconPoint]] = [[] for _ in range(n)]
    sensor_received: list[set] = [set() for _ in range(n)]

    trav_arcs = [t.arc_positions() for t in plan.traversals]
    for trav, arcs in zip(plan.traversals, trav_arcs):
        arr = np.array([[p.x, p.y] for p in arcs], dtype=float)
        center = trav.lrh.center
        near = np.flatnonzero(
            np.hypot(pts[:, 0] - center.x, pts[:, 1] - center.y) <= 2.0 * r + u)
        if near.size == 0:
            continue
        d = np.hypot(pts[near, 0, None] - arr[None, :, 0],
                     pts[near, 1, None] - arr[None, :, 1])
        heard = d <= r
        last_arc = len(arcs) - 1
        for row, sensor_idx in enumerate(near):
            idxs = np.flatnonzero(heard[row])
            if idxs.size == 0:
                continue
            sensor_received[sensor_idx].update(arcs[i] for i in idxs)
            for pos_in_list, arc_idx in enumerate(idxs):
                gap_before = pos_in_list == 0 or arc_idx - idxs[pos_in_list - 1] >= 2
                gap_after = (pos_in_list == idxs.size - 1
                             or idxs[pos_in_list + 1] - arc_idx >= 2)
                # The first and closing broadcasts mark where the anchor
                # started and stopped, not a boundary crossing; they count
                # only when the neighbouring broadcast u away was missed,
                # which pins the sensor to the r-u..r annulus anyway.
                if arc_idx == 0:
                    gap_before, ok = False, gap_after
                elif arc_idx == last_arc:
                    gap_after, ok = False, gap_before
                else:
                    ok = gap_before or gap_after
                if ok:
                    t = trav.entry_time + arc_idx * u
                    kind = "gap-before" if gap_before else "gap-after"
                    sensor_bps[sensor_idx].append(BeaconPoint(arcs[arc_idx], t, kind))

    centers = np.array([[t.lrh.center.x, t.lrh.center.y]
                        for t in plan.traversals], dtype=float)
    outcomes: list[SensorOutcome] = []
    for i, p in enumerate(positions):
        bps = sensor_bps[i]
        if len(bps) < 2:
            outcomes.append(SensorOutcome(p, None, math.nan, -1.0, len(bps),
                                          "fewer than two beacon points"))
            continue
        c1, c2, l = largest_pair(bps)
        pair = candidate_positions(c1.position, c2.position, params)
        # The estimate is only trusted while its own uncertainty stays
        # below r/2; narrow pairs blow up the along-line extent TT'.
        if max(pair.nn_length, pair.tt_length) / 2.0 >= r / 2.0:
            outcomes.append(SensorOutcome(p, None, math.nan, l, len(bps),
                                          "beacon points too close"))
            continue
        # Schedules of every hexagon either candidate could hear.
        reach = 2.0 * r + u
        schedule: list[Point2D] = []
        for t_idx, trav in enumerate(plan.traversals):
            cx, cy = centers[t_idx]
            if (math.hypot(pair.q.x - cx, pair.q.y - cy) <= reach
                    or math.hypot(pair.q_mirror.x - cx, pair.q_mirror.y - cy) <= reach):
                schedule.extend(trav_arcs[t_idx][:-1])
        heard = sensor_received[i]
        hub = Point2D(sum(q.x for q in heard) / len(heard),
                      sum(q.y for q in heard) / len(heard))
        est = best_schedule_match(pair, heard, schedule, r, hub)
        outcomes.append(SensorOutcome(p, est, dist(est, p), l, len(bps)))
    return outcomes


def verify_coverage(plan: PathPlan, region: Rect, params: LocalizationParams,
                    grid_step: float) -> CoverageReport:
    """Exhaustive grid audit of a plan: worst error and any uncovered points."""
    if not grid_step > 0:
        raise ValueError("grid step must be positive")
    xs: list[float] = []
    v = 0.0
    while v <= region.width * (1 + 1e-12):
        xs.append(v)
        v += grid_step
    ys: list[float] = []
    v = 0.0
    while v <= region.height * (1 + 1e-12):
        ys.append(v)
        v += grid_step
    grid = [Point2D(region.origin.x + x, region.origin.y + y) for y in ys for x in xs]

    outcomes = simulate_plan_reception(plan, grid, params)
    uncovered = [o.position for o in outcomes if o.estimate is None]
    errors = [o.error for o in outcomes if o.estimate is not None]
    pair_ls = [o.pair_distance for o in outcomes if o.estimate is not None]
    return CoverageReport(
        worst_error=max(errors) if errors else math.nan,
        uncovered=uncovered,
        min_pair_distance=min(pair_ls) if pair_ls else math.nan,
        localized_count=len(errors),
        sensor_count=len(grid),
    )


def plan_to_csv(plan: PathPlan) -> str:
    """Waypoint export: one row per path point with a beacon/transit flag."""
    lines = ["x,y,flag"]
    lines.append(f"{plan.waypoints[0].x!r},{plan.waypoints[0].y!r},transit")
    for trav in plan.traversals:
        for p in trav.arc_positions():
            lines.append(f"{p.x!r},{p.y!r},beacon")
    return "\n".join(lines) + "\n"


def report_to_json(report: CoverageReport) -> str:
    return json.dumps({
        "worst_error": report.worst_error,
        "uncovered": [[p.x, p.y] for p in report.uncovered],
        "min_pair_distance": report.min_pair_distance,
        "localized_count": report.localized_count,
        "sensor_count": report.sensor_count,
    }, indent=2)
