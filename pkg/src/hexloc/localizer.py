"""Range-free localization from beacon points.

A mobile anchor broadcasts its position every `u` metres while moving.  A
sensor marks a received broadcast as a *beacon point* when it is bordered
by a silence gap longer than the waiting time t0 on at least one side;
such positions approximate where the anchor crossed the sensor's
communication circle, so they lie between r-u and r from the sensor.

Two beacon points constrain the sensor to the intersection of two annuli
(inner radius r-u, outer radius r).  That intersection has two symmetric
components, one on each side of the line through the beacon points; the
candidate position on each side is the intersection of the vertical
extent NN' of the component with the horizontal chord TT'.  A hexagon
broadcast schedule (or a third beacon point) picks the correct side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .geom import Lrh, Point2D, dist

# Largest u/r for which the two-beacon-point guarantee of a full hexagon
# traversal holds exactly: sqrt(3)*((sqrt(13)-1)/4 - u/r) >= 1 - u/r.
U_RATIO_TWO_BEACON_EXACT = (math.sqrt(3) * (math.sqrt(13) - 1) - 4) / (4 * (math.sqrt(3) - 1))

# Safe ratio under which the worst-case estimate error stays below r/2.
U_RATIO_SAFE = 1.0 / 7.5

# u/r at which the chord TT' subtends a right angle at a beacon point for
# the shortest admissible pair distance; below it TT' < r.
U_RATIO_TT_RIGHT_ANGLE = (math.sqrt(2) - 1) / math.sqrt(2)

# Positions are quantized to this grid (metres) when compared as sets.
POSITION_QUANTUM = 1e-6


@dataclass(frozen=True)
class LocalizationParams:
    """Scheme parameters: range r, beacon distance u, timing t and t0.

    The anchor is modelled at 1 m/s, so the broadcast period t defaults to
    u seconds and the waiting time t0 to 1.5*t (any value in (t, 2t) works).
    """

    r: float
    u: float
    t: float = None  # type: ignore[assignment]
    t0: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("communication range must be positive")
        if not (0 < self.u < self.r):
            raise ValueError("beacon distance must satisfy 0 < u < r")
        if self.t is None:
            object.__setattr__(self, "t", self.u)
        if self.t0 is None:
            object.__setattr__(self, "t0", 1.5 * self.t)
        if not self.t > 0:
            raise ValueError("broadcast period must be positive")
        if not (self.t < self.t0 < 2 * self.t):
            raise ValueError("waiting time must satisfy t < t0 < 2t")


@dataclass(frozen=True)
class BeaconRecord:
    """One broadcast as heard by a sensor."""

    time: float
    anchor_position: Point2D
    lrh: Optional[Lrh] = None

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("record time must be non-negative")


@dataclass(frozen=True)
class BeaconPoint:
    position: Point2D
    time: float
    kind: str  # "gap-before" | "gap-after"


@dataclass(frozen=True)
class CandidatePair:
    """The two mirror-image position estimates from one beacon-point pair."""

    q: Point2D
    q_mirror: Point2D
    nn_length: float
    tt_length: float


def extract_beacon_points(log: list[BeaconRecord],
                          params: LocalizationParams) -> list[BeaconPoint]:
    """Return the records bordered by a silence gap of more than t0.

    A record at time x qualifies when no other record falls in [x-t0, x)
    or in (x, x+t0]; the first and last records of a non-empty log always
    qualify through their open-ended side.  The log must be sorted with
    strictly increasing times.
    """
    for a, b in zip(log, log[1:]):
        if b.time <= a.time:
            raise ValueError("unsorted beacon log")
    t0 = params.t0
    points: list[BeaconPoint] = []
    for i, rec in enumerate(log):
        gap_before = i == 0 or rec.time - log[i - 1].time > t0
        gap_after = i == len(log) - 1 or log[i + 1].time - rec.time > t0
        if gap_before:
            points.append(BeaconPoint(rec.anchor_position, rec.time, "gap-before"))
        elif gap_after:
            points.append(BeaconPoint(rec.anchor_position, rec.time, "gap-after"))
    return points


def _construction(r: float, u: float, l: float) -> tuple[float, float, float]:
    """Shared annulus-intersection construction.

    Returns (per-side candidate height above the pair line, NN' length,
    TT' length) for pair distance l.  The candidate sits on the
    perpendicular bisector at the height of the chord TT'; once the outer
    and inner circles of opposite beacon points stop intersecting
    (l > 2r-u) the chord degenerates to the lens width on the line itself
    and the candidate drops to the midpoint, continuously.
    """
    half = l / 2.0
    h_out_sq = r * r - half * half
    h_out = math.sqrt(h_out_sq) if h_out_sq > 0 else 0.0
    # Foot of T (outer circle around c1, inner around c2) measured from c1.
    x_t = (u * (2.0 * r - u) + l * l) / (2.0 * l)
    if x_t <= r:
        y_q = math.sqrt(r * r - x_t * x_t)
        tt = 2.0 * x_t - l
    else:
        y_q = 0.0
        tt = 2.0 * r - l
    if l < 2.0 * (r - u):
        h_in = math.sqrt((r - u) ** 2 - half * half)
        nn = h_out - h_in
    else:
        nn = 2.0 * h_out
    return y_q, nn, tt


def candidate_positions(c1: Point2D, c2: Point2D,
                        params: LocalizationParams) -> CandidatePair:
    """Estimate the two possible sensor positions from two beacon points.

    Requires 0 < |c1 c2| <= 2r (the annuli must intersect); raises
    ValueError("no valid intersection") otherwise.
    """
    r, u = params.r, params.u
    l = dist(c1, c2)
    if l <= 0.0 or l > 2.0 * r * (1.0 + 1e-12):
        raise ValueError("no valid intersection")
    l = min(l, 2.0 * r)
    y_q, nn, tt = _construction(r, u, l)
    mx, my = (c1.x + c2.x) / 2.0, (c1.y + c2.y) / 2.0
    # Unit normal to the pair line (left of c1->c2).
    nx, ny = -(c2.y - c1.y) / l, (c2.x - c1.x) / l
    q = Point2D(mx + nx * y_q, my + ny * y_q)
    q_mirror = Point2D(mx - nx * y_q, my - ny * y_q)
    return CandidatePair(q=q, q_mirror=q_mirror, nn_length=nn, tt_length=tt)


def error_bound(l: float, params: LocalizationParams) -> float:
    """Worst-case estimate error max(NN'/2, TT'/2) for pair distance l.

    Valid for r-u <= l <= 2r; raises ValueError("out of theorem range")
    outside.  For u < r/7.5 the returned bound is below r/2.
    """
    r, u = params.r, params.u
    if l < (r - u) * (1.0 - 1e-12) or l > 2.0 * r * (1.0 + 1e-12):
        raise ValueError("out of theorem range")
    l = min(max(l, r - u), 2.0 * r)
    _, nn, tt = _construction(r, u, l)
    return max(nn / 2.0, tt / 2.0)


def quantize(p: Point2D, quantum: float = POSITION_QUANTUM) -> tuple[int, int]:
    """Grid key for comparing broadcast positions as set elements."""
    return (round(p.x / quantum), round(p.y / quantum))


def expected_hearing_set(candidate: Point2D, schedule: Iterable[Point2D],
                         r: float) -> set[tuple[int, int]]:
    """Schedule positions a sensor at `candidate` would have heard."""
    return {quantize(s) for s in schedule if dist(candidate, s) <= r}


def disambiguate(pair: CandidatePair, received_positions: set[Point2D],
                 lrh: Lrh, full_schedule: list[Point2D], r: float) -> Point2D:
    """Pick the candidate whose expected hearing set equals the received one.

    `full_schedule` is every broadcast position of the hexagon traversal
    (spacing u, all six vertices included) and `received_positions` the
    subset the sensor actually heard.  Exactly one candidate must match;
    two matches raise ValueError("ambiguous position") and zero matches
    ValueError("inconsistent observation").  Coincident candidates (the
    pair distance was ~2r) are returned directly.
    """
    if dist(pair.q, pair.q_mirror) <= POSITION_QUANTUM:
        return pair.q
    received = {quantize(p) for p in received_positions}
    match_q = expected_hearing_set(pair.q, full_schedule, r) == received
    match_m = expected_hearing_set(pair.q_mirror, full_schedule, r) == received
    if match_q and match_m:
        raise ValueError("ambiguous position")
    if match_q:
        return pair.q
    if match_m:
        return pair.q_mirror
    raise ValueError("inconsistent observation")


def best_schedule_match(pair: CandidatePair, received_positions: set[Point2D],
                        full_schedule: list[Point2D], r: float,
                        center: Point2D) -> Point2D:
    """Robust side selection used inside simulations.

    The estimate differs slightly from the true position, so schedule
    points lying near distance r can flip in or out of the expected set;
    exact set equality would then reject the true side.  Instead the
    candidate with the smaller symmetric difference wins, with distance to
    the traversal center (then the left-side candidate) as tie-breakers.
    """
    if dist(pair.q, pair.q_mirror) <= POSITION_QUANTUM:
        return pair.q
    received = {quantize(p) for p in received_positions}
    score_q = len(expected_hearing_set(pair.q, full_schedule, r) ^ received)
    score_m = len(expected_hearing_set(pair.q_mirror, full_schedule, r) ^ received)
    if score_q != score_m:
        return pair.q if score_q < score_m else pair.q_mirror
    if dist(pair.q, center) <= dist(pair.q_mirror, center):
        return pair.q
    return pair.q_mirror


def largest_pair(points: list[BeaconPoint]) -> tuple[BeaconPoint, BeaconPoint, float]:
    """The beacon-point pair with the largest separation (deterministic).

    Ties resolve to the earliest pair by record times.  Needs at least two
    points.
    """
    if len(points) < 2:
        raise ValueError("need at least two beacon points")
    best = None
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            l = dist(points[i].position, points[j].position)
            key = (-l, points[i].time, points[j].time)
            if best is None or key < best[0]:
                best = (key, points[i], points[j], l)
    return best[1], best[2], best[3]
