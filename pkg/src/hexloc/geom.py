"""Planar geometry primitives: points, circles, regular hexagons.

Everything here is exact-ish float geometry with a single relative
tolerance (REL_TOL) used for degeneracy and tangency decisions.  All
functions are pure and operate on immutable values, so they are safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance for float comparisons at metre scale (~10-200 m).
REL_TOL = 1e-9


@dataclass(frozen=True)
class Point2D:
    """A position in the plane, in metres."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("point coordinates must be finite")


def dist(a: Point2D, b: Point2D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def midpoint(a: Point2D, b: Point2D) -> Point2D:
    return Point2D((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)


def rotate_about(p: Point2D, center: Point2D, angle: float) -> Point2D:
    """Rotate p counter-clockwise about center by `angle` radians."""
    dx, dy = p.x - center.x, p.y - center.y
    c, s = math.cos(angle), math.sin(angle)
    return Point2D(center.x + c * dx - s * dy, center.y + s * dx + c * dy)


@dataclass(frozen=True)
class Circle:
    center: Point2D
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True)
class Lrh:
    """Largest regular hexagon inscribed in a communication circle.

    Six vertices in counter-clockwise order, each at `circumradius` from
    `center`.  The side length of such a hexagon equals its circumradius.
    """

    center: Point2D
    circumradius: float
    vertices: tuple[Point2D, ...]


def lrh_from_vertex(center: Point2D, vertex_on_circle: Point2D) -> Lrh:
    """Build the inscribed regular hexagon whose first vertex is given.

    The circumradius is the center-to-vertex distance; the remaining five
    vertices follow by successive 60-degree counter-clockwise rotations.
    Raises ValueError("degenerate hexagon") when the vertex coincides with
    the center.
    """
    radius = dist(center, vertex_on_circle)
    if radius <= 0.0:
        raise ValueError("degenerate hexagon")
    verts = [vertex_on_circle]
    for k in range(1, 6):
        verts.append(rotate_about(vertex_on_circle, center, k * math.pi / 3.0))
    return Lrh(center=center, circumradius=radius, vertices=tuple(verts))


def circle_circle_intersections(a: Circle, b: Circle) -> list[Point2D]:
    """Intersection points of two circles: 0, 1 (tangent) or 2 points.

    Two points come back ordered larger-y first (ties: larger x).  Tangency
    is decided within REL_TOL of the radii sum / difference so downstream
    callers see exactly one point there.  Identical circles raise
    ValueError("coincident circles").
    """
    d = dist(a.center, b.center)
    scale = max(a.radius, b.radius, d)
    tol = REL_TOL * scale
    if d <= tol and abs(a.radius - b.radius) <= tol:
        raise ValueError("coincident circles")
    if d > a.radius + b.radius + tol or d < abs(a.radius - b.radius) - tol:
        return []

    ux, uy = (b.center.x - a.center.x) / d, (b.center.y - a.center.y) / d
    # Distance from a.center to the chord foot along the center line.
    along = (a.radius ** 2 - b.radius ** 2 + d * d) / (2.0 * d)
    foot = Point2D(a.center.x + along * ux, a.center.y + along * uy)
    h_sq = a.radius ** 2 - along ** 2

    tangent = (abs(d - (a.radius + b.radius)) <= tol
               or abs(d - abs(a.radius - b.radius)) <= tol)
    if tangent or h_sq <= 0.0:
        return [foot]

    h = math.sqrt(h_sq)
    p1 = Point2D(foot.x - h * uy, foot.y + h * ux)
    p2 = Point2D(foot.x + h * uy, foot.y - h * ux)
    if (p1.y, p1.x) < (p2.y, p2.x):
        p1, p2 = p2, p1
    return [p1, p2]


def point_in_hexagon(p: Point2D, h: Lrh) -> bool:
    """True iff p lies inside or on the boundary of the hexagon."""
    tol = REL_TOL * h.circumradius
    verts = h.vertices
    for i in range(6):
        a, b = verts[i], verts[(i + 1) % 6]
        cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
        if cross < -tol * h.circumradius:
            return False
    return True


def polyline_length(points: list[Point2D]) -> float:
    """Total Euclidean length of an ordered polyline (0 for one point)."""
    if not points:
        raise ValueError("polyline needs at least one point")
    total = 0.0
    for a, b in zip(points, points[1:]):
        total += dist(a, b)
    return total


def closest_point_on_circle(c: Circle, p: Point2D) -> Point2D:
    """Radial projection of p onto the circle.

    When p coincides with the center the projection is taken along +x so
    the result stays deterministic.
    """
    d = dist(c.center, p)
    if d <= REL_TOL * c.radius:
        return Point2D(c.center.x + c.radius, c.center.y)
    f = c.radius / d
    return Point2D(c.center.x + (p.x - c.center.x) * f,
                   c.center.y + (p.y - c.center.y) * f)


def point_along(a: Point2D, b: Point2D, distance: float) -> Point2D:
    """Point at `distance` from a toward b (a and b must differ)."""
    d = dist(a, b)
    if d == 0.0:
        raise ValueError("direction undefined for coincident points")
    f = distance / d
    return Point2D(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)


def hexagon_perimeter_point(h: Lrh, arc: float) -> Point2D:
    """Position after travelling `arc` metres along the hexagon boundary.

    Travel starts at vertices[0] and proceeds counter-clockwise; `arc` may
    equal the full perimeter (returning the start vertex).
    """
    side = h.circumradius
    perimeter = 6.0 * side
    if arc < -REL_TOL * side or arc > perimeter * (1.0 + REL_TOL):
        raise ValueError("arc outside hexagon perimeter")
    arc = min(max(arc, 0.0), perimeter)
    k = min(int(arc // side), 5)
    rem = arc - k * side
    a, b = h.vertices[k], h.vertices[(k + 1) % 6]
    f = rem / side
    return Point2D(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
