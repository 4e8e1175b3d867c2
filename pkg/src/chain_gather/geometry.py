"""Plane primitives: oriented vertex angles, circles, bisector points, arcs.

These are the scalar building blocks the movement rules consume.  Everything
here is a pure function of its arguments; comparison behaviour is controlled
by explicit epsilon parameters so that all callers share one tolerance
discipline (see :mod:`chain_gather.tolerances`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tolerances import EPS_ANG_DEFAULT, EPS_AREA_DEFAULT, EPS_LEN_DEFAULT


class GeometryError(Exception):
    """Base class for geometric precondition failures."""


class DegenerateVertex(GeometryError):
    """Angle apex coincides with one of its neighbours."""


class CollinearPoints(GeometryError):
    """Three points do not determine a circle."""


class EmptyInput(GeometryError):
    """An operation received no points."""


class NoSolution(GeometryError):
    """No point satisfies the requested distance constraints."""


class AmbiguousSide(GeometryError):
    """The reference point does not single out a side of a line."""


class PointOffCircle(GeometryError):
    """A point expected on a circle boundary is not on it."""


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __sub__(self, other: "Point2") -> "PlaneVector":
        return PlaneVector(self.x - other.x, self.y - other.y)

    def translated(self, v: "PlaneVector") -> "Point2":
        return Point2(self.x + v.dx, self.y + v.dy)


@dataclass(frozen=True)
class PlaneVector:
    dx: float
    dy: float

    def norm(self) -> float:
        return math.sqrt(self.dx * self.dx + self.dy * self.dy)

    def dot(self, other: "PlaneVector") -> float:
        return self.dx * other.dx + self.dy * other.dy

    def cross(self, other: "PlaneVector") -> float:
        return self.dx * other.dy - self.dy * other.dx

    def scaled(self, factor: float) -> "PlaneVector":
        return PlaneVector(self.dx * factor, self.dy * factor)

    def __neg__(self) -> "PlaneVector":
        return PlaneVector(-self.dx, -self.dy)


@dataclass(frozen=True)
class Circle:
    center: Point2
    radius: float


@dataclass(frozen=True)
class OrientedAngle:
    """An angle size in [0, pi] plus its orientation.

    ``turn`` is +1/-1 for the two winding directions and 0 when the three
    points are collinear within tolerance (size 0 or pi).
    """

    size: float
    turn: int


def distance(a: Point2, b: Point2) -> float:
    return (a - b).norm()


def angle_between(u: PlaneVector, v: PlaneVector) -> float:
    """Unsigned angle between two vectors, in [0, pi]."""
    return math.atan2(abs(u.cross(v)), u.dot(v))


def vertex_angle(
    prev: Point2,
    apex: Point2,
    next: Point2,
    eps_len: float = EPS_LEN_DEFAULT,
    eps_ang: float = EPS_ANG_DEFAULT,
) -> OrientedAngle:
    """Interior angle at ``apex`` between the rays toward its neighbours.

    The turn is the sign of the cross product of the incoming and outgoing
    chain vectors, zeroed when the normalised cross product is below
    ``eps_ang`` (straight or folded vertex).
    """
    a = prev - apex
    b = next - apex
    na = a.norm()
    nb = b.norm()
    if na <= eps_len or nb <= eps_len:
        raise DegenerateVertex("angle apex coincides with a neighbour")
    # cross of chain vectors u_in x u_out equals cross(-a, b) = -cross(a, b)
    cross = -a.cross(b)
    size = math.atan2(abs(cross), a.dot(b))
    if abs(cross) <= eps_ang * na * nb:
        turn = 0
    else:
        turn = 1 if cross > 0.0 else -1
    return OrientedAngle(size=size, turn=turn)


def circle_through(
    a: Point2,
    b: Point2,
    c: Point2,
    eps_area: float = EPS_AREA_DEFAULT,
) -> Circle:
    """Circle through three non-collinear points."""
    ab = b - a
    ac = c - a
    area2 = ab.cross(ac)
    if abs(area2) / 2.0 < eps_area:
        raise CollinearPoints("points are collinear within tolerance")
    # Intersection of perpendicular bisectors, relative to a.
    sq_ab = ab.dx * ab.dx + ab.dy * ab.dy
    sq_ac = ac.dx * ac.dx + ac.dy * ac.dy
    ux = (ac.dy * sq_ab - ab.dy * sq_ac) / (2.0 * area2)
    uy = (ab.dx * sq_ac - ac.dx * sq_ab) / (2.0 * area2)
    center = Point2(a.x + ux, a.y + uy)
    return Circle(center=center, radius=math.sqrt(ux * ux + uy * uy))


def _circle_two_points(a: Point2, b: Point2) -> Circle:
    center = Point2((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    return Circle(center, max(distance(center, a), distance(center, b)))


def _contains(c: Circle, p: Point2, eps_len: float) -> bool:
    return distance(c.center, p) <= c.radius + eps_len


def smallest_enclosing_circle(
    points: list[Point2],
    eps_len: float = EPS_LEN_DEFAULT,
) -> Circle:
    """Smallest circle containing all points (Welzl's move-to-front scheme).

    Deterministic: no shuffling.  Intended inputs are small (chain windows),
    where the worst case is irrelevant.
    """
    if not points:
        raise EmptyInput("smallest_enclosing_circle of no points")
    pts = list(points)
    c = Circle(pts[0], 0.0)
    for i, p in enumerate(pts):
        if _contains(c, p, eps_len):
            continue
        c = Circle(p, 0.0)
        for j, q in enumerate(pts[:i]):
            if _contains(c, q, eps_len):
                continue
            c = _circle_two_points(p, q)
            for r in pts[:j]:
                if _contains(c, r, eps_len):
                    continue
                try:
                    c = circle_through(p, q, r)
                except CollinearPoints:
                    # Furthest-apart pair of the collinear triple.
                    c = max(
                        (
                            _circle_two_points(p, q),
                            _circle_two_points(p, r),
                            _circle_two_points(q, r),
                        ),
                        key=lambda circ: circ.radius,
                    )
    return c


def equidistant_bisector_point(
    prev: Point2,
    self_pos: Point2,
    next: Point2,
    eps_len: float = EPS_LEN_DEFAULT,
) -> Point2:
    """Point at distance 1 from both neighbours, across the chord from self.

    Lies on the perpendicular bisector of ``prev``-``next`` on the opposite
    side of that chord from ``self_pos`` (the side the interior-angle
    bisector points to).  For a chord of length exactly 2 it degenerates to
    the chord midpoint.
    """
    chord_vec = next - prev
    chord = chord_vec.norm()
    if chord > 2.0 + eps_len:
        raise NoSolution(f"neighbour distance {chord} exceeds 2")
    mid = Point2((prev.x + next.x) / 2.0, (prev.y + next.y) / 2.0)
    if chord >= 2.0 - eps_len:
        return mid
    if chord <= eps_len:
        # prev == next: every direction is a bisector; away from self.
        away = mid - self_pos
        d = away.norm()
        if d <= eps_len:
            raise AmbiguousSide("self coincides with the coincident neighbours")
        return mid.translated(away.scaled(1.0 / d))
    # Which side of the chord line is self on?
    side = chord_vec.cross(self_pos - prev)
    if abs(side) / chord <= eps_len:
        raise AmbiguousSide("self lies on the line through its neighbours")
    normal = PlaneVector(-chord_vec.dy / chord, chord_vec.dx / chord)
    if side > 0.0:
        normal = -normal
    h = math.sqrt(max(0.0, 1.0 - (chord / 2.0) ** 2))
    return mid.translated(normal.scaled(h))


def rotate_about(center: Point2, p: Point2, angle: float) -> Point2:
    """Rotate ``p`` around ``center`` by a signed angle in radians."""
    ca = math.cos(angle)
    sa = math.sin(angle)
    vx = p.x - center.x
    vy = p.y - center.y
    return Point2(center.x + ca * vx - sa * vy, center.y + sa * vx + ca * vy)


def central_arc_angle(
    c: Circle,
    start: Point2,
    end: Point2,
    via_side: int,
    eps_len: float = EPS_LEN_DEFAULT,
) -> float:
    """Central angle of the arc from ``start`` to ``end``, in (0, 2*pi).

    ``via_side`` selects the traversal orientation: +1 counter-clockwise,
    -1 clockwise.  The two orientations sum to 2*pi.
    """
    for p in (start, end):
        if abs(distance(c.center, p) - c.radius) > max(eps_len, 1e-7 * c.radius):
            raise PointOffCircle(f"{p} is not on the circle boundary")
    theta_start = math.atan2(start.y - c.center.y, start.x - c.center.x)
    theta_end = math.atan2(end.y - c.center.y, end.x - c.center.x)
    ccw = (theta_end - theta_start) % (2.0 * math.pi)
    if via_side >= 0:
        return ccw if ccw > 0.0 else 2.0 * math.pi
    cw = 2.0 * math.pi - ccw
    return cw if cw > 0.0 else 2.0 * math.pi


def signed_central_angle(c: Circle, start: Point2, end: Point2) -> float:
    """Signed central angle from ``start`` to ``end`` in (-pi, pi]."""
    theta_start = math.atan2(start.y - c.center.y, start.x - c.center.x)
    theta_end = math.atan2(end.y - c.center.y, end.x - c.center.x)
    delta = (theta_end - theta_start) % (2.0 * math.pi)
    if delta > math.pi:
        delta -= 2.0 * math.pi
    return delta
