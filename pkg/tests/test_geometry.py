"""Geometry primitives: frozen examples plus brute-force oracles."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from chain_gather.geometry import (
    AmbiguousSide,
    CollinearPoints,
    DegenerateVertex,
    EmptyInput,
    NoSolution,
    Point2,
    PointOffCircle,
    central_arc_angle,
    circle_through,
    distance,
    equidistant_bisector_point,
    rotate_about,
    smallest_enclosing_circle,
    vertex_angle,
    Circle,
)

coords = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


def brute_force_sec(points: list[Point2], eps: float = 1e-9) -> Circle:
    """O(n^4) oracle: best circle over all 1-, 2- and 3-point supports."""
    best: Circle | None = None
    n = len(points)
    candidates: list[Circle] = [Circle(points[0], 0.0)] if n == 1 else []
    for i in range(n):
        for j in range(i + 1, n):
            c = Point2(
                (points[i].x + points[j].x) / 2.0, (points[i].y + points[j].y) / 2.0
            )
            candidates.append(Circle(c, distance(c, points[i])))
            for k in range(j + 1, n):
                try:
                    candidates.append(circle_through(points[i], points[j], points[k]))
                except CollinearPoints:
                    pass
    for cand in candidates:
        if all(distance(cand.center, p) <= cand.radius + eps for p in points):
            if best is None or cand.radius < best.radius:
                best = cand
    assert best is not None
    return best


class TestVertexAngle:
    def test_collinear_straight(self):
        oa = vertex_angle(Point2(0, 0), Point2(1, 0), Point2(2, 0))
        assert oa.size == pytest.approx(math.pi)
        assert oa.turn == 0

    def test_right_turn(self):
        oa = vertex_angle(Point2(0, 0), Point2(1, 0), Point2(1, 1))
        assert oa.size == pytest.approx(math.pi / 2)
        assert oa.turn == 1

    def test_sharp_spike(self):
        # oracle: explicit atan2 of the two rays
        prev, apex, nxt = Point2(0, 0), Point2(1, 0), Point2(0, 0.001)
        a = (prev.x - apex.x, prev.y - apex.y)
        b = (nxt.x - apex.x, nxt.y - apex.y)
        expected = math.atan2(
            abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1]
        )
        oa = vertex_angle(prev, apex, nxt)
        assert oa.size == pytest.approx(expected, abs=1e-15)
        assert oa.size == pytest.approx(0.001, abs=1e-5)
        assert oa.turn == 1

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateVertex):
            vertex_angle(Point2(1, 0), Point2(1, 0), Point2(2, 0))

    @given(
        px=coords, py=coords, ax=coords, ay=coords, nx=coords, ny=coords,
        angle=st.floats(0, 2 * math.pi), tx=coords, ty=coords,
    )
    @settings(max_examples=200)
    def test_rigid_motion_invariance(self, px, py, ax, ay, nx, ny, angle, tx, ty):
        prev, apex, nxt = Point2(px, py), Point2(ax, ay), Point2(nx, ny)
        if distance(prev, apex) < 1e-3 or distance(nxt, apex) < 1e-3:
            return
        oa = vertex_angle(prev, apex, nxt)
        moved = []
        for p in (prev, apex, nxt):
            q = rotate_about(Point2(0, 0), p, angle)
            moved.append(Point2(q.x + tx, q.y + ty))
        ob = vertex_angle(*moved)
        assert ob.size == pytest.approx(oa.size, abs=1e-9)
        assert ob.turn == oa.turn

    def test_mirror_negates_turn(self):
        prev, apex, nxt = Point2(0.3, 1.2), Point2(1, 0), Point2(2, 0.7)
        oa = vertex_angle(prev, apex, nxt)
        mirrored = [Point2(p.x, -p.y) for p in (prev, apex, nxt)]
        ob = vertex_angle(*mirrored)
        assert ob.size == pytest.approx(oa.size, abs=1e-12)
        assert ob.turn == -oa.turn


class TestCircleThrough:
    def test_unit_circle(self):
        c = circle_through(Point2(1, 0), Point2(0, 1), Point2(-1, 0))
        assert c.center.x == pytest.approx(0, abs=1e-12)
        assert c.center.y == pytest.approx(0, abs=1e-12)
        assert c.radius == pytest.approx(1, abs=1e-12)

    def test_bisector_intersection_oracle(self):
        # perpendicular bisectors of (0,0)-(2,0) and (0,0)-(1,1) meet at (1,0)
        c = circle_through(Point2(0, 0), Point2(2, 0), Point2(1, 1))
        assert (c.center.x, c.center.y) == pytest.approx((1.0, 0.0), abs=1e-12)
        assert c.radius == pytest.approx(1.0, abs=1e-12)

    def test_collinear_raises(self):
        with pytest.raises(CollinearPoints):
            circle_through(Point2(0, 0), Point2(1, 0), Point2(2, 0))

    @given(
        ax=coords, ay=coords, bx=coords, by=coords, cx=coords, cy=coords
    )
    @settings(max_examples=200)
    def test_round_trip(self, ax, ay, bx, by, cx, cy):
        a, b, c = Point2(ax, ay), Point2(bx, by), Point2(cx, cy)
        try:
            circ = circle_through(a, b, c, eps_area=1e-6)
        except CollinearPoints:
            return
        for p in (a, b, c):
            assert distance(circ.center, p) == pytest.approx(
                circ.radius, abs=1e-6 * max(1.0, circ.radius)
            )


class TestSmallestEnclosingCircle:
    def test_single_point(self):
        c = smallest_enclosing_circle([Point2(0, 0)])
        assert c.radius == 0.0

    def test_two_point_diameter(self):
        c = smallest_enclosing_circle([Point2(0, 0), Point2(2, 0)])
        assert (c.center.x, c.center.y) == pytest.approx((1.0, 0.0))
        assert c.radius == pytest.approx(1.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            smallest_enclosing_circle([])

    def test_matches_brute_force(self):
        rng = random.Random(42)
        for _ in range(300):
            pts = [
                Point2(rng.uniform(0, 1), rng.uniform(0, 1))
                for _ in range(rng.randint(1, 8))
            ]
            got = smallest_enclosing_circle(pts)
            want = brute_force_sec(pts)
            assert got.radius == pytest.approx(want.radius, abs=1e-9)
            for p in pts:
                assert distance(got.center, p) <= got.radius + 1e-9


class TestEquidistantBisectorPoint:
    def test_chord_of_length_two(self):
        p = equidistant_bisector_point(Point2(0, 0), Point2(1, 0.5), Point2(2, 0))
        assert (p.x, p.y) == pytest.approx((1.0, 0.0))

    def test_hexagon_edge(self):
        # reflection across the chord lands on the hexagon center
        s3 = math.sqrt(3) / 2
        p = equidistant_bisector_point(
            Point2(0.5, s3), Point2(1, 0), Point2(0.5, -s3)
        )
        assert (p.x, p.y) == pytest.approx((0.0, 0.0), abs=1e-12)
        assert distance(p, Point2(0.5, s3)) == pytest.approx(1.0, abs=1e-12)
        assert distance(p, Point2(0.5, -s3)) == pytest.approx(1.0, abs=1e-12)

    def test_no_solution(self):
        with pytest.raises(NoSolution):
            equidistant_bisector_point(Point2(0, 0), Point2(1.5, 1), Point2(3, 0))

    def test_ambiguous_side(self):
        with pytest.raises(AmbiguousSide):
            equidistant_bisector_point(Point2(0, 0), Point2(0.5, 0), Point2(1, 0))

    @given(
        half=st.floats(0.05, 0.99),
        sy=st.floats(0.05, 3.0),
        sx=st.floats(-2.0, 2.0),
    )
    @settings(max_examples=200)
    def test_equidistance_and_side(self, half, sy, sx):
        prev, nxt = Point2(-half, 0.0), Point2(half, 0.0)
        self_pos = Point2(sx, sy)
        p = equidistant_bisector_point(prev, self_pos, nxt)
        assert distance(p, prev) == pytest.approx(1.0, abs=1e-9)
        assert distance(p, nxt) == pytest.approx(1.0, abs=1e-9)
        assert p.y < 0  # opposite side from self


class TestRotateAbout:
    def test_quarter_turn(self):
        p = rotate_about(Point2(0, 0), Point2(1, 0), math.pi / 2)
        assert (p.x, p.y) == pytest.approx((0.0, 1.0), abs=1e-12)

    def test_identity_and_full_turn(self):
        p0 = Point2(0.3, -0.8)
        assert rotate_about(Point2(1, 1), p0, 0.0) == p0
        p1 = rotate_about(Point2(1, 1), p0, 2 * math.pi)
        assert (p1.x, p1.y) == pytest.approx((p0.x, p0.y), abs=1e-9)

    @given(cx=coords, cy=coords, px=coords, py=coords, ang=st.floats(-7, 7))
    @settings(max_examples=200)
    def test_distance_preserved(self, cx, cy, px, py, ang):
        center, p = Point2(cx, cy), Point2(px, py)
        q = rotate_about(center, p, ang)
        assert distance(center, q) == pytest.approx(distance(center, p), abs=1e-9)


class TestCentralArcAngle:
    def setup_method(self):
        self.circle = Circle(Point2(0, 0), 1.0)

    def test_quarter_short_and_long(self):
        a, b = Point2(1, 0), Point2(0, 1)
        assert central_arc_angle(self.circle, a, b, +1) == pytest.approx(math.pi / 2)
        assert central_arc_angle(self.circle, a, b, -1) == pytest.approx(3 * math.pi / 2)

    def test_polar_subtraction_oracle(self):
        c = Circle(Point2(0, 0), 2.0)
        a = Point2(2.0, 0.0)
        b = Point2(2.0 * math.cos(math.pi / 3), 2.0 * math.sin(math.pi / 3))
        ccw = central_arc_angle(c, a, b, +1)
        cw = central_arc_angle(c, a, b, -1)
        assert ccw == pytest.approx(math.pi / 3, abs=1e-12)
        assert cw == pytest.approx(5 * math.pi / 3, abs=1e-12)
        assert c.radius * ccw == pytest.approx(2 * math.pi / 3, abs=1e-12)

    def test_sides_sum_to_full_turn(self):
        rng = random.Random(7)
        for _ in range(50):
            t1, t2 = rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
            a = Point2(math.cos(t1), math.sin(t1))
            b = Point2(math.cos(t2), math.sin(t2))
            s = central_arc_angle(self.circle, a, b, +1)
            l = central_arc_angle(self.circle, a, b, -1)
            assert s + l == pytest.approx(2 * math.pi, abs=1e-9)

    def test_off_circle_raises(self):
        with pytest.raises(PointOffCircle):
            central_arc_angle(self.circle, Point2(2, 0), Point2(0, 1), +1)
