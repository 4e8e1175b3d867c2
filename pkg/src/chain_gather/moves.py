"""Movement operations: pure target computation plus the run case tables.

Targets are computed in whatever frame the inputs live in (the formulas are
rigid-motion equivariant), so the same code serves the engine's canonical
pass and the disoriented per-robot views.

The angle threshold for shortening is 7/8*pi; all comparisons widen the
inclusive side by the configured epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .chain import LocalView
from .geometry import (
    Circle,
    CollinearPoints,
    Point2,
    angle_between,
    circle_through,
    distance,
    equidistant_bisector_point,
    rotate_about,
    signed_central_angle,
    smallest_enclosing_circle,
)
from .tolerances import Tolerances, DEFAULT_TOLERANCES

SHORTEN_ANGLE = 7.0 * math.pi / 8.0
BISECTOR_STEP_CAP = 0.2


class MoveKind(Enum):
    HOP = "hop"
    JOINT_HOP = "joint_hop"
    SHORTEN = "shorten"
    JOINT_SHORTEN = "joint_shorten"
    MERGE = "merge"
    JOINT_MERGE = "joint_merge"
    PASS_ONLY = "pass"
    BISECTOR_OP = "bisector"
    STAR_OP = "star"
    ENDGAME = "endgame"
    IDLE = "idle"


@dataclass(frozen=True)
class MoveAction:
    """Outcome of one decision: what to do, where to go, which lights flip.

    ``targets`` maps chain offsets (0 = the deciding robot, +1 its run
    partner) to target points in the frame the decision was computed in.
    ``pre_lens`` records the pre-move lengths consumed by the operation
    (vector lengths first, then the straight-line replacement, if any) for
    the progress ledgers.
    """

    kind: MoveKind
    case: int = 0
    targets: dict[int, Point2] = field(default_factory=dict)
    light_effects: tuple[str, ...] = ()
    pre_lens: tuple[float, ...] = ()
    is_start: bool = False


# --- pure target computations -------------------------------------------------


def hop_target(p_prev: Point2, p_self: Point2, p_next: Point2) -> Point2:
    """Exchange the two chain vectors at the hopping robot."""
    return Point2(p_next.x - (p_self.x - p_prev.x), p_next.y - (p_self.y - p_prev.y))


def joint_hop_targets(
    p_prev: Point2, p_a: Point2, p_b: Point2, p_next: Point2
) -> tuple[Point2, Point2]:
    """Both partners swap the middle vector outward."""
    ta = Point2(p_prev.x + (p_next.x - p_b.x), p_prev.y + (p_next.y - p_b.y))
    tb = Point2(p_next.x - (p_a.x - p_prev.x), p_next.y - (p_a.y - p_prev.y))
    return ta, tb


def shorten_target(p_prev: Point2, p_next: Point2) -> Point2:
    return Point2((p_prev.x + p_next.x) / 2.0, (p_prev.y + p_next.y) / 2.0)


def joint_shorten_targets(
    p_prev: Point2, p_a: Point2, p_b: Point2, p_next: Point2
) -> tuple[Point2, Point2]:
    """Split the span between the outer neighbours into three equal parts."""
    vx = p_next.x - p_prev.x
    vy = p_next.y - p_prev.y
    return (
        Point2(p_prev.x + vx / 3.0, p_prev.y + vy / 3.0),
        Point2(p_next.x - vx / 3.0, p_next.y - vy / 3.0),
    )


def merge_target(p_neighbor: Point2) -> Point2:
    """A merging robot jumps onto the next robot in its run direction."""
    return p_neighbor


def joint_merge_target(p_prev: Point2, p_next: Point2) -> Point2:
    """Both partners meet at the midpoint of their outer neighbours."""
    return Point2((p_prev.x + p_next.x) / 2.0, (p_prev.y + p_next.y) / 2.0)


def bisector_op_target(
    p_prev: Point2,
    p_self: Point2,
    p_next: Point2,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Point2:
    """Step along the interior-angle bisector toward the equidistant point.

    The target is the point at distance 1 from both neighbours across the
    chord; the step is capped at 1/5 per round and additionally at the
    circumcenter of the three points, so a contracting symmetric ring ends
    exactly at its center instead of overshooting through it.
    """
    p = equidistant_bisector_point(p_prev, p_self, p_next, tol.eps_len)
    dx = p.x - p_self.x
    dy = p.y - p_self.y
    dist_p = math.hypot(dx, dy)
    if dist_p <= tol.eps_len:
        return p
    step = min(BISECTOR_STEP_CAP, dist_p)
    try:
        c = circle_through(p_prev, p_self, p_next, tol.eps_area)
        along = ((c.center.x - p_self.x) * dx + (c.center.y - p_self.y) * dy) / dist_p
        if along > tol.eps_len:
            step = min(step, along)
    except CollinearPoints:
        pass
    if step >= dist_p:
        return p
    f = step / dist_p
    return Point2(p_self.x + dx * f, p_self.y + dy * f)


def star_op_target(
    p_prev: Point2,
    p_self: Point2,
    p_next: Point2,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Point2:
    """Rebalance the two circle arcs toward the farther neighbour.

    On a small circle (diameter <= 2) the robot jumps to the center.
    Otherwise it moves along the circle so that the short arc grows by
    R*(beta-alpha)/4 and the long arc shrinks by the same amount.
    """
    c = circle_through(p_prev, p_self, p_next, tol.eps_area)
    if 2.0 * c.radius <= 2.0 + tol.eps_len:
        return c.center
    d_prev = signed_central_angle(c, p_self, p_prev)
    d_next = signed_central_angle(c, p_self, p_next)
    if abs(d_prev) >= abs(d_next):
        beta, alpha = abs(d_prev), abs(d_next)
        sign = 1.0 if d_prev > 0 else -1.0
    else:
        beta, alpha = abs(d_next), abs(d_prev)
        sign = 1.0 if d_next > 0 else -1.0
    return rotate_about(c.center, p_self, sign * (beta - alpha) / 4.0)


def star_circle(
    p_prev: Point2, p_self: Point2, p_next: Point2, tol: Tolerances = DEFAULT_TOLERANCES
) -> Circle:
    return circle_through(p_prev, p_self, p_next, tol.eps_area)


def endgame_target(
    p_self: Point2,
    visible: list[Point2],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Point2:
    """Move distance 1 toward the center of the visible robots' enclosing
    circle (jump onto it when already within distance 1)."""
    distinct: list[Point2] = []
    for p in visible:
        if all(distance(p, q) > tol.eps_len for q in distinct):
            distinct.append(p)
    c = smallest_enclosing_circle(distinct, tol.eps_len).center
    d = distance(p_self, c)
    if d <= 1.0 + tol.eps_len:
        return c
    f = 1.0 / d
    return Point2(p_self.x + (c.x - p_self.x) * f, p_self.y + (c.y - p_self.y) * f)


# --- case tables ---------------------------------------------------------------


def isolated_run_decision(
    view: LocalView,
    direction: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> MoveAction:
    """Case table for a robot holding an isolated run.

    ``direction`` is +1 when the run heads toward the chain successor, -1
    toward the predecessor; the table is mirror symmetric in it.
    """
    s = 1 if direction >= 0 else -1
    a = view.dist(-1, 0)
    b = view.dist(0, 1)
    chord = view.dist(-1, 1)
    if chord <= 1.0 + tol.eps_len:
        return MoveAction(
            kind=MoveKind.MERGE,
            case=1,
            targets={0: view.pos(s)},
            light_effects=("stop-run", "block-neighborhood", "pass-init"),
            pre_lens=(a, b, chord),
        )
    if view.dist(0, 2 * s) <= 1.0 + tol.eps_len:
        return MoveAction(
            kind=MoveKind.PASS_ONLY,
            case=2,
            light_effects=("pass-run-to",),
            pre_lens=(view.dist(0, 2 * s),),
        )
    if view.alpha(0) <= SHORTEN_ANGLE + tol.eps_ang:
        return MoveAction(
            kind=MoveKind.SHORTEN,
            case=3,
            targets={0: shorten_target(view.pos(-1), view.pos(1))},
            light_effects=("stop-run",),
            pre_lens=(a, b, chord),
        )
    return MoveAction(
        kind=MoveKind.HOP,
        case=4,
        targets={0: hop_target(view.pos(-s), view.pos(0), view.pos(s))},
        light_effects=("pass-run-to",),
        pre_lens=(a, b),
    )


def joint_pair_decision(
    view: LocalView,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> MoveAction:
    """Case table for a joint run-pair, seen from the pair's first robot.

    Offsets: 0 is the pair robot whose run heads toward its successor, +1
    its partner; -1 and +2 are the outer neighbours.
    """
    p_prev, p_a, p_b, p_next = view.pos(-1), view.pos(0), view.pos(1), view.pos(2)
    a = view.dist(-1, 0)
    b = view.dist(0, 1)
    c = view.dist(1, 2)
    chord = view.dist(-1, 2)
    effects = ("stop-run", "block-neighborhood", "pass-init")
    if chord < 2.0 - tol.eps_len:
        m = joint_merge_target(p_prev, p_next)
        return MoveAction(
            kind=MoveKind.JOINT_MERGE,
            case=1,
            targets={0: m, 1: m},
            light_effects=effects,
            pre_lens=(a, b, c, chord),
        )
    alpha_ok_a = view.alpha(0) <= SHORTEN_ANGLE + tol.eps_ang
    alpha_ok_b = view.alpha(1) <= SHORTEN_ANGLE + tol.eps_ang
    if alpha_ok_a and alpha_ok_b:
        ta, tb = joint_shorten_targets(p_prev, p_a, p_b, p_next)
        return MoveAction(
            kind=MoveKind.JOINT_SHORTEN,
            case=2,
            targets={0: ta, 1: tb},
            light_effects=("stop-run",),
            pre_lens=(a, b, c, chord),
        )
    if alpha_ok_a:
        return MoveAction(
            kind=MoveKind.SHORTEN,
            case=3,
            targets={0: shorten_target(view.pos(-1), view.pos(1))},
            light_effects=("stop-run",),
            pre_lens=(a, b, view.dist(-1, 1)),
        )
    if alpha_ok_b:
        return MoveAction(
            kind=MoveKind.SHORTEN,
            case=4,
            targets={1: shorten_target(view.pos(0), view.pos(2))},
            light_effects=("stop-run",),
            pre_lens=(b, c, view.dist(0, 2)),
        )
    u_i = p_a - p_prev
    u_out = p_next - p_b
    if angle_between(u_i, -u_out) <= SHORTEN_ANGLE + tol.eps_ang:
        ta, tb = joint_shorten_targets(p_prev, p_a, p_b, p_next)
        return MoveAction(
            kind=MoveKind.JOINT_SHORTEN,
            case=5,
            targets={0: ta, 1: tb},
            light_effects=("stop-run",),
            pre_lens=(a, b, c, chord),
        )
    ta, tb = joint_hop_targets(p_prev, p_a, p_b, p_next)
    return MoveAction(
        kind=MoveKind.JOINT_HOP,
        case=6,
        targets={0: ta, 1: tb},
        light_effects=("skip-pass-run-to",),
        pre_lens=(a, b, c),
    )
