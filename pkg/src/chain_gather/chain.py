"""Ring data model: robot identities, positions, lights, views, merges.

A configuration is a snapshot of one synchronous round: robot ids in chain
order, their positions, and the non-run part of their visible lights.  Run
lights are realized as tokens (owned by the engine) and are composed into
:class:`RobotLights` when a :class:`LocalView` is built.

Robot ids are pure simulation bookkeeping: they are stable across rounds and
survive merges (``merge_map`` sends retired ids to their survivor), but they
are never exposed inside a view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numpy as np

from .geometry import Point2
from .tolerances import Tolerances, DEFAULT_TOLERANCES

_MASK64 = (1 << 64) - 1


class ChainError(Exception):
    pass


class DisconnectedChain(ChainError):
    """Adjacent robots further apart than the connectivity range."""


class ConnectivityBroken(ChainError):
    """A round produced a disconnected chain: an algorithm bug."""


class InitKind(IntEnum):
    NONE = 0
    SINGLE = 1
    JOINT_WITH_SUCCESSOR = 2
    JOINT_WITH_PREDECESSOR = 3


@dataclass(frozen=True)
class RobotLights:
    """The constant-size visible state of one robot."""

    run_here: bool = False
    run_toward: int = 0  # +1 successor / -1 predecessor; 0 when no run
    init: InitKind = InitKind.NONE
    blocked_remaining: int = 0
    init_phase: int = 0
    symmetric_moved: bool = False


@dataclass(frozen=True)
class RunToken:
    """Engine-level identity of one run travelling along the chain."""

    token_id: int
    holder: int  # robot id
    direction: int  # +1 toward successor, -1 toward predecessor
    origin: int  # robot id that generated the run
    run_vector: tuple[float, float]
    visited: tuple[int, ...]
    created_round: int

    def moved_to(self, holder: int) -> "RunToken":
        return RunToken(
            token_id=self.token_id,
            holder=holder,
            direction=self.direction,
            origin=self.origin,
            run_vector=self.run_vector,
            visited=self.visited + (holder,),
            created_round=self.created_round,
        )


class ChainConfiguration:
    """Snapshot of the ring in one round.

    Parallel arrays, ring-indexed: ``ids``, ``xs``, ``ys``, ``init_kind``,
    ``blocked``, ``phase``, ``sym_moved``.  Treat instances as immutable;
    the engine builds a new one each round via :func:`apply_round`.
    """

    def __init__(
        self,
        ids: np.ndarray,
        xs: np.ndarray,
        ys: np.ndarray,
        init_kind: np.ndarray | None = None,
        blocked: np.ndarray | None = None,
        phase: np.ndarray | None = None,
        sym_moved: np.ndarray | None = None,
        round: int = 0,
        merge_map: dict[int, int] | None = None,
    ):
        n = len(ids)
        self.ids = np.asarray(ids, dtype=np.int64)
        self.xs = np.asarray(xs, dtype=np.float64)
        self.ys = np.asarray(ys, dtype=np.float64)
        self.init_kind = (
            np.zeros(n, dtype=np.int8) if init_kind is None else np.asarray(init_kind, np.int8)
        )
        self.blocked = (
            np.zeros(n, dtype=np.int8) if blocked is None else np.asarray(blocked, np.int8)
        )
        self.phase = np.zeros(n, dtype=np.int8) if phase is None else np.asarray(phase, np.int8)
        self.sym_moved = (
            np.zeros(n, dtype=bool) if sym_moved is None else np.asarray(sym_moved, bool)
        )
        self.round = round
        self.merge_map: dict[int, int] = {} if merge_map is None else merge_map

    @property
    def n(self) -> int:
        return len(self.ids)

    def position(self, i: int) -> Point2:
        return Point2(float(self.xs[i]), float(self.ys[i]))

    def index_of(self, robot_id: int) -> int:
        hits = np.nonzero(self.ids == robot_id)[0]
        if len(hits) != 1:
            raise KeyError(f"robot id {robot_id} not alive")
        return int(hits[0])

    def lights(self, i: int, run_toward: int = 0) -> RobotLights:
        return RobotLights(
            run_here=run_toward != 0,
            run_toward=int(run_toward),
            init=InitKind(int(self.init_kind[i])),
            blocked_remaining=int(self.blocked[i]),
            init_phase=int(self.phase[i]),
            symmetric_moved=bool(self.sym_moved[i]),
        )

    @property
    def ring(self) -> list[tuple[int, Point2, RobotLights]]:
        return [(int(self.ids[i]), self.position(i), self.lights(i)) for i in range(self.n)]

    def resolve_id(self, robot_id: int) -> int:
        """Follow the merge map to the surviving robot id."""
        seen = set()
        while robot_id in self.merge_map:
            if robot_id in seen:
                raise ChainError("cycle in merge map")
            seen.add(robot_id)
            robot_id = self.merge_map[robot_id]
        return robot_id

    def copy_lights_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.init_kind.copy(),
            self.blocked.copy(),
            self.phase.copy(),
            self.sym_moved.copy(),
        )


def build_chain(
    positions: list[tuple[float, float]] | list[Point2],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ChainConfiguration:
    """Fresh configuration at round 0 with cleared lights.

    Raises :class:`DisconnectedChain` naming the first adjacent pair whose
    distance exceeds the connectivity range.
    """
    if len(positions) < 1:
        raise ChainError("a chain needs at least one robot")
    xs = np.array([p.x if isinstance(p, Point2) else p[0] for p in positions], dtype=np.float64)
    ys = np.array([p.y if isinstance(p, Point2) else p[1] for p in positions], dtype=np.float64)
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise ChainError("positions must be finite")
    n = len(xs)
    if n >= 2:
        d = np.hypot(np.roll(xs, -1) - xs, np.roll(ys, -1) - ys)
        bad = np.nonzero(d > 1.0 + tol.eps_len)[0]
        if len(bad):
            i = int(bad[0])
            raise DisconnectedChain(
                f"adjacent pair ({i}, {(i + 1) % n}) at distance {d[i]:.6f} > 1"
            )
    return ChainConfiguration(ids=np.arange(n, dtype=np.int64), xs=xs, ys=ys)


def chain_length(config: ChainConfiguration) -> float:
    """Total length of the closed chain (0 for a single robot)."""
    if config.n < 2:
        return 0.0
    d = np.hypot(
        np.roll(config.xs, -1) - config.xs, np.roll(config.ys, -1) - config.ys
    )
    return float(d.sum())


def is_gathered(config: ChainConfiguration, eps_gather: float) -> bool:
    """All robots within ``eps_gather`` of each other (max pairwise)."""
    if config.n <= 1:
        return True
    wx = float(config.xs.max() - config.xs.min())
    wy = float(config.ys.max() - config.ys.min())
    diag = math.hypot(wx, wy)
    if diag <= eps_gather:
        return True
    if max(wx, wy) > eps_gather:
        return False
    dx = config.xs[:, None] - config.xs[None, :]
    dy = config.ys[:, None] - config.ys[None, :]
    return float(np.sqrt(dx * dx + dy * dy).max()) <= eps_gather


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def frame_for(frame_seed: int, robot_id: int) -> tuple[float, bool]:
    """Rotation angle and mirror flag of one robot's private frame.

    Seed 0 is the canonical identity frame (rotation 0, no mirror), which
    the engine's array path uses implicitly.
    """
    if frame_seed == 0:
        return 0.0, False
    z = _splitmix64((frame_seed & _MASK64) ^ _splitmix64(robot_id & _MASK64))
    angle = (z >> 11) / float(1 << 53) * (2.0 * math.pi)
    mirror = bool(z & 1)
    return angle, mirror


@dataclass
class LocalView:
    """What one robot perceives, in its private (disoriented) frame.

    ``positions[k]`` for k in 0..8 is the chain neighbour at offset k-4
    (4 predecessors, self at index 4 mapped to the origin, 4 successors).
    The frame is a rigid motion, so distances match global distances; the
    chirality may be mirrored, so turns are only meaningful relatively.
    """

    positions: np.ndarray  # (9, 2)
    lights: tuple[RobotLights, ...]  # 9 entries, same offsets
    wraps_small: bool
    _origin: tuple[float, float] = field(repr=False, default=(0.0, 0.0))
    _angle: float = field(repr=False, default=0.0)
    _mirror: bool = field(repr=False, default=False)

    CENTER = 4

    def pos(self, k: int) -> Point2:
        """Neighbour position at chain offset k in [-4, 4]."""
        return Point2(*self.positions[k + 4])

    @cached_property
    def _ulens(self) -> tuple[float, ...]:
        # u_{i+k} for k in [-3, 4] at slots 0..7
        out = []
        for k in range(-3, 5):
            out.append((self.pos(k) - self.pos(k - 1)).norm())
        return tuple(out)

    def ulen(self, k: int) -> float:
        """Length of the chain vector into neighbour i+k, k in [-3, 4]."""
        return self._ulens[k + 3]

    @cached_property
    def _angles(self) -> tuple[tuple[float, int], ...]:
        from .geometry import DegenerateVertex, vertex_angle

        out = []
        for k in range(-3, 4):
            try:
                oa = vertex_angle(self.pos(k - 1), self.pos(k), self.pos(k + 1))
                out.append((oa.size, oa.turn))
            except DegenerateVertex:
                out.append((0.0, 0))
        return tuple(out)

    def alpha(self, k: int) -> float:
        """Interior angle size at neighbour i+k, k in [-3, 3]."""
        return self._angles[k + 3][0]

    def turn(self, k: int) -> int:
        return self._angles[k + 3][1]

    def chord(self, k: int) -> float:
        """Distance between the neighbours of robot i+k."""
        return (self.pos(k + 1) - self.pos(k - 1)).norm()

    def dist(self, k1: int, k2: int) -> float:
        return (self.pos(k2) - self.pos(k1)).norm()

    def light(self, k: int) -> RobotLights:
        return self.lights[k + 4]

    def init_in_neighborhood(self) -> bool:
        """Any Init-State among the +-3 neighbourhood (self included)."""
        return any(self.light(k).init != InitKind.NONE for k in range(-3, 4))

    def run_in_neighborhood(self) -> bool:
        return any(self.light(k).run_here for k in range(-3, 4))

    def to_global(self, p: Point2) -> Point2:
        """Map a point computed in this view back to the global frame.

        Harness helper only; the decision rules never see global output.
        """
        x, y = p.x, p.y
        if self._mirror:
            y = -y
        ca = math.cos(-self._angle)
        sa = math.sin(-self._angle)
        gx = ca * x - sa * y
        gy = sa * x + ca * y
        return Point2(gx + self._origin[0], gy + self._origin[1])


def local_view(
    config: ChainConfiguration,
    run_dirs: np.ndarray | None,
    i: int,
    frame_seed: int = 0,
) -> LocalView:
    """Extract robot i's view: +-4 neighbours through a private rigid motion.

    ``run_dirs`` is a ring-indexed array of run directions (0 none, +-1),
    typically derived from the engine's tokens.
    """
    n = config.n
    angle, mirror = frame_for(frame_seed, int(config.ids[i]))
    ca, sa = math.cos(angle), math.sin(angle)
    ox, oy = float(config.xs[i]), float(config.ys[i])
    positions = np.empty((9, 2), dtype=np.float64)
    lights: list[RobotLights] = []
    for k in range(-4, 5):
        j = (i + k) % n
        dx = float(config.xs[j]) - ox
        dy = float(config.ys[j]) - oy
        rx = ca * dx - sa * dy
        ry = sa * dx + ca * dy
        if mirror:
            ry = -ry
        positions[k + 4] = (rx, ry)
        run_toward = int(run_dirs[j]) if run_dirs is not None else 0
        lights.append(config.lights(j, run_toward=run_toward))
    positions[4] = (0.0, 0.0)
    return LocalView(
        positions=positions,
        lights=tuple(lights),
        wraps_small=n <= 5,
        _origin=(ox, oy),
        _angle=angle,
        _mirror=mirror,
    )


def apply_round(
    config: ChainConfiguration,
    targets: dict[int, tuple[float, float]],
    merge_directives: list[tuple[int, int]],
    new_lights: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ChainConfiguration:
    """Commit one synchronous round.

    ``targets`` maps ring indices to new positions (computed from the
    round-t snapshot); ``merge_directives`` lists ``(loser_index,
    survivor_index)`` pairs, collapsed transitively.  ``new_lights`` are the
    already-updated light arrays on the old indexing; retired rows are
    dropped with the ring contraction.

    Raises :class:`ConnectivityBroken` if the resulting ring has an adjacent
    pair beyond the connectivity range.
    """
    n = config.n
    xs = config.xs.copy()
    ys = config.ys.copy()
    for i, (x, y) in targets.items():
        xs[i] = x
        ys[i] = y

    survivor_of: dict[int, int] = {}
    for loser, survivor in merge_directives:
        survivor_of[loser] = survivor

    def resolve(i: int) -> int:
        seen = set()
        while i in survivor_of:
            if i in seen:
                raise ChainError("cyclic merge directives")
            seen.add(i)
            i = survivor_of[i]
        return i

    keep = [i for i in range(n) if i not in survivor_of]
    merge_map = dict(config.merge_map)
    for loser in survivor_of:
        merge_map[int(config.ids[loser])] = int(config.ids[resolve(loser)])

    if new_lights is None:
        new_lights = config.copy_lights_arrays()
    init_kind, blocked, phase, sym_moved = new_lights

    out = ChainConfiguration(
        ids=config.ids[keep],
        xs=xs[keep],
        ys=ys[keep],
        init_kind=init_kind[keep],
        blocked=blocked[keep],
        phase=phase[keep],
        sym_moved=sym_moved[keep],
        round=config.round + 1,
        merge_map=merge_map,
    )
    if out.n >= 2:
        d = np.hypot(
            np.roll(out.xs, -1) - out.xs, np.roll(out.ys, -1) - out.ys
        )
        bad = np.nonzero(d > 1.0 + tol.eps_len)[0]
        if len(bad):
            i = int(bad[0])
            raise ConnectivityBroken(
                f"round {config.round}: pair ({i}, {(i + 1) % out.n}) "
                f"at distance {d[i]:.9f}"
            )
    return out
