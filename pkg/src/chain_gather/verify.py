"""Executable invariant suite: per-round checkers and whole-run ledgers.

Each ``check_*`` function is pure over its inputs and returns ``None`` when
the property holds or a :class:`Violation` naming what failed.  They run
inline (engine hook, when invariant checking is enabled) or offline against
a recorded trace; the two modes agree because both consume the same data.

The progress ledgers audited here mirror the counting arguments behind the
linear-time bound: merge count, per-shorten chain-length progress, the cap
on small-vector shortens, the total run budget, and the bounded
chain-length increases at symmetric/asymmetric borders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainConfiguration, InitKind, RunToken
from .engine import RoundTrace, SimulationState, TraceEvent
from .geometry import Point2, circle_through, distance, equidistant_bisector_point
from .moves import bisector_op_target
from .tolerances import Tolerances, DEFAULT_TOLERANCES

PROGRESS_PER_SHORTEN = 0.019
PROGRESS_SLACK = 1e-9
RUN_BUDGET_FACTOR = 143
SMALL_SHORTEN_FACTOR = 4
MAX_BOUNDARY_INCREASE = 0.2


class MalformedTrace(Exception):
    pass


@dataclass(frozen=True)
class Violation:
    name: str
    detail: str

    def __str__(self) -> str:
        return f"{self.name}: {self.detail}"


@dataclass
class AuditReport:
    n_initial: int
    rounds: int
    ledgers: dict[str, float] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


# --- per-round checks -------------------------------------------------------------


def check_connectivity(
    config: ChainConfiguration, tol: Tolerances = DEFAULT_TOLERANCES
) -> Violation | None:
    if config.n < 2:
        return None
    d = np.hypot(
        np.roll(config.xs, -1) - config.xs, np.roll(config.ys, -1) - config.ys
    )
    bad = np.nonzero(d > 1.0 + tol.eps_len)[0]
    if len(bad):
        i = int(bad[0])
        return Violation(
            "connectivity",
            f"pair ({i}, {(i + 1) % config.n}) at distance {d[i]:.9f} > 1",
        )
    return None


def check_run_validity(state: SimulationState) -> Violation | None:
    config = state.config
    n = config.n
    run_dir = np.zeros(n, dtype=np.int8)
    idx_of = {int(rid): i for i, rid in enumerate(config.ids)}
    for rid, token in state.tokens.items():
        if rid not in idx_of:
            return Violation("run-validity", f"token holder {rid} is not alive")
        if run_dir[idx_of[rid]] != 0:
            return Violation("run-validity", f"two runs on robot {rid}")
        run_dir[idx_of[rid]] = token.direction
    holders = np.nonzero(run_dir)[0]
    for i in holders:
        i = int(i)
        if run_dir[(i + 1) % n] != 0 and run_dir[(i + 2) % n] != 0:
            return Violation(
                "run-validity", f"prohibited run-sequence at {i},{(i + 1) % n},{(i + 2) % n}"
            )
        j = (i + 1) % n
        if run_dir[j] != 0:
            pair = (int(run_dir[i]), int(run_dir[j]))
            if pair == (1, -1):
                continue  # joint run-pair
            kind = (
                "opposite conflicting run-pair"
                if pair == (-1, 1)
                else "uni-directional conflicting run-pair"
            )
            return Violation("run-validity", f"{kind} at {i},{j}")
    return None


def check_init_spacing(state: SimulationState) -> Violation | None:
    """No three consecutive robots all holding pattern-minted Init-States."""
    config = state.config
    n = config.n
    if n < 3:
        return None
    minted = np.zeros(n, dtype=bool)
    for i in range(n):
        rid = int(config.ids[i])
        if config.init_kind[i] != InitKind.NONE and rid in state.pattern_minted:
            minted[i] = True
    for i in range(n):
        if minted[i] and minted[(i + 1) % n] and minted[(i + 2) % n]:
            return Violation(
                "init-spacing", f"three pattern-minted Init-States at {i}..{(i + 2) % n}"
            )
    return None


def check_no_revisit(tokens: list[RunToken], n_alive: int) -> Violation | None:
    """A run never visits a robot twice (meaningful while n > 5)."""
    if n_alive <= 5:
        return None
    for token in tokens:
        if len(set(token.visited)) != len(token.visited):
            return Violation(
                "no-revisit",
                f"token {token.token_id} revisited a robot: {token.visited}",
            )
    return None


# --- configuration-level checks ------------------------------------------------------


def fit_common_circle(points: list[Point2], tol: float) -> tuple[Point2, float] | None:
    """Circle through the first non-collinear triple if all points lie on it."""
    n = len(points)
    for k in range(2, n):
        try:
            c = circle_through(points[0], points[1], points[k])
        except Exception:
            continue
        if all(abs(distance(c.center, p) - c.radius) <= tol for p in points):
            return c.center, c.radius
        return None
    return None


def is_regular_star_shape(points: list[Point2], tol: float = 1e-6) -> bool:
    """All points on one circle with equal consecutive central gaps."""
    fit = fit_common_circle(points, tol)
    if fit is None:
        return False
    center, radius = fit
    if radius <= tol:
        return True
    angles = [math.atan2(p.y - center.y, p.x - center.x) for p in points]
    gaps = [
        (angles[(j + 1) % len(points)] - angles[j]) % (2.0 * math.pi)
        for j in range(len(points))
    ]
    ref = gaps[0]
    return all(
        abs(g - ref) <= tol / max(radius, 1.0) + 1e-9 or abs(abs(g - ref) - 2 * math.pi) <= 1e-9
        for g in gaps
    )


def check_star_one_round(
    before: list[Point2], after: list[Point2], tol: float = 1e-6
) -> Violation | None:
    """After one synchronous round, an alternating isogonal ring must be a
    regular star: common circle and uniform central spacing."""
    if fit_common_circle(before, 1e-6) is None:
        return Violation("star-one-round", "precondition: input not on a common circle")
    if len(after) != len(before):
        return Violation("star-one-round", "robots merged during the round")
    if not is_regular_star_shape(after, tol):
        return Violation("star-one-round", "round result is not a regular star")
    return None


def check_radius_recurrence(
    before: list[Point2],
    after: list[Point2],
    n: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Violation | None:
    """One contraction round of a regular ring: r(t+1) = r(t) - h_eff with
    h_eff the (capped) bisector step, and the uncapped step at least
    sqrt(1 - 4 pi^2 r^2 / n^2) whenever that bound is real."""
    fit_b = fit_common_circle(before, 1e-6)
    if fit_b is None:
        return Violation("radius-recurrence", "precondition: input not on a circle")
    center, r_before = fit_b
    target = bisector_op_target(before[-1], before[0], before[1], tol)
    h_eff = distance(before[0], target)
    if len(after) == len(before):
        r_after = max(distance(center, p) for p in after)
    else:
        return Violation("radius-recurrence", "robots merged during the round")
    if abs(r_after - (r_before - h_eff)) > 1e-9 + 1e-9 * r_before:
        return Violation(
            "radius-recurrence",
            f"r(t+1)={r_after:.12f} != r(t)-h_eff={r_before - h_eff:.12f}",
        )
    radicand = 1.0 - 4.0 * math.pi**2 * r_before**2 / n**2
    if radicand >= 0.0:
        h_uncapped = distance(
            before[0], equidistant_bisector_point(before[-1], before[0], before[1])
        )
        if h_uncapped < math.sqrt(radicand) - 1e-9:
            return Violation(
                "radius-recurrence",
                f"uncapped step {h_uncapped:.12f} below bound {math.sqrt(radicand):.12f}",
            )
    return None


# --- whole-run ledgers -----------------------------------------------------------------


def _event_progress(ev: TraceEvent) -> float:
    """Chain-length decrease implied by one shorten/merge event."""
    lens = ev.pre_lens
    if ev.op in ("shorten", "shorten_start", "merge"):
        a, b, chord = lens
        return a + b - chord
    if ev.op in ("joint_shorten", "joint_shorten_start", "joint_merge"):
        a, b, c, chord = lens
        return a + b + c - chord
    return 0.0


def audit_progress(traces: list[RoundTrace]) -> AuditReport:
    """Fold the run's ledgers and compare each against its bound."""
    if not traces:
        return AuditReport(n_initial=0, rounds=0)
    n0 = traces[0].n_before
    report = AuditReport(n_initial=n0, rounds=len(traces))
    violations = report.violations

    merges = 0
    shortens_large = 0
    shortens_mixed = 0
    joint_shortens = 0
    runs_started = 0
    boundary_events = 0
    length_increase_rounds = 0

    expected_n = n0
    for tr in traces:
        if tr.n_before != expected_n:
            raise MalformedTrace(
                f"round {tr.round}: n_before={tr.n_before}, expected {expected_n}"
            )
        if tr.n_before - tr.n_after != tr.counters.get("merges", 0):
            violations.append(
                Violation(
                    "merge-count",
                    f"round {tr.round}: n drop {tr.n_before - tr.n_after} != "
                    f"merges counter {tr.counters.get('merges', 0)}",
                )
            )
        expected_n = tr.n_after

        merges += tr.counters.get("merges", 0)
        shortens_large += tr.counters.get("shortens_large", 0)
        shortens_mixed += tr.counters.get("shortens_mixed", 0)
        joint_shortens += tr.counters.get("joint_shortens", 0)
        runs_started += tr.counters.get("runs_started", 0)
        boundary_events += tr.counters.get("sym_boundary", 0)

        for ev in tr.events:
            if ev.op == "shorten" and len(ev.pre_lens) == 3:
                a, b, _ = ev.pre_lens
                if a >= 0.5 - PROGRESS_SLACK and b >= 0.5 - PROGRESS_SLACK:
                    if _event_progress(ev) < PROGRESS_PER_SHORTEN - PROGRESS_SLACK:
                        violations.append(
                            Violation(
                                "shorten-progress",
                                f"round {tr.round}: both-large shorten decreased L by "
                                f"{_event_progress(ev):.6f} < {PROGRESS_PER_SHORTEN}",
                            )
                        )
            elif ev.op == "joint_shorten" and len(ev.pre_lens) == 4:
                if _event_progress(ev) < PROGRESS_PER_SHORTEN - PROGRESS_SLACK:
                    violations.append(
                        Violation(
                            "joint-shorten-progress",
                            f"round {tr.round}: joint shorten decreased L by "
                            f"{_event_progress(ev):.6f} < {PROGRESS_PER_SHORTEN}",
                        )
                    )

        dl = tr.length_after - tr.length_before
        if dl > PROGRESS_SLACK:
            length_increase_rounds += 1
            allowed = tr.counters.get("sym_boundary", 0) * (
                MAX_BOUNDARY_INCREASE + PROGRESS_SLACK
            )
            if dl > allowed:
                violations.append(
                    Violation(
                        "length-increase",
                        f"round {tr.round}: L grew by {dl:.9f} with only "
                        f"{tr.counters.get('sym_boundary', 0)} boundary events",
                    )
                )

    if merges > n0 - 1:
        violations.append(Violation("merge-budget", f"{merges} merges > n-1 = {n0 - 1}"))
    if shortens_mixed > SMALL_SHORTEN_FACTOR * n0:
        violations.append(
            Violation(
                "small-shorten-budget",
                f"{shortens_mixed} small-vector shortens > 4n = {SMALL_SHORTEN_FACTOR * n0}",
            )
        )
    big_budget = n0 * (1.0 + 0.2) / PROGRESS_PER_SHORTEN
    if shortens_large + joint_shortens > big_budget:
        violations.append(
            Violation(
                "shorten-budget",
                f"{shortens_large + joint_shortens} progressing shortens > "
                f"n(1+1/5)/0.019 = {big_budget:.1f}",
            )
        )
    if runs_started > RUN_BUDGET_FACTOR * n0:
        violations.append(
            Violation(
                "run-budget", f"{runs_started} runs started > 143n = {RUN_BUDGET_FACTOR * n0}"
            )
        )
    if boundary_events > n0:
        violations.append(
            Violation(
                "boundary-budget", f"{boundary_events} boundary increases > n = {n0}"
            )
        )

    report.ledgers.update(
        merges=merges,
        shortens_large=shortens_large,
        shortens_mixed=shortens_mixed,
        joint_shortens=joint_shortens,
        runs_started=runs_started,
        sym_boundary=boundary_events,
        length_increase_rounds=length_increase_rounds,
    )
    return report


# --- trace wire format ----------------------------------------------------------------


def trace_to_record(trace: RoundTrace) -> dict:
    """One JSONL record; field order is fixed for byte-stable goldens."""
    return {
        "round": trace.round,
        "n": trace.n_before,
        "L_before": trace.length_before,
        "L_after": trace.length_after,
        "events": [
            {"robot": ev.robot, "op": ev.op, "pre_vec_lens": list(ev.pre_lens)}
            for ev in trace.events
        ],
        "counters": dict(trace.counters),
        "seed": trace.seed,
    }


def record_to_trace(record: dict, n_after: int | None = None) -> RoundTrace:
    try:
        events = tuple(
            TraceEvent(
                robot=int(ev["robot"]),
                op=str(ev["op"]),
                pre_lens=tuple(float(x) for x in ev["pre_vec_lens"]),
            )
            for ev in record["events"]
        )
        counters = {str(k): int(v) for k, v in record["counters"].items()}
        n_before = int(record["n"])
        if n_after is None:
            n_after = n_before - counters.get("merges", 0)
        return RoundTrace(
            round=int(record["round"]),
            n_before=n_before,
            n_after=n_after,
            length_before=float(record["L_before"]),
            length_after=float(record["L_after"]),
            events=events,
            counters=counters,
            seed=int(record["seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTrace(f"bad trace record: {exc}") from exc
