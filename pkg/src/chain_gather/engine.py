"""Fully synchronous scheduler: look, compute, move, in lockstep rounds.

Every round is computed entirely from the round-t snapshot and committed at
once.  Per-robot priority: run decisions first, then run generation by
Init-State holders whose 7-phase counter fires, then the circle-based
symmetric moves, otherwise idle.  Pattern detection and the exceptional
Init-State rule run alongside and only flip lights.

Run generation by several phase-aligned Init-States in one round can place
conflicting runs; the commit resolves this deterministically: consecutive
firing holders act pairwise (a lone holder starts alone, a block of two or
more starts as one leading pair while the rest wait), and any two runs
landing on the same robot annihilate.  Both rules are computable from the
local views and keep every round run-valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .chain import (
    ChainConfiguration,
    ConnectivityBroken,
    InitKind,
    LocalView,
    RunToken,
    apply_round,
    build_chain,
    chain_length,
    is_gathered,
    local_view,
)
from .geometry import Point2, distance
from .moves import (
    MoveAction,
    MoveKind,
    bisector_op_target,
    endgame_target,
    isolated_run_decision,
    joint_merge_target,
    joint_pair_decision,
    joint_shorten_targets,
    shorten_target,
    star_circle,
    star_op_target,
)
from .patterns import IsogonalKind, detect_init, locally_isogonal
from .tolerances import Tolerances, DEFAULT_TOLERANCES

INIT_PERIOD = 7
BLOCK_ROUNDS = 4
NEIGHBORHOOD = 3  # +-3 robots form N_i
START_SPACING = 8  # min ring distance between same-round run generations


class EngineError(Exception):
    pass


class AlreadyGathered(EngineError):
    pass


class InvariantViolation(EngineError):
    def __init__(self, name: str, round: int, detail: str = ""):
        super().__init__(f"[round {round}] {name}: {detail}")
        self.name = name
        self.round = round
        self.detail = detail


@dataclass(frozen=True)
class Settings:
    tol: Tolerances = DEFAULT_TOLERANCES
    check_invariants: bool = True
    frame_seed: int = 0


@dataclass(frozen=True)
class TraceEvent:
    robot: int
    op: str
    pre_lens: tuple[float, ...] = ()


@dataclass(frozen=True)
class RoundTrace:
    round: int
    n_before: int
    n_after: int
    length_before: float
    length_after: float
    events: tuple[TraceEvent, ...]
    counters: dict[str, int]
    seed: int


@dataclass(frozen=True)
class SimulationState:
    config: ChainConfiguration
    tokens: dict[int, RunToken] = field(default_factory=dict)  # robot id -> token
    settings: Settings = field(default_factory=Settings)
    rng_seed: int = 0
    pattern_minted: frozenset[int] = frozenset()  # robot ids, for spacing check
    next_token_id: int = 0


@dataclass(frozen=True)
class RunResult:
    gathered: bool
    rounds: int
    state: SimulationState
    traces: list[RoundTrace]


# --- per-round gating inputs ----------------------------------------------------


@dataclass
class RoundInputs:
    """Per-robot gating data for one snapshot, ring-indexed.

    Produced either from the vectorized kernel sweep (the engine's canonical
    path) or robot by robot through disoriented local views (the invariance
    harness); the two must agree, which the tests enforce.
    """

    run_dir: np.ndarray  # int8: 0 none, +-1 direction
    fires: np.ndarray  # bool: init holder attempting a run start
    isogonal: np.ndarray  # int8: IsogonalKind values
    mint_family: np.ndarray  # int8: init-gated pattern family
    mint_variant: np.ndarray
    init_in_n: np.ndarray
    run_in_n: np.ndarray


def _window_any(mask: np.ndarray, reach: int) -> np.ndarray:
    out = mask.copy()
    for k in range(1, reach + 1):
        out |= np.roll(mask, k)
        out |= np.roll(mask, -k)
    return out


def _run_dir_array(state: SimulationState) -> np.ndarray:
    config = state.config
    run_dir = np.zeros(config.n, dtype=np.int8)
    if state.tokens:
        idx_of = {int(rid): i for i, rid in enumerate(config.ids)}
        for rid, token in state.tokens.items():
            run_dir[idx_of[rid]] = token.direction
    return run_dir


def _fires_mask(config: ChainConfiguration, run_in_n: np.ndarray) -> np.ndarray:
    base = (
        (config.init_kind != InitKind.NONE)
        & (config.phase == 0)
        & (config.blocked == 0)
        & ~run_in_n
    )
    # Joint partners only attempt together.
    jws = config.init_kind == InitKind.JOINT_WITH_SUCCESSOR
    jwp = config.init_kind == InitKind.JOINT_WITH_PREDECESSOR
    fires = base.copy()
    fires &= ~jws | np.roll(base, -1)
    fires &= ~jwp | np.roll(base, 1)
    return fires


def gather_inputs_array(state: SimulationState) -> RoundInputs:
    """Canonical gating pass over the whole ring (kernel sweep)."""
    config = state.config
    tol = state.settings.tol
    run_dir = _run_dir_array(state)
    sweep = kernels.analyze_ring(config.xs, config.ys, tol.eps_len, tol.eps_ang)
    init_mask = config.init_kind != InitKind.NONE
    init_in_n = _window_any(init_mask, NEIGHBORHOOD)
    run_in_n = _window_any(run_dir != 0, NEIGHBORHOOD)
    isogonal = np.zeros(config.n, dtype=np.int8)
    full_sym = sweep.ang_eq & sweep.turn_uni
    isogonal[full_sym & sweep.len_eq] = IsogonalKind.EQUAL_LENGTHS
    isogonal[full_sym & ~sweep.len_eq & sweep.len_alt] = IsogonalKind.ALTERNATING_LENGTHS
    gate = ~init_in_n & (config.init_kind == InitKind.NONE)
    mint_family = np.where(gate, sweep.pat_family, 0).astype(np.int8)
    mint_variant = np.where(mint_family != 0, sweep.pat_variant, 0).astype(np.int8)
    return RoundInputs(
        run_dir=run_dir,
        fires=_fires_mask(config, run_in_n),
        isogonal=isogonal,
        mint_family=mint_family,
        mint_variant=mint_variant,
        init_in_n=init_in_n,
        run_in_n=run_in_n,
    )


def gather_inputs_views(state: SimulationState, frame_seed: int) -> RoundInputs:
    """Same gating data, derived robot by robot from disoriented views."""
    config = state.config
    tol = state.settings.tol
    n = config.n
    run_dir = _run_dir_array(state)
    isogonal = np.zeros(n, dtype=np.int8)
    mint_family = np.zeros(n, dtype=np.int8)
    mint_variant = np.zeros(n, dtype=np.int8)
    init_in_n = np.zeros(n, dtype=bool)
    run_in_n = np.zeros(n, dtype=bool)
    for i in range(n):
        view = local_view(config, run_dir, i, frame_seed)
        init_in_n[i] = view.init_in_neighborhood()
        run_in_n[i] = view.run_in_neighborhood()
        isogonal[i] = locally_isogonal(view, tol)
        if config.init_kind[i] == InitKind.NONE:
            verdict = detect_init(view, tol)
            if verdict is not None:
                mint_family[i] = verdict.family
                mint_variant[i] = verdict.variant
    return RoundInputs(
        run_dir=run_dir,
        fires=_fires_mask(config, run_in_n),
        isogonal=isogonal,
        mint_family=mint_family,
        mint_variant=mint_variant,
        init_in_n=init_in_n,
        run_in_n=run_in_n,
    )


# --- decisions -------------------------------------------------------------------


@dataclass
class StartPlan:
    """A run generation event: who moves and which tokens appear at t+1."""

    indices: tuple[int, ...]  # one (single) or two (joint) ring indices
    action: MoveAction
    token_specs: tuple[tuple[int, int, tuple[float, float]], ...]
    # each spec: (landing ring index, direction, run vector)


@dataclass
class RoundPlan:
    actions: dict[int, MoveAction]
    pair_of: dict[int, int]  # joint-pair partner (both directions)
    starts: list[StartPlan]
    mints: dict[int, tuple[int, int]]  # ring index -> (family, variant)
    exceptional: list[int]
    endgame: bool = False


def _fire_chains(fires: np.ndarray) -> list[list[int]]:
    """Maximal blocks of consecutive firing holders, in ring order."""
    n = len(fires)
    idxs = np.nonzero(fires)[0]
    if len(idxs) == 0 or len(idxs) == n:
        # A fully saturated ring cannot arise from pattern minting (new
        # Init-States keep a +-3 clearance); if it ever does, everyone waits.
        return []
    chains: list[list[int]] = []
    for i in idxs:
        s = int(i)
        if fires[(s - 1) % n]:
            continue
        chain = [s]
        j = (s + 1) % n
        while fires[j]:
            chain.append(j)
            j = (j + 1) % n
        chains.append(chain)
    return chains


def compute_round_plan(
    state: SimulationState,
    inputs: RoundInputs,
    view_provider,
) -> RoundPlan:
    """Decide every robot's action for this round from the snapshot.

    ``view_provider(i)`` yields robot i's view; geometric decisions are
    computed in that frame and mapped back, so the plan is identical
    (within tolerance) for any choice of private frames.
    """
    config = state.config
    tol = state.settings.tol
    n = config.n

    if n <= 5:
        actions = {}
        for i in range(n):
            view = view_provider(i)
            visible = [view.pos(k) for k in range(-4, 5)]
            target = view.to_global(endgame_target(Point2(0.0, 0.0), visible, tol))
            actions[i] = MoveAction(kind=MoveKind.ENDGAME, targets={0: target})
        return RoundPlan(
            actions=actions, pair_of={}, starts=[], mints={}, exceptional=[], endgame=True
        )

    actions: dict[int, MoveAction] = {}
    pair_of: dict[int, int] = {}
    run_dir = inputs.run_dir

    # 1. classify tokens into joint pairs / isolated runs
    holders = [i for i in range(n) if run_dir[i] != 0]
    paired: set[int] = set()
    for i in holders:
        j = (i + 1) % n
        if run_dir[i] == 1 and run_dir[j] == -1:
            pair_of[i] = j
            pair_of[j] = i
            paired.update((i, j))
    for i in holders:
        j = (i + 1) % n
        if run_dir[j] != 0 and pair_of.get(i) != j and pair_of.get(j) != i:
            raise InvariantViolation(
                "run-validity",
                config.round,
                f"adjacent runs at {i},{j} are not a joint pair",
            )

    for i in sorted(pair_of):
        if run_dir[i] != 1:
            continue  # each pair is decided from its successor-facing robot
        view = view_provider(i)
        act = joint_pair_decision(view, tol)
        targets = {off: view.to_global(p) for off, p in act.targets.items()}
        actions[i] = replace(act, targets=targets)

    for i in holders:
        if i in paired:
            continue
        view = view_provider(i)
        act = isolated_run_decision(view, int(run_dir[i]), tol)
        targets = {off: view.to_global(p) for off, p in act.targets.items()}
        actions[i] = replace(act, targets=targets)

    # 2. run generation.  Starts are accepted greedily (scan origin rotates
    # with the round); an accepted start reserves a zone of the ring, and a
    # later candidate overlapping a reserved zone is skipped, its holder
    # simply waiting for the next phase.  Phase-aligned holders otherwise
    # launch converging runs that collide and annihilate before they can
    # deliver a shorten; the spacing keeps same-round cohorts apart.
    starts: list[StartPlan] = []
    reserved: set[int] = set()
    chains = _fire_chains(inputs.fires)
    if chains:
        scan = config.round % n
        chains.sort(key=lambda ch: (ch[0] - scan) % n)

    def _accept(span: tuple[int, ...]) -> bool:
        if any(j in reserved for j in span):
            return False
        for j in span:
            for k in range(-START_SPACING, START_SPACING + 1):
                reserved.add((j + k) % n)
        return True

    for chain in chains:
        if len(chain) == 1:
            h = chain[0]
            view = view_provider(h)
            chord = view.dist(-1, 1)
            if chord <= 1.0 + tol.eps_len:
                act = MoveAction(
                    kind=MoveKind.MERGE,
                    case=1,
                    targets={0: view.to_global(view.pos(1))},
                    light_effects=("stop-run", "block-neighborhood", "pass-init"),
                    pre_lens=(view.dist(-1, 0), view.dist(0, 1), chord),
                    is_start=True,
                )
                starts.append(StartPlan(indices=(h,), action=act, token_specs=()))
            else:
                if not _accept(((h - 1) % n, h, (h + 1) % n)):
                    continue
                target = view.to_global(shorten_target(view.pos(-1), view.pos(1)))
                act = MoveAction(
                    kind=MoveKind.SHORTEN,
                    targets={0: target},
                    pre_lens=(view.dist(-1, 0), view.dist(0, 1), chord),
                    is_start=True,
                )
                p_prev = view.to_global(view.pos(-1))
                p_next = view.to_global(view.pos(1))
                half = ((p_next.x - p_prev.x) / 2.0, (p_next.y - p_prev.y) / 2.0)
                starts.append(
                    StartPlan(
                        indices=(h,),
                        action=act,
                        token_specs=(
                            ((h + 1) % n, 1, half),
                            ((h - 1) % n, -1, (-half[0], -half[1])),
                        ),
                    )
                )
        else:
            a, b = chain[0], chain[1]
            view = view_provider(a)
            chord = view.dist(-1, 2)
            if chord <= 2.0 + tol.eps_len:
                m = view.to_global(joint_merge_target(view.pos(-1), view.pos(2)))
                act = MoveAction(
                    kind=MoveKind.JOINT_MERGE,
                    case=1,
                    targets={0: m, 1: m},
                    light_effects=("stop-run", "block-neighborhood", "pass-init"),
                    pre_lens=(
                        view.dist(-1, 0), view.dist(0, 1), view.dist(1, 2), chord,
                    ),
                    is_start=True,
                )
                starts.append(StartPlan(indices=(a, b), action=act, token_specs=()))
            else:
                if not _accept(((a - 1) % n, a, b, (b + 1) % n)):
                    continue
                ta, tb = joint_shorten_targets(
                    view.pos(-1), view.pos(0), view.pos(1), view.pos(2)
                )
                act = MoveAction(
                    kind=MoveKind.JOINT_SHORTEN,
                    targets={0: view.to_global(ta), 1: view.to_global(tb)},
                    pre_lens=(
                        view.dist(-1, 0), view.dist(0, 1), view.dist(1, 2), chord,
                    ),
                    is_start=True,
                )
                p_prev = view.to_global(view.pos(-1))
                p_next = view.to_global(view.pos(2))
                third = ((p_next.x - p_prev.x) / 3.0, (p_next.y - p_prev.y) / 3.0)
                starts.append(
                    StartPlan(
                        indices=(a, b),
                        action=act,
                        token_specs=(
                            ((b + 1) % n, 1, third),
                            ((a - 1) % n, -1, (-third[0], -third[1])),
                        ),
                    )
                )

    # 3. symmetric moves
    started = {i for plan in starts for i in plan.indices}
    for i in range(n):
        if inputs.isogonal[i] == IsogonalKind.NOT_ISOGONAL:
            continue
        if inputs.init_in_n[i] or inputs.run_in_n[i] or i in started:
            continue
        view = view_provider(i)
        if inputs.isogonal[i] == IsogonalKind.EQUAL_LENGTHS:
            target = bisector_op_target(view.pos(-1), view.pos(0), view.pos(1), tol)
            actions[i] = MoveAction(
                kind=MoveKind.BISECTOR_OP,
                targets={0: view.to_global(target)},
                light_effects=("set-symmetric-moved",),
            )
        else:
            if state.settings.check_invariants:
                circle = star_circle(view.pos(-1), view.pos(0), view.pos(1), tol)
                for k in (-4, -3, -2, 2, 3, 4):
                    if abs(distance(circle.center, view.pos(k)) - circle.radius) > 1e-6:
                        raise InvariantViolation(
                            "star-window-circle",
                            config.round,
                            f"robot {i}: +-4 window off its circle",
                        )
            target = star_op_target(view.pos(-1), view.pos(0), view.pos(1), tol)
            actions[i] = MoveAction(
                kind=MoveKind.STAR_OP,
                targets={0: view.to_global(target)},
                light_effects=("set-symmetric-moved",),
            )

    # 4. pattern mints and exceptional Init-States (merging robots skip both)
    merging = _merging_indices(actions, pair_of, starts, n)
    mints = {
        i: (int(inputs.mint_family[i]), int(inputs.mint_variant[i]))
        for i in range(n)
        if inputs.mint_family[i] != 0 and i not in merging
    }
    exceptional = [
        i
        for i in range(n)
        if config.sym_moved[i]
        and inputs.isogonal[i] == IsogonalKind.NOT_ISOGONAL
        and config.init_kind[i] == InitKind.NONE
        and i not in merging
        and i not in mints
    ]
    return RoundPlan(
        actions=actions,
        pair_of=pair_of,
        starts=starts,
        mints=mints,
        exceptional=exceptional,
    )


def _merging_indices(
    actions: dict[int, MoveAction],
    pair_of: dict[int, int],
    starts: list[StartPlan],
    n: int,
) -> set[int]:
    merging: set[int] = set()
    for i, act in actions.items():
        if act.kind == MoveKind.MERGE and act.case == 1:
            merging.add(i)
        elif act.kind == MoveKind.JOINT_MERGE:
            merging.add(i)
            merging.add(pair_of.get(i, (i + 1) % n))
    for plan in starts:
        if plan.action.kind in (MoveKind.MERGE, MoveKind.JOINT_MERGE):
            merging.update(plan.indices)
    return merging


# --- commit -----------------------------------------------------------------------


def step(state: SimulationState) -> tuple[SimulationState, RoundTrace]:
    """Execute one synchronous round and return the new state plus its trace."""
    config = state.config
    if is_gathered(config, state.settings.tol.eps_gather):
        raise AlreadyGathered(f"configuration gathered at round {config.round}")
    inputs = gather_inputs_array(state)
    run_dir = inputs.run_dir

    def provider(i: int) -> LocalView:
        return local_view(config, run_dir, i, frame_seed=0)

    plan = compute_round_plan(state, inputs, provider)
    return commit_round_plan(state, plan)


def commit_round_plan(
    state: SimulationState, plan: RoundPlan
) -> tuple[SimulationState, RoundTrace]:
    config = state.config
    settings = state.settings
    tol = settings.tol
    n = config.n
    run_dir = _run_dir_array(state)
    length_before = chain_length(config)
    events: list[TraceEvent] = []
    counters = _fresh_counters()
    idx_of = {int(rid): i for i, rid in enumerate(config.ids)}
    token_at: dict[int, RunToken] = {idx_of[rid]: t for rid, t in state.tokens.items()}

    targets: dict[int, tuple[float, float]] = {}
    merge_pairs: list[tuple[int, int]] = []  # (loser idx, survivor idx)
    merge_blocks: list[tuple[int, int]] = []  # participant pairs for N-effects
    init_passes: list[tuple[int, int, int]] = []  # (merging idx, direction, recipient)
    stopped_tokens: set[int] = set()
    moved_tokens: dict[int, int] = {}  # holder index -> landing index
    created: list[tuple[int, int, tuple[float, float]]] = []

    def emit(robot_idx: int, op: str, pre_lens: tuple[float, ...] = ()) -> None:
        events.append(TraceEvent(robot=int(config.ids[robot_idx]), op=op, pre_lens=pre_lens))

    if plan.endgame:
        for i, act in plan.actions.items():
            t = act.targets[0]
            targets[i] = (t.x, t.y)
            emit(i, "endgame")
        counters["endgame_moves"] = n
        stopped_tokens.update(token_at)
        counters["runs_stopped"] += len(token_at)
    else:
        for i, act in sorted(plan.actions.items()):
            if act.kind in (MoveKind.BISECTOR_OP, MoveKind.STAR_OP):
                t = act.targets[0]
                targets[i] = (t.x, t.y)
                sym = act.kind == MoveKind.BISECTOR_OP
                counters["bisector_ops" if sym else "star_ops"] += 1
                emit(i, "bisector" if sym else "star")
                continue
            partner = plan.pair_of.get(i)
            if partner is not None:
                _commit_pair_action(
                    config, i, partner, act, targets, merge_pairs, merge_blocks,
                    init_passes, stopped_tokens, moved_tokens, counters, emit,
                )
            else:
                _commit_isolated_action(
                    config, i, int(run_dir[i]), act, targets, merge_pairs,
                    merge_blocks, init_passes, stopped_tokens, moved_tokens,
                    counters, emit,
                )

        for sp in plan.starts:
            act = sp.action
            if act.kind == MoveKind.MERGE:
                h = sp.indices[0]
                s = (h + 1) % n
                targets[h] = (act.targets[0].x, act.targets[0].y)
                merge_pairs.append((h, s))
                merge_blocks.append((h, s))
                init_passes.append((h, 1, s))
                counters["merges"] += 1
                emit(h, "merge", act.pre_lens)
            elif act.kind == MoveKind.JOINT_MERGE:
                a, b = sp.indices
                survivor, loser = (a, b) if config.ids[a] < config.ids[b] else (b, a)
                t = act.targets[0]
                targets[survivor] = (t.x, t.y)
                merge_pairs.append((loser, survivor))
                merge_blocks.append((a, b))
                init_passes.append((a, 1, survivor))
                init_passes.append((b, -1, survivor))
                counters["merges"] += 1
                emit(a, "joint_merge", act.pre_lens)
            elif act.kind == MoveKind.SHORTEN:
                h = sp.indices[0]
                targets[h] = (act.targets[0].x, act.targets[0].y)
                counters["shortens_start"] += 1
                counters["runs_started"] += len(sp.token_specs)
                created.extend(sp.token_specs)
                emit(h, "shorten_start", act.pre_lens)
            else:  # joint shorten start
                a, b = sp.indices
                targets[a] = (act.targets[0].x, act.targets[0].y)
                targets[b] = (act.targets[1].x, act.targets[1].y)
                counters["joint_shortens_start"] += 1
                counters["runs_started"] += len(sp.token_specs)
                created.extend(sp.token_specs)
                emit(a, "joint_shorten_start", act.pre_lens)

    # merge side effects: stop every run near a merging pair, block the zone
    blocked_zone: set[int] = set()
    for a, b in merge_blocks:
        for base in (a, b):
            for k in range(-NEIGHBORHOOD, NEIGHBORHOOD + 1):
                blocked_zone.add((base + k) % n)
    for i in list(token_at):
        if i in blocked_zone and i not in stopped_tokens:
            stopped_tokens.add(i)
            moved_tokens.pop(i, None)
            counters["runs_stopped"] += 1

    leftover = set(token_at) - stopped_tokens - set(moved_tokens)
    if leftover:
        raise InvariantViolation(
            "token-unhandled", config.round, f"tokens at {sorted(leftover)} undecided"
        )

    # resolve token landings; same-robot collisions annihilate all arrivals
    landings: dict[int, list[tuple[str, object]]] = {}
    for i, dest in moved_tokens.items():
        landings.setdefault(dest, []).append(("moved", i))
    for dest, direction, vec in created:
        landings.setdefault(dest, []).append(("created", (direction, vec)))
    final_landings: dict[int, tuple[str, object]] = {}
    for dest, arrivals in sorted(landings.items()):
        if len(arrivals) > 1:
            counters["runs_stopped"] += len(arrivals)
        else:
            final_landings[dest] = arrivals[0]

    # --- next round's light arrays (still on the old indexing) -----------------
    init_kind, blocked, phase, sym_moved = config.copy_lights_arrays()
    had_init = config.init_kind != InitKind.NONE
    phase[had_init] = (phase[had_init] + 1) % INIT_PERIOD
    blocked[blocked > 0] -= 1
    for i in blocked_zone:
        blocked[i] = BLOCK_ROUNDS

    merging_all = {i for pair in merge_blocks for i in pair}
    pass_grants: list[int] = []
    for h, direction, recipient in init_passes:
        if config.init_kind[h] == InitKind.NONE:
            continue
        c2 = (h + 2 * direction) % n
        c3 = (h + 3 * direction) % n
        if (
            config.init_kind[c2] == InitKind.NONE
            and c2 not in merging_all
            and config.init_kind[c3] != InitKind.NONE
        ):
            pass_grants.append(recipient)
        init_kind[h] = InitKind.NONE
        phase[h] = 0
    passed_targets: list[int] = []
    for recipient in pass_grants:
        if init_kind[recipient] == InitKind.NONE:
            init_kind[recipient] = InitKind.SINGLE
            phase[recipient] = 0
            passed_targets.append(recipient)

    if not plan.endgame:
        mint_set = set(plan.mints)
        for i in sorted(plan.mints):
            family, _variant = plan.mints[i]
            succ, pred = (i + 1) % n, (i - 1) % n
            if succ in mint_set and pred in mint_set:
                raise InvariantViolation(
                    "init-spacing", config.round, f"three adjacent mints around {i}"
                )
            if succ in mint_set:
                if plan.mints[succ][0] != family:
                    raise InvariantViolation(
                        "mint-family", config.round,
                        f"adjacent mints at {i},{succ} of different families",
                    )
                init_kind[i] = InitKind.JOINT_WITH_SUCCESSOR
            elif pred in mint_set:
                init_kind[i] = InitKind.JOINT_WITH_PREDECESSOR
            else:
                init_kind[i] = InitKind.SINGLE
            phase[i] = 0
            counters["inits_minted"] += 1
        for i in plan.exceptional:
            init_kind[i] = InitKind.SINGLE
            phase[i] = 0
            counters["inits_exceptional"] += 1

    sym_now = np.zeros(n, dtype=bool)
    for i, act in plan.actions.items():
        if act.kind in (MoveKind.BISECTOR_OP, MoveKind.STAR_OP):
            sym_now[i] = True
            for nb in ((i - 1) % n, (i + 1) % n):
                if nb not in targets:
                    counters["sym_boundary"] += 1
    sym_moved[:] = sym_now

    # --- apply ------------------------------------------------------------------
    try:
        new_config = apply_round(
            config,
            targets,
            merge_pairs,
            new_lights=(init_kind, blocked, phase, sym_moved),
            tol=tol,
        )
    except ConnectivityBroken as exc:
        raise InvariantViolation("connectivity", config.round, str(exc)) from exc

    # Sequences of 3+ Init-States are prohibited; a merge can contract two
    # holders into adjacency with a third, so any holder flanked by holders
    # on both sides drops its state (evaluated simultaneously).
    m = new_config.n
    if m > 2:
        kinds = new_config.init_kind
        has = kinds != InitKind.NONE
        middle = has & np.roll(has, 1) & np.roll(has, -1)
        if middle.any():
            kinds[middle] = InitKind.NONE
            new_config.phase[middle] = 0

    # joint flags must keep pointing at a matching partner after contraction
    if m > 1:
        kinds = new_config.init_kind
        for i in range(m):
            if kinds[i] == InitKind.JOINT_WITH_SUCCESSOR:
                if kinds[(i + 1) % m] != InitKind.JOINT_WITH_PREDECESSOR:
                    kinds[i] = InitKind.SINGLE
            elif kinds[i] == InitKind.JOINT_WITH_PREDECESSOR:
                if kinds[(i - 1) % m] != InitKind.JOINT_WITH_SUCCESSOR:
                    kinds[i] = InitKind.SINGLE

    # --- next round's tokens ------------------------------------------------------
    retired = {loser for loser, _ in merge_pairs}
    new_tokens: dict[int, RunToken] = {}
    next_token_id = state.next_token_id
    for dest, (kind, payload) in sorted(final_landings.items()):
        if dest in retired:
            raise InvariantViolation(
                "token-into-merged", config.round,
                f"a run would land on retired ring index {dest}",
            )
        dest_id = int(config.ids[dest])
        if kind == "moved":
            tok = token_at[payload]  # type: ignore[index]
            new_tokens[dest_id] = tok.moved_to(dest_id)
        else:
            direction, vec = payload  # type: ignore[misc]
            new_tokens[dest_id] = RunToken(
                token_id=next_token_id,
                holder=dest_id,
                direction=direction,
                origin=dest_id,
                run_vector=vec,
                visited=(dest_id,),
                created_round=config.round + 1,
            )
            next_token_id += 1

    # --- provenance bookkeeping -----------------------------------------------------
    alive_with_init = {
        int(new_config.ids[i])
        for i in range(new_config.n)
        if new_config.init_kind[i] != InitKind.NONE
    }
    pattern_minted = {r for r in state.pattern_minted if r in alive_with_init}
    pattern_minted |= {int(config.ids[i]) for i in plan.mints}

    length_after = chain_length(new_config)
    trace = RoundTrace(
        round=config.round,
        n_before=n,
        n_after=new_config.n,
        length_before=length_before,
        length_after=length_after,
        events=tuple(events),
        counters=counters,
        seed=state.rng_seed,
    )
    new_state = SimulationState(
        config=new_config,
        tokens=new_tokens,
        settings=settings,
        rng_seed=state.rng_seed,
        pattern_minted=frozenset(pattern_minted),
        next_token_id=next_token_id,
    )
    if settings.check_invariants:
        _check_round_invariants(new_state, trace)
    return new_state, trace


def _commit_isolated_action(
    config, i, direction, act, targets, merge_pairs, merge_blocks,
    init_passes, stopped_tokens, moved_tokens, counters, emit,
) -> None:
    n = config.n
    if act.kind == MoveKind.MERGE:
        s = (i + direction) % n
        targets[i] = (act.targets[0].x, act.targets[0].y)
        merge_pairs.append((i, s))
        merge_blocks.append((i, s))
        init_passes.append((i, direction, s))
        stopped_tokens.add(i)
        counters["merges"] += 1
        counters["runs_stopped"] += 1
        emit(i, "merge", act.pre_lens)
    elif act.kind == MoveKind.PASS_ONLY:
        moved_tokens[i] = (i + direction) % n
        counters["passes"] += 1
        emit(i, "pass", act.pre_lens)
    elif act.kind == MoveKind.SHORTEN:
        targets[i] = (act.targets[0].x, act.targets[0].y)
        stopped_tokens.add(i)
        counters[_shorten_counter(act.pre_lens)] += 1
        counters["runs_stopped"] += 1
        emit(i, "shorten", act.pre_lens)
    else:  # HOP
        targets[i] = (act.targets[0].x, act.targets[0].y)
        moved_tokens[i] = (i + direction) % n
        counters["hops"] += 1
        emit(i, "hop", act.pre_lens)


def _commit_pair_action(
    config, a, b, act, targets, merge_pairs, merge_blocks,
    init_passes, stopped_tokens, moved_tokens, counters, emit,
) -> None:
    n = config.n
    if act.kind == MoveKind.JOINT_MERGE:
        survivor, loser = (a, b) if config.ids[a] < config.ids[b] else (b, a)
        t = act.targets[0]
        targets[survivor] = (t.x, t.y)
        merge_pairs.append((loser, survivor))
        merge_blocks.append((a, b))
        init_passes.append((a, 1, survivor))
        init_passes.append((b, -1, survivor))
        stopped_tokens.update((a, b))
        counters["merges"] += 1
        counters["runs_stopped"] += 2
        emit(a, "joint_merge", act.pre_lens)
    elif act.kind == MoveKind.JOINT_SHORTEN:
        targets[a] = (act.targets[0].x, act.targets[0].y)
        targets[b] = (act.targets[1].x, act.targets[1].y)
        stopped_tokens.update((a, b))
        counters["joint_shortens"] += 1
        counters["runs_stopped"] += 2
        emit(a, "joint_shorten", act.pre_lens)
    elif act.kind == MoveKind.SHORTEN:
        # cases 3/4: one partner shortens, both runs stop
        mover, off = (a, 0) if 0 in act.targets else (b, 1)
        targets[mover] = (act.targets[off].x, act.targets[off].y)
        stopped_tokens.update((a, b))
        counters[_shorten_counter(act.pre_lens)] += 1
        counters["runs_stopped"] += 2
        emit(mover, "shorten", act.pre_lens)
    else:  # JOINT_HOP: both runs skip the next robot in their direction
        targets[a] = (act.targets[0].x, act.targets[0].y)
        targets[b] = (act.targets[1].x, act.targets[1].y)
        moved_tokens[a] = (a + 2) % n
        moved_tokens[b] = (b - 2) % n
        counters["joint_hops"] += 1
        emit(a, "joint_hop", act.pre_lens)


def _shorten_counter(pre_lens: tuple[float, ...]) -> str:
    if len(pre_lens) >= 2 and pre_lens[0] >= 0.5 - 1e-9 and pre_lens[1] >= 0.5 - 1e-9:
        return "shortens_large"
    return "shortens_mixed"


def _fresh_counters() -> dict[str, int]:
    return {
        key: 0
        for key in (
            "merges",
            "shortens_large",
            "shortens_mixed",
            "shortens_start",
            "joint_shortens",
            "joint_shortens_start",
            "hops",
            "joint_hops",
            "passes",
            "bisector_ops",
            "star_ops",
            "endgame_moves",
            "runs_started",
            "runs_stopped",
            "inits_minted",
            "inits_exceptional",
            "sym_boundary",
        )
    }


def _check_round_invariants(new_state: SimulationState, trace: RoundTrace) -> None:
    from . import verify

    for check in (
        verify.check_connectivity(new_state.config, new_state.settings.tol),
        verify.check_run_validity(new_state),
        verify.check_init_spacing(new_state),
        verify.check_no_revisit(list(new_state.tokens.values()), new_state.config.n),
    ):
        if check is not None:
            raise InvariantViolation(check.name, trace.round, check.detail)


def run_until(state: SimulationState, max_rounds: int, on_round=None) -> RunResult:
    """Iterate rounds until gathered or the round budget runs out."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    traces: list[RoundTrace] = []
    for _ in range(max_rounds):
        if is_gathered(state.config, state.settings.tol.eps_gather):
            return RunResult(True, state.config.round, state, traces)
        state, trace = step(state)
        traces.append(trace)
        if on_round is not None:
            on_round(state, trace)
    if is_gathered(state.config, state.settings.tol.eps_gather):
        return RunResult(True, state.config.round, state, traces)
    return RunResult(False, state.config.round, state, traces)


def new_simulation(
    positions, settings: Settings | None = None, rng_seed: int = 0
) -> SimulationState:
    settings = settings or Settings()
    config = build_chain(positions, settings.tol)
    return SimulationState(config=config, settings=settings, rng_seed=rng_seed)
