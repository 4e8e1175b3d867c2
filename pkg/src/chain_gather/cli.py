"""Command-line entry points: generate configurations, simulate, verify traces.

Exit codes: 0 ok, 2 usage/parse error, 3 timeout, 4 invariant or ledger
violation.  Configuration files are JSON (``chain-gather/1``); traces are
JSON Lines, one record per round.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators
from .chain import InitKind
from .engine import (
    InvariantViolation,
    Settings,
    SimulationState,
    new_simulation,
    run_until,
)
from .geometry import Point2
from .tolerances import Tolerances
from .verify import MalformedTrace, audit_progress, record_to_trace, trace_to_record

CONFIG_FORMAT = "chain-gather/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_VIOLATION = 4


class CliError(Exception):
    pass


def write_config(points: list[Point2], path: str | Path) -> None:
    payload = {
        "format": CONFIG_FORMAT,
        "positions": [[p.x, p.y] for p in points],
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def read_config(path: str | Path) -> list[Point2]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CONFIG_FORMAT:
        raise CliError(f"{path}: unknown configuration format (want {CONFIG_FORMAT!r})")
    try:
        return [Point2(float(x), float(y)) for x, y in payload["positions"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: malformed positions: {exc}") from exc


def _cmd_generate(args: argparse.Namespace) -> int:
    try:
        if args.kind == "star":
            points = generators.regular_star(args.n, args.d, args.edge)
        elif args.kind == "translated":
            points = generators.translated_isogonal(args.n, args.d, args.t, args.edge)
        elif args.kind == "perturbed":
            points = generators.perturbed_chain(
                args.n, args.edge, args.jitter, args.seed
            )
        elif args.kind == "line":
            points = generators.line_cycle(args.n, args.edge)
        else:  # gtc
            points = generators.gtc_lower_bound_cycle(args.n, args.edge)
    except generators.GeneratorError as exc:
        print(f"generate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_config(points, args.out)
    print(f"wrote {len(points)} positions to {args.out}")
    return EXIT_OK


def _light_color(init: InitKind, blocked: int, has_run: bool) -> str:
    if has_run:
        return "#d62728"  # run: red
    if init != InitKind.NONE:
        return "#1f77b4"  # init: blue
    if blocked > 0:
        return "#ff7f0e"  # blocked: orange
    return "#444444"


def render_frame_svg(state: SimulationState, path: Path) -> None:
    config = state.config
    xs, ys = config.xs, config.ys
    pad = 0.6
    x0, x1 = float(xs.min()) - pad, float(xs.max()) + pad
    y0, y1 = float(ys.min()) - pad, float(ys.max()) + pad
    span = max(x1 - x0, y1 - y0, 1e-6)
    scale = 600.0 / span

    def sx(x: float) -> float:
        return (x - x0) * scale

    def sy(y: float) -> float:
        return (y1 - y) * scale

    run_holders = set(state.tokens)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" '
        f'viewBox="0 0 {(x1 - x0) * scale:.1f} {(y1 - y0) * scale:.1f}">'
    ]
    n = config.n
    for i in range(n):
        j = (i + 1) % n
        parts.append(
            f'<line x1="{sx(xs[i]):.2f}" y1="{sy(ys[i]):.2f}" '
            f'x2="{sx(xs[j]):.2f}" y2="{sy(ys[j]):.2f}" '
            'stroke="#bbbbbb" stroke-width="1"/>'
        )
    for i in range(n):
        color = _light_color(
            InitKind(int(config.init_kind[i])),
            int(config.blocked[i]),
            int(config.ids[i]) in run_holders,
        )
        parts.append(
            f'<circle cx="{sx(xs[i]):.2f}" cy="{sy(ys[i]):.2f}" r="4" fill="{color}"/>'
        )
    parts.append(f'<text x="8" y="16" font-size="12">round {config.round}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts), encoding="utf-8")


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        points = read_config(args.config)
    except CliError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    settings = Settings(tol=Tolerances.from_env(), check_invariants=args.check)
    state = new_simulation(points, settings=settings, rng_seed=args.seed)
    n_initial = state.config.n

    trace_file = open(args.trace, "w", encoding="utf-8") if args.trace else None
    frames_dir = Path(args.frames_dir) if args.frames_every else None
    if frames_dir:
        frames_dir.mkdir(parents=True, exist_ok=True)
        render_frame_svg(state, frames_dir / "frame_000000.svg")

    totals: dict[str, int] = {}

    def on_round(new_state: SimulationState, trace) -> None:
        for key, val in trace.counters.items():
            totals[key] = totals.get(key, 0) + val
        if trace_file:
            trace_file.write(json.dumps(trace_to_record(trace)) + "\n")
        if frames_dir and (trace.round + 1) % args.frames_every == 0:
            render_frame_svg(
                new_state, frames_dir / f"frame_{trace.round + 1:06d}.svg"
            )

    try:
        result = run_until(state, args.max_rounds, on_round=on_round)
    except InvariantViolation as exc:
        if trace_file:
            trace_file.close()
        print(f"simulate: invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    finally:
        if trace_file and not trace_file.closed:
            trace_file.close()

    summary = {
        "n_initial": n_initial,
        "gathered": result.gathered,
        "rounds": result.rounds,
        "rounds_per_n": result.rounds / n_initial,
        "counters": {k: totals.get(k, 0) for k in sorted(totals)},
    }
    print(json.dumps(summary))
    if not result.gathered:
        print(
            f"simulate: not gathered within {args.max_rounds} rounds", file=sys.stderr
        )
        return EXIT_TIMEOUT
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    traces = []
    try:
        with open(args.trace, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedTrace(f"line {line_no}: {exc}") from exc
                traces.append(record_to_trace(record))
    except OSError as exc:
        print(f"verify: cannot read {args.trace}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedTrace as exc:
        print(f"verify: malformed trace: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        report = audit_progress(traces)
    except MalformedTrace as exc:
        print(f"verify: malformed trace: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(
        json.dumps(
            {
                "n_initial": report.n_initial,
                "rounds": report.rounds,
                "ledgers": report.ledgers,
                "violations": [str(v) for v in report.violations],
            }
        )
    )
    return EXIT_OK if report.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chain-gather",
        description="Simulate and verify gathering of a closed robot chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an initial configuration file")
    gen.add_argument("--kind", required=True,
                     choices=["star", "translated", "perturbed", "line", "gtc"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, default=1)
    gen.add_argument("--t", type=float, default=0.25,
                     help="translation parameter for --kind translated")
    gen.add_argument("--edge", type=float, default=1.0,
                     help="edge length / spacing, at most 1")
    gen.add_argument("--jitter", type=float, default=0.05)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=_cmd_generate)

    sim = sub.add_parser("simulate", help="run the gathering protocol")
    sim.add_argument("config")
    sim.add_argument("--max-rounds", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--trace", default=None, help="write a JSONL trace here")
    sim.add_argument("--check", dest="check", action="store_true", default=True)
    sim.add_argument("--no-check", dest="check", action="store_false",
                     help="disable inline invariant checking (benchmark mode)")
    sim.add_argument("--frames-every", type=int, default=0,
                     help="render an SVG frame every k rounds")
    sim.add_argument("--frames-dir", default="frames")
    sim.set_defaults(func=_cmd_simulate)

    ver = sub.add_parser("verify", help="audit a recorded trace")
    ver.add_argument("trace")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
