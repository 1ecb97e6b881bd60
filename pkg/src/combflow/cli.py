"""Command-line front end.

Every command is deterministic given --seed: fixed config means byte-identical
output.  Exit codes: 0 success, 1 verification failure or I/O failure, 2 usage
or parse errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .backbone import (
    FiniteUMS,
    star_metric,
    tree_distance,
    ums_from_csv_text,
    ums_to_csv_text,
)
from .bridges import flow_comb
from .chains import simulate_composition_chain, simulate_partition_chain
from .combs import Comb, sample_kingman_comb
from .evolve import evolving_kingman_step
from .paintbox import ordered_paintbox, paintbox_sample
from .rates import parse_lambda_spec
from .render import render_comb_svg
from .rng import make_rng
from .verify import SUITE_NAMES, run_suites, write_report

__all__ = ["main"]


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _require_format(args, allowed: tuple[str, ...]) -> None:
    if args.format not in allowed:
        raise ValueError(
            f"format {args.format!r} not supported by {args.command}; "
            f"choose from {', '.join(allowed)}"
        )


# ---------------------------------------------------------------------------
# commands


def _cmd_kingman_comb(args) -> int:
    _require_format(args, ("json", "csv", "svg"))
    comb = sample_kingman_comb(make_rng(args.seed), args.n_teeth)
    if args.format == "json":
        text = _json_text(comb.to_dict())
    elif args.format == "csv":
        assert comb.teeth is not None
        rows = [f"{t.position!r},{t.height!r}" for t in comb.teeth]
        text = "position,height\n" + "\n".join(rows) + "\n"
    else:
        text = render_comb_svg(comb)
    _write(args.out, text)
    return 0


def _cmd_lambda_sim(args) -> int:
    _require_format(args, ("json",))
    measure = parse_lambda_spec(args.lam)
    rng = make_rng(args.seed)
    if args.ordered:
        traj = simulate_composition_chain(measure, args.n, rng)
    else:
        traj = simulate_partition_chain(measure, args.n, rng)
    _write(args.out, _json_text(traj.to_dict()))
    return 0


def _cmd_paintbox(args) -> int:
    _require_format(args, ("json",))
    rng = make_rng(args.seed)
    if args.comb is not None:
        comb = Comb.from_dict(json.loads(_read(args.comb)))
    else:
        comb = sample_kingman_comb(rng, args.n_teeth)
    if args.ordered:
        traj = ordered_paintbox(comb, args.n, rng)
    else:
        traj = paintbox_sample(comb, args.n, rng)
    _write(args.out, _json_text(traj.to_dict()))
    return 0


def _cmd_lambda_comb(args) -> int:
    _require_format(args, ("json", "svg"))
    measure = parse_lambda_spec(args.lam)
    times = [float(x) for x in args.times.split(",") if x.strip()]
    comb = flow_comb(measure, times, args.m, make_rng(args.seed))
    text = _json_text(comb.to_dict()) if args.format == "json" else render_comb_svg(comb)
    _write(args.out, text)
    return 0


def _cmd_evolve(args) -> int:
    _require_format(args, ("json", "svg"))
    if args.steps < 1:
        raise ValueError("need at least one step")
    rng = make_rng(args.seed)
    comb = sample_kingman_comb(rng, args.n_teeth)
    records = []
    for _ in range(args.steps):
        comb, record = evolving_kingman_step(comb, args.s, rng)
        records.append(record.to_dict())
    if args.format == "json":
        text = _json_text({"final": comb.to_dict(), "steps": records})
    else:
        text = render_comb_svg(comb)
    _write(args.out, text)
    return 0


def _load_space(path: str) -> FiniteUMS:
    text = _read(path)
    if text.lstrip().startswith("{"):
        return FiniteUMS.from_dict(json.loads(text))
    return ums_from_csv_text(text)


def _cmd_backbone(args) -> int:
    _require_format(args, ("json", "csv"))
    space = _load_space(args.space)
    star = star_metric(space)
    if args.format == "csv":
        text = ums_to_csv_text(FiniteUMS(star, space.weights))
    else:
        f = space.heights
        n = space.n
        backbone = [
            [
                tree_distance(float(space.dist[i, j]), float(f[i]), float(f[j]))
                for j in range(n)
            ]
            for i in range(n)
        ]
        text = _json_text(
            {"heights": f.tolist(), "star": star.tolist(), "backbone": backbone}
        )
    _write(args.out, text)
    return 0


def _cmd_verify(args) -> int:
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    out_dir = args.out if args.out != "-" else "verify-out"
    reports = run_suites(names, out_dir, args.seed)
    all_passed = write_report(reports, out_dir, args.seed)
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.name}: statistic={r.statistic:.6g} threshold={r.threshold:.6g}")
    print(f"report written to {out_dir}/report.json")
    return 0 if all_passed else 1


def _cmd_render(args) -> int:
    comb = Comb.from_dict(json.loads(_read(args.comb_file)))
    _write(args.out, render_comb_svg(comb))
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    common.add_argument(
        "--out", default="-", help="output path, '-' for stdout (verify: directory)"
    )
    common.add_argument(
        "--format",
        choices=("json", "csv", "svg"),
        default="json",
        help="output format where the command supports a choice",
    )

    parser = argparse.ArgumentParser(
        prog="combflow",
        description="Sample, evolve, verify and render nested interval-partitions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kingman-comb", parents=[common], help="sample a Kingman comb")
    p.add_argument("--n-teeth", type=int, default=500)
    p.set_defaults(func=_cmd_kingman_comb)

    p = sub.add_parser("lambda-sim", parents=[common], help="run a merger chain")
    p.add_argument("--lam", default="kingman", help="measure spec, e.g. beta:2,2")
    p.add_argument("--n", type=int, default=10, help="number of starting blocks")
    p.add_argument("--ordered", action="store_true", help="composition chain")
    p.set_defaults(func=_cmd_lambda_sim)

    p = sub.add_parser("paintbox", parents=[common], help="sample a paintbox coalescent")
    p.add_argument("--n", type=int, default=10, help="number of sampled points")
    p.add_argument("--n-teeth", type=int, default=500)
    p.add_argument("--comb", default=None, help="comb JSON file (default: sample fresh)")
    p.add_argument("--ordered", action="store_true", help="keep block order")
    p.set_defaults(func=_cmd_paintbox)

    p = sub.add_parser("lambda-comb", parents=[common], help="comb of the bridge flow")
    p.add_argument("--lam", default="kingman")
    p.add_argument("--m", type=int, default=100, help="resolution (blocks at time 0)")
    p.add_argument("--times", default="0,0.25,0.5,0.75,1", help="comma-separated grid")
    p.set_defaults(func=_cmd_lambda_comb)

    p = sub.add_parser("evolve", parents=[common], help="evolve a Kingman comb")
    p.add_argument("--n-teeth", type=int, default=500)
    p.add_argument("--s", type=float, default=0.3, help="step size")
    p.add_argument("--steps", type=int, default=1)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("backbone", parents=[common], help="heights and star metric")
    p.add_argument("space", help="FiniteUMS file (JSON or CSV)")
    p.set_defaults(func=_cmd_backbone)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("render", parents=[common], help="render a comb JSON to SVG")
    p.add_argument("comb_file", help="comb JSON file")
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must fit in 64 unsigned bits", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
