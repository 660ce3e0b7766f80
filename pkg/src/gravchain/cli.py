"""Command line: ``gravchain run | validate | report``.

Exit codes: 0 success, 1 scenario validation failure, 2 runtime error.
The seed may also come from the ``GRAVCHAIN_SEED`` environment variable.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import ConfigError, ValidationError
from .scenario import generate_north_zone, parse_scenario, read_metrics, write_metrics, write_trace
from .sim import run

SEED_ENV = "GRAVCHAIN_SEED"


def _seed_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError("expected a..b")
    return list(range(int(lo), int(hi) + 1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gravchain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a scenario")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("scenario", nargs="?", type=Path, help="scenario file")
    src.add_argument("--north-zone", action="store_true", help="use the built-in North Zone scenario")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--seeds", type=_seed_range, default=None, help="sweep seeds a..b, one subdirectory each")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--max-ticks", type=int, default=None)
    r.add_argument("--out", type=Path, required=True)
    r.add_argument("--quiet", action="store_true")

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario", type=Path)

    rep = sub.add_parser("report", help="summarise a metrics.csv")
    rep.add_argument("metrics", type=Path)
    rep.add_argument("--plot-data", type=Path, default=None,
                     help="write tick/unmet_deficit/messages columns to this file")
    return p


def _run_one(scenario_text: str | None, north_zone: bool, seed: int, max_ticks, out: Path, quiet: bool) -> dict:
    scenario = generate_north_zone(seed) if north_zone else parse_scenario(scenario_text)

    def progress(world):
        if not quiet and world.clock % 50 == 0:
            print(f"[seed {seed}] tick {world.clock} unmet={world.history[-1].unmet_deficit}", file=sys.stderr)

    result = run(scenario, seed, max_ticks, progress=progress)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text(write_metrics(result.history))
    (out / "trace.log").write_text(write_trace(result.trace))
    last = result.history[-1] if result.history else result.initial
    w = result.world
    return {"seed": seed, "ticks": w.clock, "transferred": w.total_transferred,
            "cost": w.total_cost, "unmet": last.unmet_deficit, "messages": w.total_messages}


def _cmd_run(args) -> int:
    text = None if args.north_zone else args.scenario.read_text()
    if text is not None:
        parse_scenario(text)
    if args.seeds is not None:
        seeds = args.seeds
    else:
        env = os.environ.get(SEED_ENV)
        seeds = [args.seed if args.seed is not None else int(env) if env else 0]
    sweep = args.seeds is not None
    jobs = [(text, args.north_zone, s, args.max_ticks, args.out / f"seed_{s}" if sweep else args.out, args.quiet)
            for s in seeds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            summaries = list(pool.map(_run_one, *zip(*jobs)))
    else:
        summaries = [_run_one(*j) for j in jobs]
    for s in summaries:
        print(f"seed={s['seed']} ticks={s['ticks']} transferred={s['transferred']} "
              f"cost={s['cost']:.2f} unmet_deficit={s['unmet']} messages={s['messages']}")
    return 0


def _cmd_validate(args) -> int:
    scenario = parse_scenario(args.scenario.read_text())
    print(f"{args.scenario}: ok ({len(scenario.centers)} centers, {len(scenario.commodities)} commodities)")
    return 0


def _cmd_report(args) -> int:
    rows = read_metrics(args.metrics.read_text())
    if not rows:
        print("no ticks recorded")
        return 0
    last = rows[-1]
    print(f"ticks: {last.tick}")
    print(f"total transferred: {sum(r.transferred for r in rows)}")
    print(f"total cost: {sum(r.cost for r in rows):.2f}")
    print(f"messages: {sum(r.messages for r in rows)}")
    print(f"peak clusters: {max(r.clusters for r in rows)}")
    print(f"final unmet_deficit: {last.unmet_deficit}")
    if args.plot_data is not None:
        lines = ["tick unmet_deficit messages"]
        lines += [f"{r.tick} {r.unmet_deficit} {r.messages}" for r in rows]
        args.plot_data.write_text("\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate, "report": _cmd_report}[args.command]
    try:
        return handler(args)
    except ValidationError as exc:
        for line, msg in exc.errors:
            print(f"{getattr(args, 'scenario', '')}:{line if line is not None else '-'}: {msg}", file=sys.stderr)
        return 1
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
