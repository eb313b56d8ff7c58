"""Command-line front end: ``netsteer {eval,sweep,sample,presets}``."""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import NetsteerError
from .presets import list_presets
from .sampling import ShotPlan, estimate_criterion, sample
from .scenario import Scenario

EXIT_USAGE = 2


def worker_count() -> int:
    raw = os.environ.get("NETSTEER_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise NetsteerError(f"NETSTEER_THREADS must be an integer, got {raw!r}") from None
    return min(8, os.cpu_count() or 1)


def _report_dict(sc: Scenario) -> dict:
    report = sc.build().evaluate(scenario=sc.name)
    out = {"version": __version__, "scenario_hash": sc.hash}
    out.update(report.to_dict())
    return out


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text(report: dict) -> str:
    lines = [
        f"scenario:   {report['scenario']} ({report['scenario_hash'][:12]})",
        f"criterion:  {report['criterion']}",
        f"value:      {report['value']:.12g}",
        f"bound:      {report['bound']:.12g} ({report['bound_provenance']})",
        f"ratio:      {report['ratio']:.12g}",
        f"violated:   {'yes' if report['violated'] else 'no'}",
    ]
    for label, v in report["terms"].items():
        lines.append(f"  <{label}> = {v:.12g}")
    lines += [f"note: {note}" for note in report["notes"]]
    lines.append(f"netsteer {report['version']}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    report = _report_dict(Scenario.load(args.scenario))
    sys.stdout.write(_dump(report) if args.format == "json" else _text(report))
    return 0


def fmt(x) -> str:
    """CSV number: integers verbatim, reals with 12 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), "#.12g")


def sweep_rows(sc: Scenario, param: str, start: float, stop: float, steps: int) -> list[tuple]:
    if steps < 1:
        raise NetsteerError("--steps must be at least 1")
    sc.get(param)
    grid = [start] if steps == 1 else list(np.linspace(start, stop, steps))

    def row(x):
        point = sc.with_value(param, float(x))
        rep = point.build().evaluate(scenario=point.name)
        return point.get(param), rep.value, rep.bound, rep.ratio, rep.violated

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(row, grid))


def sweep_csv(param: str, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(f"{param},value,bound,ratio,violated\n")
    for p, value, bound, ratio, violated in rows:
        buf.write(",".join((fmt(p), fmt(value), fmt(bound), fmt(ratio), "true" if violated else "false")) + "\n")
    return buf.getvalue()


def cmd_sweep(args) -> int:
    sc = Scenario.load(args.scenario)
    text = sweep_csv(args.param, sweep_rows(sc, args.param, args.start, args.stop, args.steps))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return 0


def sample_report(sc: Scenario, shots: int | None = None, seed: int | None = None) -> dict:
    plan = sc.shot_plan
    if plan is None and shots is None:
        raise NetsteerError("shots: scenario has no shot plan; pass --shots")
    plan = ShotPlan(shots if shots is not None else plan.shots,
                    seed if seed is not None else (plan.seed if plan else 0))
    bundle = sc.build()
    crit = bundle.table_criterion()
    exact = bundle.correlations()
    value, stderr = estimate_criterion(sample(exact, plan), crit)
    return {
        "version": __version__,
        "scenario_hash": sc.hash,
        "scenario": sc.name,
        "criterion": crit.name,
        "shots": plan.shots,
        "seed": plan.seed,
        "value": value,
        "stderr": stderr,
        "exact_value": crit.value(exact),
        "bound": crit.bound,
        "bound_provenance": crit.bound_provenance,
        "violated": value > crit.bound + 1e-9,
    }


def cmd_sample(args) -> int:
    sys.stdout.write(_dump(sample_report(Scenario.load(args.scenario), args.shots, args.seed)))
    return 0


def cmd_presets(args) -> int:
    listing = list_presets()
    if args.format == "json":
        sys.stdout.write(_dump(listing))
        return 0
    for p in listing:
        sys.stdout.write(f"{p['name']:<18} {p['criterion']:<10} ratio {p['expected_ratio']:.6g}  {p['description']}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netsteer", description="Star-network steering criteria toolkit")
    parser.add_argument("--version", action="version", version=f"netsteer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep one numeric scenario field and write CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--param", required=True, help="dotted path, e.g. eta or sources.0.eta")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="finite-shot estimate of a scenario's criterion")
    p.add_argument("--scenario", required=True)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("presets", help="list packaged presets")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetsteerError as exc:
        print(f"netsteer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
