"""Command-line runner for the experiments and for JSON problem files.

Every subcommand writes ``report.json`` (deterministic for a given seed and
configuration), ``timing.json`` (wall-clock times), per-run traces and PNG
figures into ``--out``.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 a run hit its iteration cap before the proximity threshold.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, NonConvergence, NumericalDivergence

log = logging.getLogger("superiorization")

FULL_SCALE = {"M": 50, "n": 2840, "L": 2}
DESK_SCALE = {"M": 20, "n": 460, "L": 2}


# ---------------------------------------------------------------- output helpers

class Output:
    def __init__(self, out: str, fmt: str):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.fmt = fmt
        self.timing: dict[str, float] = {}
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def trace(self, name: str, trace) -> None:
        self.timing[name] = trace.wall_time
        if self.fmt == "csv":
            trace.to_csv(self.path(f"trace_{name}.csv"))
        else:
            rows = [dict(zip(trace.header(), row)) for row in trace.rows()]
            _write_json(self.path(f"trace_{name}.json"), rows)

    def grid(self, name: str, grid: np.ndarray) -> None:
        with open(self.path(f"heatmap_{name}.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in grid:
                writer.writerow(["" if np.isnan(v) else repr(float(v)) for v in row])

    def finish(self, report: dict) -> None:
        report = {**report, "files": sorted(set(self.files) | {"report.json", "timing.json"})}
        _write_json(self.dir / "report.json", report)
        _write_json(self.dir / "timing.json", self.timing)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigurationError("a config file must hold a JSON object")
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigurationError(f"unknown config keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    return cfg


def _summaries(traces: dict) -> dict:
    return {name: t.summary() for name, t in traces.items()}


def _figure(fn, *args) -> None:
    from . import plotting

    getattr(plotting, fn)(*args)


# ---------------------------------------------------------------- subcommands

def cmd_demo_guarantee(args, out: Output) -> int:
    from .experiments.guarantee import MIN_NORM_POINT, demo_guarantee_problem, guarantee_operator

    cfg = _load_config(args.config, {"start", "iterations", "alpha"})
    start = cfg.get("start", args.start)
    traces = demo_guarantee_problem(start, int(cfg.get("iterations", args.iterations)),
                                    float(cfg.get("alpha", 0.5)), args.trace)
    for name, t in traces.items():
        out.trace(name, t)
    report = {"experiment": "demo-guarantee", "start": list(map(float, start)), "runs": _summaries(traces),
              "distance_to_min_norm": {k: float(np.linalg.norm(t.final - MIN_NORM_POINT))
                                       for k, t in traces.items()}}
    if args.trace == "full":
        _figure("plot_planar_runs", traces, guarantee_operator().sets, out.path("guarantee.png"))
    out.finish(report)
    return 0


def cmd_exp1_balls(args, out: Output) -> int:
    from .convex_sets import Ball
    from .experiments.balls import DEFAULT_BALLS, run_exp1_balls

    cfg = _load_config(args.config, {"A", "B", "start", "methods", "iterations"})
    iterations = int(cfg.pop("iterations", args.iterations))
    traces = run_exp1_balls(cfg, iterations, args.trace)
    for name, t in traces.items():
        out.trace(name, t)
    report = {"experiment": "exp1-balls", "iterations": iterations,
              "balls": {k: cfg.get(k, DEFAULT_BALLS[k]) for k in ("A", "B", "start")},
              "runs": _summaries(traces),
              "final_norm": {k: float(np.linalg.norm(t.final)) for k, t in traces.items()}}
    if args.trace == "full":
        balls = [Ball(**report["balls"][k]) for k in ("A", "B")]
        _figure("plot_planar_runs", traces, balls, out.path("balls.png"))
    out.finish(report)
    return 0


def cmd_exp1_mc(args, out: Output) -> int:
    import time

    from .experiments.montecarlo import run_exp1_montecarlo

    cfg = _load_config(args.config, {"runs", "kernels", "window", "c", "max_iterations", "stop_tol"})
    runs = int(cfg.pop("runs", args.runs))
    kernels = cfg.pop("kernels", args.kernels)
    t0 = time.perf_counter()
    report = run_exp1_montecarlo(runs, kernels, args.seed, **cfg)
    out.timing["montecarlo"] = time.perf_counter() - t0
    report.to_csv(out.path("table1.csv"))
    out.finish({"experiment": "exp1-mc", **report.to_dict()})
    return 0


def cmd_exp2(args, out: Output) -> int:
    from .experiments.smp2d import SOLUTION, exp2_problem, run_exp2

    cfg = _load_config(args.config, {"start", "iterations", "alpha", "c", "rotated_q", "x_direction"})
    traces = run_exp2(cfg.get("start", args.start), int(cfg.get("iterations", args.iterations)),
                      float(cfg.get("alpha", 0.9)), float(cfg.get("c", 1.0)), args.trace,
                      bool(cfg.get("rotated_q", False)), cfg.get("x_direction"))
    for name, t in traces.items():
        out.trace(name, t)
    report = {"experiment": "exp2", "runs": _summaries(traces),
              "distance_to_solution": {k: float(np.linalg.norm(t.final[:2] - SOLUTION))
                                       for k, t in traces.items()}}
    if args.trace == "full":
        _figure("plot_split_runs", traces, exp2_problem(bool(cfg.get("rotated_q", False))),
                out.path("exp2.png"))
    out.finish(report)
    return 0


def _instance_args(args, cfg: dict) -> dict:
    base = dict(FULL_SCALE if args.full_scale else DESK_SCALE)
    for key in ("M", "n", "L", "tumor_pixels"):
        if key in cfg:
            base[key] = cfg[key]
    return base


def cmd_exp3_gen(args, out: Output) -> int:
    from .experiments.imrt import gen_imrt_instance

    cfg = _load_config(args.config, {"M", "n", "L", "tumor_pixels"})
    inst = gen_imrt_instance(args.seed, **_instance_args(args, cfg))
    inst.save(out.path("instance.npz"))
    out.grid("labels", inst.labels_grid.astype(float))
    out.finish({"experiment": "exp3-gen", "instance": inst.describe()})
    return 0


def cmd_exp3_run(args, out: Output) -> int:
    from .experiments.imrt import ALGORITHMS, ImrtInstance, gen_imrt_instance, run_exp3, tumor_tv

    cfg = _load_config(args.config, {"M", "n", "L", "tumor_pixels", "algorithms", "run",
                                     "proximity_tol", "max_iterations", "n_perturbations", "guard"})
    if args.instance:
        try:
            inst = ImrtInstance.load(args.instance)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigurationError(f"cannot load instance {args.instance}: {exc}") from exc
    else:
        inst = gen_imrt_instance(args.seed, **_instance_args(args, cfg))
    algorithms = cfg.get("algorithms", args.algorithms)
    opts = {k: cfg[k] for k in ("proximity_tol", "max_iterations", "n_perturbations", "guard") if k in cfg}
    traces = run_exp3(inst, algorithms, run=int(cfg.get("run", args.run)), **opts)
    report = {"experiment": "exp3-run", "instance": inst.describe(), "runs": {}}
    grids = {}
    for name, t in traces.items():
        out.trace(name, t)
        grids[name] = inst.to_grid(t.final[inst.n:])
        out.grid(name, grids[name])
        report["runs"][name] = {**t.summary(include_final=False), "tumor_tv": tumor_tv(inst, t)}
    _figure("plot_heatmaps", grids, out.path("heatmaps.png"), inst.labels_grid)
    names = [f"phi_{lab}" for lab in range(1, inst.L + 1)]
    if names:
        _figure("plot_proximity_target", traces, names, out.path("proximity_tv.png"))
    out.finish(report)
    capped = [name for name, t in traces.items() if t.termination == "max_iterations"]
    if capped:
        raise NonConvergence(f"{', '.join(capped)} hit the iteration cap before the proximity threshold")
    return 0


def cmd_run(args, out: Output) -> int:
    from .problem_file import load_problem

    try:
        with open(args.problem) as fh:
            spec = load_problem(json.load(fh), args.trace, Path(args.problem).parent)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read problem file {args.problem}: {exc}") from exc
    trace = spec.solve()
    out.trace("run", trace)
    out.finish({"experiment": "run", "problem": Path(args.problem).name,
                "run": trace.summary(include_final=True)})
    if trace.termination == "max_iterations":
        raise NonConvergence("the run hit its iteration cap before the proximity threshold")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed")
    common.add_argument("--config", help="JSON file overriding the subcommand's settings")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="trace file format")
    common.add_argument("--trace", choices=("full", "summary"), default="full",
                        help="keep iterates (full) or only per-iteration scalars")
    common.add_argument("--full-scale", action="store_true", help="IMRT at 50x50 pixels, n=2840")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="superiorize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-guarantee", parents=[common], help="two half-planes, AP vs superiorized")
    p.add_argument("--start", type=float, nargs=2, default=[0.3, 0.0])
    p.add_argument("--iterations", type=int, default=50)
    p.set_defaults(func=cmd_demo_guarantee)

    p = sub.add_parser("exp1-balls", parents=[common], help="minimum-norm point of two disks")
    p.add_argument("--iterations", type=int, default=500)
    p.set_defaults(func=cmd_exp1_balls)

    p = sub.add_parser("exp1-mc", parents=[common], help="Monte Carlo over random half-plane pairs")
    p.add_argument("--runs", type=int, default=10_000)
    p.add_argument("--kernels", type=float, nargs="+", default=[0.5, 0.6, 0.7, 0.8, 0.9])
    p.set_defaults(func=cmd_exp1_mc)

    p = sub.add_parser("exp2", parents=[common], help="planar split problem")
    p.add_argument("--start", type=float, nargs=2, default=[0.0, 0.0])
    p.add_argument("--iterations", type=int, default=50)
    p.set_defaults(func=cmd_exp2)

    p = sub.add_parser("exp3-gen", parents=[common], help="generate a synthetic IMRT instance")
    p.set_defaults(func=cmd_exp3_gen)

    p = sub.add_parser("exp3-run", parents=[common], help="run the IMRT comparison")
    p.add_argument("--instance", help="instance.npz written by exp3-gen (default: generate from --seed)")
    p.add_argument("--algorithms", nargs="+", default=["basic", "superiorized", "restarts"],
                   choices=["basic", "superiorized", "restarts"])
    p.add_argument("--run", type=int, default=0, help="start-point index")
    p.set_defaults(func=cmd_exp3_run)

    p = sub.add_parser("run", parents=[common], help="solve a JSON problem file")
    p.add_argument("problem")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        out = Output(args.out, args.format)
        return args.func(args, out)
    except (ConfigurationError, NumericalDivergence, NonConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigurationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
