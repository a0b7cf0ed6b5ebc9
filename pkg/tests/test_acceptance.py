"""Acceptance criteria 1-7; each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are repeated
in the terminal summary under "acceptance criteria".
"""
import json
import time

import numpy as np
import pytest

from acceptance_log import record
from superiorization import RestartSchedule, cli
from superiorization.experiments.guarantee import MIN_NORM_POINT, demo_guarantee_problem
from superiorization.experiments.imrt import gen_imrt_instance, run_exp3, tumor_tv
from superiorization.experiments.montecarlo import run_exp1_montecarlo
from superiorization.experiments.smp2d import ROTATION, SOLUTION, run_exp2


def test_criterion_1_guarantee_problem():
    t0 = time.perf_counter()
    first = demo_guarantee_problem((0.3, 0.0), iterations=50)
    second = demo_guarantee_problem((1.1, 0.0), iterations=50)
    elapsed = time.perf_counter() - t0
    basic_one_step = np.max(np.abs(first["basic"].iterates[1] - MIN_NORM_POINT))
    sup_far = np.linalg.norm(first["superiorized"].final - MIN_NORM_POINT)
    sup_reaches = np.linalg.norm(second["superiorized"].final - MIN_NORM_POINT)
    basic_misses = np.linalg.norm(second["basic"].final - MIN_NORM_POINT)
    ok = basic_one_step <= 1e-12 and sup_far > 0.05 and sup_reaches <= 1e-6 and basic_misses > 1e-6 \
        and elapsed < 1.0
    record(1, ok, f"AP from (0.3,0) off by {basic_one_step:.1e} after 1 step; superiorized "
                  f"{sup_far:.4f} away after 50; from (1.1,0) superiorized {sup_reaches:.1e}, "
                  f"AP {basic_misses:.4f} away; {elapsed:.2f} s")
    assert ok


def test_criterion_2_restart_summability():
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for alpha in (0.5, 0.9, 0.99):
        for window in (1, 20, 50):
            s = RestartSchedule(alpha, 1.0, window)
            bound = s.series_upper_bound()
            step, advance = s.next_candidate, s.complete_outer_iteration
            total = 0.0
            for _ in range(100_000):
                total += step()
                advance()
            # steps are positive, so the final sum bounds every partial sum
            ok = ok and total <= bound
            worst = max(worst, total / bound)
    elapsed = time.perf_counter() - t0
    # the pure-Python loop is the schedule under test; 9 x 1e5 steps
    ok = ok and elapsed < 1.0
    record(2, ok, f"largest step-sum / bound = {worst:.6f} over 9 schedules x 1e5 iterations; {elapsed:.2f} s")
    assert ok


def test_criterion_3_planar_split_problem():
    t0 = time.perf_counter()
    runs = run_exp2(iterations=50, alpha=0.9)
    elapsed = time.perf_counter() - t0
    sup, basic = runs["superiorized"].final, runs["basic"].final
    dist = float(np.linalg.norm(sup[:2] - SOLUTION))
    consistency = float(np.max(np.abs(ROTATION @ sup[:2] - sup[2:])))
    f_basic = runs["basic"].final_targets()["f"]
    f_sup = runs["superiorized"].final_targets()["f"]
    prox = runs["basic"].proximity[-1]
    ok = dist < 1e-2 and consistency <= 1e-10 and prox < 1e-6 and f_basic > f_sup and elapsed < 1.0
    record(3, ok, f"||x50 - (9,1)|| = {dist:.4f} (need < 0.01); |Ax - y| = {consistency:.1e}; "
                  f"basic proximity {prox:.1e}, f basic {f_basic:.3f} > f sup {f_sup:.3f}; {elapsed:.2f} s")
    assert ok


def test_criterion_4_monte_carlo_trend():
    t0 = time.perf_counter()
    rep = run_exp1_montecarlo(runs=10_000, kernels=(0.5, 0.9), seed=0, window=20)
    elapsed = time.perf_counter() - t0
    res_worse = rep.rate("Sup.", "Sup. Res.", 0.9)[0]
    ap_beats, sup_beats = rep.rate("AP", "Sup.", 0.5)
    a = res_worse <= 0.05
    b = abs(ap_beats - 1.29) <= 0.5
    c = abs(sup_beats - 56.17) <= 2.0
    ok = a and b and c and elapsed < 120
    record(4, ok, f"(a) Sup. beats Sup.Res. at 0.9: {res_worse:.2f}% (<= 0.05) {'ok' if a else 'MISS'}; "
                  f"(b) AP beats Sup. at 0.5: {ap_beats:.2f}% (1.29 +- 0.5) {'ok' if b else 'MISS'}; "
                  f"(c) Sup. beats AP at 0.5: {sup_beats:.2f}% (56.17 +- 2) {'ok' if c else 'MISS'}; "
                  f"{elapsed:.0f} s")
    assert ok


def test_criterion_5_imrt_properties():
    t0 = time.perf_counter()
    ordered, halved, converged, lines = 0, 0, True, []
    for seed in range(5):
        inst = gen_imrt_instance(seed, M=20, n=460, L=2)
        runs = run_exp3(inst)
        problem = inst.problem()
        for tr in runs.values():
            x, y = problem.split(tr.final)
            converged &= tr.termination == "proximity" and problem.proximity(x, y) < 0.01
        tv = {name: np.array(tumor_tv(inst, tr)) for name, tr in runs.items()}
        if np.all(tv["restarts"] < tv["superiorized"]) and np.all(tv["superiorized"] < tv["basic"]):
            ordered += 1
        if np.all(tv["restarts"] < 0.5 * tv["basic"]):
            halved += 1
        lines.append(f"seed {seed}: " + " / ".join(f"{v[0]:.1f},{v[1]:.1f}" for v in tv.values()))
    elapsed = time.perf_counter() - t0
    ok = converged and ordered >= 4 and halved == 5 and elapsed < 300
    record(5, ok, f"all runs below proximity 0.01: {converged}; strict ordering res < sup < basic on "
                  f"{ordered}/5 seeds (need >= 4); res < 0.5 basic on {halved}/5 (need 5); "
                  f"{elapsed:.0f} s; TV basic / sup / res: " + "; ".join(lines))
    assert ok


INVARIANT_CHECKS = [
    ("test_convex_sets", "test_projection_invariants", [(k,) for k in
                                                      ("halfspace", "box", "ball", "labeled", "product", "affine")]),
    ("test_convex_sets", "test_affine_graph_brute_force_oracle", [()]),
    ("test_targets", "test_descent_and_unit_norm", [()]),
    ("test_targets", "test_tv_gradient_monotone_grid", [()]),
    ("test_targets", "test_tv_gradient_random_points", [()]),
    ("test_targets", "test_tv_masked_gradient", [()]),
    ("test_engines", "test_zero_target_bisimulation", [()]),
    ("test_engines", "test_smp_zero_targets_equal_basic", [()]),
]


def test_criterion_6_invariant_suites():
    import importlib

    t0 = time.perf_counter()
    failed = []
    for module, name, params in INVARIANT_CHECKS:
        fn = getattr(importlib.import_module(module), name)
        for args in params:
            try:
                fn(*args)
            except AssertionError:
                failed.append(f"{name}{args or ''}")
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 30
    record(6, ok, f"{sum(len(p) for *_, p in INVARIANT_CHECKS)} invariant suites, failures: "
                  f"{failed or 'none'}; {elapsed:.1f} s")
    assert ok


SUBCOMMANDS = [
    ("demo-guarantee", [], None),
    ("exp1-balls", [], None),
    ("exp1-mc", ["--runs", "300"], None),
    ("exp2", [], None),
    ("exp3-gen", [], {"M": 8, "n": 74, "tumor_pixels": 6}),
    ("exp3-run", [], {"M": 8, "n": 74, "tumor_pixels": 6}),
    ("run", [], None),
]


def _problem_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({
        "sets": [{"type": "ball", "center": [3, 0], "radius": 2.5},
                 {"type": "ball", "center": [0, 3], "radius": 2.5}],
        "start": [5.0, 4.0],
        "target": {"type": "squared_norm"},
        "schedule": {"alpha": 0.6, "c": 1.0, "window": 50},
        "max_iterations": 200,
        "proximity_tol": None,
    }))
    return str(path)


def test_criterion_7_determinism(tmp_path):
    differing = []
    for name, extra, cfg in SUBCOMMANDS:
        argv = [name, *extra, "--seed", "11"]
        if name == "run":
            argv.insert(1, _problem_file(tmp_path))
        if cfg is not None:
            cfg_path = tmp_path / f"{name}.json"
            cfg_path.write_text(json.dumps(cfg))
            argv += ["--config", str(cfg_path)]
        reports = []
        for rep in ("a", "b"):
            out = tmp_path / f"{name}_{rep}"
            code = cli.main(argv + ["--out", str(out)])
            reports.append((code, (out / "report.json").read_bytes()))
        if reports[0] != reports[1] or reports[0][0] != 0:
            differing.append(name)
    ok = not differing
    record(7, ok, f"{len(SUBCOMMANDS)} subcommands run twice, report.json byte-identical; "
                  f"differing or failing: {differing or 'none'}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
