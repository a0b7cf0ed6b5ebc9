"""Random pairs of half-planes: how often each method finds the smaller-norm point.

Every run ``i`` draws its instance from ``numpy.random.default_rng([seed, i])``
in this order: normal ``c_A`` (two standard normals, normalized), normal
``c_B``, offsets ``b_A`` and ``b_B`` uniform in (-1, 0), then start points
uniform in ``[-1, 1]^2`` until one lies outside ``A`` and ``B``'s
intersection.  Runs are therefore independent of batch size and order.

All runs of a batch are iterated together with array operations; the
semantics per run are those of :func:`~superiorization.engines.run_superiorized`
with ``T = P_B P_A``, ``phi = ||y||^2 / 2`` and ``N = 1``.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError

__all__ = [
    "HalfPlanePairs",
    "draw_instances",
    "batch_run",
    "MonteCarloReport",
    "run_exp1_montecarlo",
    "WIN_MARGIN",
]

log = logging.getLogger(__name__)

WIN_MARGIN = 1e-3
MAX_START_ATTEMPTS = 10_000
PAIRS = (("AP", "Sup."), ("AP", "Sup. Res."), ("Sup.", "Sup. Res."))


@dataclass
class HalfPlanePairs:
    """``A_i = {<cA_i, y> <= bA_i}``, ``B_i = {<cB_i, y> <= bB_i}`` and start points ``y0_i``."""

    cA: np.ndarray
    bA: np.ndarray
    cB: np.ndarray
    bB: np.ndarray
    y0: np.ndarray

    def __len__(self) -> int:
        return self.y0.shape[0]

    def inside(self, y) -> np.ndarray:
        return (np.einsum("ij,ij->i", self.cA, y) <= self.bA) & (np.einsum("ij,ij->i", self.cB, y) <= self.bB)


def _unit_normal(rng: np.random.Generator) -> np.ndarray:
    while True:
        c = rng.standard_normal(2)
        norm = np.linalg.norm(c)
        if norm > 0.0:
            return c / norm


def _draw_one(rng: np.random.Generator):
    while True:
        cA, cB = _unit_normal(rng), _unit_normal(rng)
        bA, bB = -rng.random(), -rng.random()
        # -rng.random() lies in (-1, 0]; zero would put the origin in both sets
        if bA == 0.0 or bB == 0.0:
            continue
        for _ in range(MAX_START_ATTEMPTS):
            y0 = rng.uniform(-1.0, 1.0, 2)
            if not (cA @ y0 <= bA and cB @ y0 <= bB):
                return cA, bA, cB, bB, y0
        # start region inside the intersection: draw a new instance


def draw_instances(runs: int, seed: int, first: int = 0) -> HalfPlanePairs:
    """Instances ``first .. first + runs - 1`` of the stream family ``seed``."""
    if runs < 0:
        raise ConfigurationError("runs must be nonnegative")
    rows = [_draw_one(np.random.default_rng([seed, i])) for i in range(first, first + runs)]
    if not rows:
        empty = np.empty((0, 2))
        return HalfPlanePairs(empty, np.empty(0), empty.copy(), np.empty(0), empty.copy())
    cA, bA, cB, bB, y0 = (np.array(col) for col in zip(*rows))
    return HalfPlanePairs(cA, bA, cB, bB, y0)


def _project(c, b, y):
    excess = np.einsum("ij,ij->i", c, y) - b
    scale = np.where(excess > 0.0, excess / np.einsum("ij,ij->i", c, c), 0.0)
    return y - scale[:, None] * c


def batch_run(inst: HalfPlanePairs, alpha: float | None = None, window: int | None = None,
              c: float = 1.0, max_iterations: int = 20_000, stop_tol: float | None = 1e-10,
              guard: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Alternating projections (``alpha=None``) or its superiorized version on every instance.

    A run stops once an outer iteration moves it by less than ``stop_tol``
    or after ``max_iterations``.  Returns ``(final points, iterations used)``.
    """
    y = inst.y0.astype(float).copy()
    n = y.shape[0]
    iters = np.zeros(n, dtype=np.int64)
    ell = np.full(n, -1, dtype=np.int64)
    r = np.zeros(n, dtype=np.int64)
    w = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    for _ in range(max_iterations):
        if active.size == 0:
            break
        ya = y[active]
        if alpha is None:
            pert = ya
        else:
            ref = 0.5 * np.einsum("ij,ij->i", ya, ya)
            norm = np.linalg.norm(ya, axis=1)
            moving = norm > 0.0
            v = np.where(moving[:, None], -ya / np.where(moving, norm, 1.0)[:, None], 0.0)
            e = ell[active] + 1
            eta = c * alpha ** e.astype(float)
            pending = moving & (eta != 0.0)
            rejected = np.zeros(active.size, dtype=np.int64)
            pert = ya.copy()
            while pending.any():
                cand = ya + eta[:, None] * v
                ok = 0.5 * np.einsum("ij,ij->i", cand, cand) <= ref
                take = pending & ok
                pert[take] = cand[take]
                pending &= ~ok
                rejected = np.where(pending, rejected + 1, rejected)
                stuck = pending & (rejected >= guard)
                if stuck.any():
                    log.warning("%d runs took a zero step after %d rejections", stuck.sum(), guard)
                    pending &= ~stuck
                e = np.where(pending, e + 1, e)
                eta = np.where(pending, c * alpha ** e.astype(float), eta)
                pending &= eta != 0.0
            if window is not None:
                wa = w[active] + 1
                restart = wa == window
                ra = np.where(restart, r[active] + 1, r[active])
                e = np.where(restart, ra - 1, e)
                w[active] = np.where(restart, 0, wa)
                r[active] = ra
            ell[active] = e
        new = _project(inst.cB[active], inst.bB[active],
                       _project(inst.cA[active], inst.bA[active], pert))
        y[active] = new
        iters[active] += 1
        if stop_tol is not None:
            done = np.linalg.norm(new - ya, axis=1) < stop_tol
            active = active[~done]
    return y, iters


@dataclass
class MonteCarloReport:
    """Win percentages per method pair and kernel.

    Method 1 wins a run when its final norm is below method 2's minus
    ``margin``; ties within the margin count for neither.
    """

    runs: int
    seed: int
    kernels: list[float]
    window: int
    margin: float = WIN_MARGIN
    rates: dict = field(default_factory=dict)   # (pair index, kernel) -> (pct first, pct second)
    counts: dict = field(default_factory=dict)  # same keys -> (wins first, wins second)
    capped: dict = field(default_factory=dict)  # method label -> runs that hit the iteration cap

    def rate(self, first: str, second: str, kernel: float) -> tuple[float, float]:
        return self.rates[(PAIRS.index((first, second)), kernel)]

    def header(self) -> list[str]:
        cols = ["kernel"]
        for a, b in PAIRS:
            cols += [f"{a} vs {b}: {a}", f"{a} vs {b}: {b}"]
        return cols

    def rows(self) -> list[list]:
        out = []
        for alpha in self.kernels:
            row = [alpha]
            for p in range(len(PAIRS)):
                row += list(self.rates[(p, alpha)])
            out.append(row)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for row in self.rows():
                writer.writerow([repr(v) for v in row])

    def to_dict(self) -> dict:
        table = []
        for alpha in self.kernels:
            entry = {"kernel": alpha}
            for p, (a, b) in enumerate(PAIRS):
                pa, pb = self.rates[(p, alpha)]
                ca, cb = self.counts[(p, alpha)]
                entry[f"{a} vs {b}"] = {a: pa, b: pb, f"{a} wins": ca, f"{b} wins": cb}
            table.append(entry)
        return {"runs": self.runs, "seed": self.seed, "window": self.window, "margin": self.margin,
                "table": table, "capped": self.capped}


def _wins(first: np.ndarray, second: np.ndarray, margin: float) -> tuple[int, int]:
    return int(np.sum(first < second - margin)), int(np.sum(second < first - margin))


def run_exp1_montecarlo(runs: int = 10_000, kernels=(0.5, 0.6, 0.7, 0.8, 0.9), seed: int = 0,
                        window: int = 20, c: float = 1.0, max_iterations: int = 20_000,
                        stop_tol: float = 1e-10, margin: float = WIN_MARGIN) -> MonteCarloReport:
    """Compare AP, Sup and Sup. Res. on ``runs`` random half-plane pairs."""
    kernels = [float(a) for a in kernels]
    report = MonteCarloReport(runs, seed, kernels, window, margin)
    inst = draw_instances(runs, seed)
    opts = dict(c=c, max_iterations=max_iterations, stop_tol=stop_tol)
    ap, ap_iters = batch_run(inst, None, **opts)
    report.capped["AP"] = int(np.sum(ap_iters >= max_iterations))
    ap_norm = np.linalg.norm(ap, axis=1)
    for alpha in kernels:
        sup, sup_iters = batch_run(inst, alpha, None, **opts)
        res, res_iters = batch_run(inst, alpha, window, **opts)
        report.capped[f"Sup. {alpha}"] = int(np.sum(sup_iters >= max_iterations))
        report.capped[f"Sup. Res. {alpha}"] = int(np.sum(res_iters >= max_iterations))
        norms = {"AP": ap_norm, "Sup.": np.linalg.norm(sup, axis=1),
                 "Sup. Res.": np.linalg.norm(res, axis=1)}
        for p, (a, b) in enumerate(PAIRS):
            wa, wb = _wins(norms[a], norms[b], margin)
            report.counts[(p, alpha)] = (wa, wb)
            pct = (lambda k: 100.0 * k / runs) if runs else (lambda k: 0.0)
            report.rates[(p, alpha)] = (pct(wa), pct(wb))
    return report
