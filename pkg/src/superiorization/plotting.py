"""Figures for the experiment reports, written to files with the Agg backend."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .convex_sets import Ball, HalfSpace  # noqa: E402

__all__ = ["draw_set", "plot_planar_runs", "plot_split_runs", "plot_heatmaps", "plot_proximity_target"]

COLORS = ["tab:gray", "tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple"]


def _limits(points: np.ndarray, pad: float = 0.15):
    lo, hi = points.min(axis=0), points.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    return lo - pad * span, hi + pad * span


def draw_set(ax, cset, lo, hi, color="0.85") -> None:
    """Shade a disk or a half-plane of R^2 inside the box ``[lo, hi]``."""
    if isinstance(cset, Ball):
        ax.add_patch(plt.Circle(cset.center, cset.radius, color=color, alpha=0.5, lw=0))
        return
    if isinstance(cset, HalfSpace):
        gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], 300), np.linspace(lo[1], hi[1], 300))
        inside = cset.normal[0] * gx + cset.normal[1] * gy <= cset.offset
        ax.contourf(gx, gy, inside.astype(float), levels=[0.5, 1.5], colors=[color], alpha=0.5)
        ax.contour(gx, gy, cset.normal[0] * gx + cset.normal[1] * gy - cset.offset,
                   levels=[0.0], colors=["0.5"], linewidths=0.8)


def _planar_panel(ax, traces: dict, key: str, sets, title: str, coords=slice(0, 2)) -> None:
    pts = np.vstack([np.asarray(getattr(t, key))[:, coords] for t in traces.values()
                     if getattr(t, key)])
    lo, hi = _limits(pts)
    for s in sets:
        draw_set(ax, s, lo, hi)
    for color, (name, trace) in zip(COLORS, traces.items()):
        seq = np.asarray(getattr(trace, key))[:, coords]
        ax.plot(seq[:, 0], seq[:, 1], ".-", ms=3, lw=0.8, color=color, label=name)
    ax.plot(0.0, 0.0, "k+", ms=8)
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.legend(fontsize=7)


def plot_planar_runs(traces: dict, sets, path) -> None:
    """Iterates (left) and perturbed points ``y^{k,N}`` (right) of planar runs."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.8))
    _planar_panel(axes[0], traces, "iterates", sets, "iterates")
    perturbed = {name: t for name, t in traces.items() if t.perturbed}
    if perturbed:
        _planar_panel(axes[1], perturbed, "perturbed", sets, "perturbed points")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_split_runs(traces: dict, problem, path) -> None:
    """x-space and y-space iterates of a split problem with n = m = 2."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.8))
    _planar_panel(axes[0], traces, "iterates", problem.x_sets, "x-space", slice(0, 2))
    _planar_panel(axes[1], traces, "iterates", problem.y_sets, "y-space", slice(2, 4))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_heatmaps(grids: dict, path, outline=None) -> None:
    """Side-by-side dose images sharing one color scale."""
    vmin = min(float(np.nanmin(g)) for g in grids.values())
    vmax = max(float(np.nanmax(g)) for g in grids.values())
    fig, axes = plt.subplots(1, len(grids), figsize=(4 * len(grids), 3.8), squeeze=False)
    for ax, (name, grid) in zip(axes[0], grids.items()):
        im = ax.imshow(grid, cmap="hot", vmin=vmin, vmax=vmax, interpolation="nearest")
        if outline is not None:
            ax.contour(outline > 0, levels=[0.5], colors="cyan", linewidths=0.6)
        ax.set_title(name)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.colorbar(im, ax=axes[0].tolist(), shrink=0.8)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_proximity_target(traces: dict, names, path) -> None:
    """Target value against proximity along each run, one panel per target."""
    fig, axes = plt.subplots(1, len(names), figsize=(5 * len(names), 4), squeeze=False)
    for ax, name in zip(axes[0], names):
        for color, (label, trace) in zip(COLORS, traces.items()):
            col = trace.target_names.index(name)
            prox = np.asarray(trace.proximity)
            vals = np.asarray(trace.targets)[:, col]
            ax.plot(prox, vals, lw=0.9, color=color, label=label)
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel("proximity")
        ax.set_ylabel(name)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
