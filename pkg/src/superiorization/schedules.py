"""Summable perturbation step-sizes ``c * alpha**ell`` with optional restarts.

The exponent ``ell`` starts at -1, so the first candidate is ``c``.  Every call
to :meth:`KernelSchedule.next_candidate` consumes one exponent, including the
candidates rejected by an engine's acceptance test.
"""
from __future__ import annotations

import copy
import math
from typing import Callable, Iterable

from .exceptions import ConfigurationError

__all__ = ["KernelSchedule", "RestartSchedule", "schedule_from_config", "schedule_to_config"]


class KernelSchedule:
    """Geometric step-sizes ``c * alpha**ell`` without restarts."""

    def __init__(self, alpha: float, c: float = 1.0):
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(f"kernel alpha must lie in (0, 1), got {alpha}")
        if not c > 0.0 or not math.isfinite(c):
            raise ConfigurationError(f"scale c must be positive, got {c}")
        self.alpha = float(alpha)
        self.c = float(c)
        self.ell = -1

    def step(self, ell: int) -> float:
        # underflow to 0.0 is allowed: a zero step is a null perturbation
        return self.c * self.alpha**ell

    def next_candidate(self) -> float:
        self.ell += 1
        return self.c * self.alpha**self.ell

    def complete_outer_iteration(self) -> bool:
        return False

    def series_upper_bound(self) -> float:
        return self.c / (1.0 - self.alpha)

    def copy(self):
        return copy.deepcopy(self)

    def __repr__(self):
        return f"{type(self).__name__}(alpha={self.alpha}, c={self.c}, ell={self.ell})"


class RestartSchedule(KernelSchedule):
    """Kernel schedule whose exponent is reset after windows of outer iterations.

    ``windows`` is an int (constant window), ``None`` (never restart), a
    sequence of ints, or a callable ``r -> W_r``.  After ``W_r`` outer
    iterations the restart counter ``r`` is incremented and ``ell`` is set to
    ``r - 1``, so the next candidate is ``c * alpha**r``.
    """

    def __init__(self, alpha: float, c: float = 1.0,
                 windows: int | None | Iterable[int] | Callable[[int], int] = 20):
        super().__init__(alpha, c)
        self._window_spec = windows
        if windows is None:
            self._window = lambda r: math.inf
        elif isinstance(windows, int):
            if windows < 1:
                raise ConfigurationError("restart window must be a positive integer")
            self._window = lambda r: windows
        elif callable(windows):
            self._window = windows
        else:
            seq = list(windows)
            if not seq or any(int(w) != w or w < 1 for w in seq):
                raise ConfigurationError("restart windows must be positive integers")
            self._window_spec = seq
            # the last window repeats once the sequence is exhausted
            self._window = lambda r: seq[min(r, len(seq) - 1)]
        self.r = 0
        self.w = 0

    def window(self, r: int | None = None) -> float:
        return self._window(self.r if r is None else r)

    def complete_outer_iteration(self) -> bool:
        self.w += 1
        if self.w == self._window(self.r):
            self.r += 1
            self.ell = self.r - 1
            self.w = 0
            return True
        return False

    def series_upper_bound(self) -> float:
        return self.c / (1.0 - self.alpha) ** 2

    def __repr__(self):
        return (f"RestartSchedule(alpha={self.alpha}, c={self.c}, windows={self._window_spec!r}, "
                f"ell={self.ell}, r={self.r}, w={self.w})")


def schedule_from_config(cfg: dict) -> KernelSchedule:
    """Build a schedule from ``{"alpha": .., "c": .., "window": int | "none"}``."""
    try:
        alpha = float(cfg["alpha"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"schedule needs a numeric 'alpha': {cfg!r}") from exc
    c = float(cfg.get("c", 1.0))
    window = cfg.get("window", "none")
    if window is None or window == "none":
        return KernelSchedule(alpha, c)
    if isinstance(window, list):
        return RestartSchedule(alpha, c, [int(w) for w in window])
    if isinstance(window, bool) or not isinstance(window, int):
        raise ConfigurationError(f"window must be an integer, a list or 'none', got {window!r}")
    return RestartSchedule(alpha, c, window)


def schedule_to_config(s: KernelSchedule) -> dict:
    out = {"alpha": s.alpha, "c": s.c, "window": "none"}
    if isinstance(s, RestartSchedule):
        spec = s._window_spec
        if isinstance(spec, int):
            out["window"] = spec
        elif spec is not None and not callable(spec):
            out["window"] = list(spec)
    return out
