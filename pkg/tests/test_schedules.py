import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superiorization import ConfigurationError, KernelSchedule, RestartSchedule
from superiorization.schedules import schedule_from_config, schedule_to_config


def test_kernel_first_candidates():
    s = KernelSchedule(0.5, 1.0)
    assert [s.next_candidate() for _ in range(3)] == [1.0, 0.5, 0.25]
    assert KernelSchedule(0.999, 100_000.0).next_candidate() == 100_000.0


def test_kernel_vanishing_regime():
    s = KernelSchedule(0.5, 1.0)
    steps = [s.next_candidate() for _ in range(50)]
    assert steps[-1] == 2.0**-49
    assert steps[-1] < 2 * 8.9e-16


def test_invalid_parameters():
    for alpha in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ConfigurationError):
            KernelSchedule(alpha)
    with pytest.raises(ConfigurationError):
        KernelSchedule(0.5, 0.0)
    with pytest.raises(ConfigurationError):
        RestartSchedule(0.5, 1.0, 0)


def _emit(s, outer):
    """One candidate per outer iteration; returns the steps grouped by window."""
    out = []
    for _ in range(outer):
        out.append(s.next_candidate())
        s.complete_outer_iteration()
    return out


def test_restart_trace_window_two():
    s = RestartSchedule(0.5, 1.0, 2)
    assert _emit(s, 6) == [1.0, 0.5, 0.5, 0.25, 0.25, 0.125]


def test_restart_window_one():
    s = RestartSchedule(0.3, 2.0, 1)
    assert _emit(s, 6) == pytest.approx([2.0 * 0.3**r for r in range(6)], rel=1e-15)


def test_restart_incomplete_window():
    s = RestartSchedule(0.5, 1.0, 3)
    assert s.complete_outer_iteration() is False
    assert s.complete_outer_iteration() is False
    assert s.w == 2
    assert s.complete_outer_iteration() is True


def test_series_upper_bound():
    assert RestartSchedule(0.5, 1.0).series_upper_bound() == 4.0
    assert RestartSchedule(0.9, 1.0).series_upper_bound() == pytest.approx(100.0)
    assert RestartSchedule(0.99, 100.0).series_upper_bound() == pytest.approx(1e6)


def _cumulative(alpha, c, window, outer, consume):
    """Emitted step sum when every outer iteration consumes ``consume(k)`` candidates."""
    s = RestartSchedule(alpha, c, window)
    total = 0.0
    for k in range(outer):
        for _ in range(consume(k)):
            eta = s.next_candidate()
        total += eta
        s.complete_outer_iteration()
    return total, s.series_upper_bound()


@pytest.mark.parametrize("alpha", [0.5, 0.9, 0.99])
@pytest.mark.parametrize("window", [1, 20, 50])
def test_summability_exact(alpha, window):
    total, bound = _cumulative(alpha, 1.0, window, 100_000, lambda k: 1)
    assert total <= bound


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([0.5, 0.9, 0.99]), st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_summability_adversarial_consumption(alpha, window, seed):
    """Rejected candidates only shrink later steps, so the bound survives any consumption pattern."""
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 4, 5000)
    total, bound = _cumulative(alpha, 3.0, window, 5000, lambda k: int(counts[k]))
    assert total <= bound


def test_monotone_within_window():
    s = RestartSchedule(0.8, 1.0, 7)
    window = []
    for _ in range(200):
        window.append(s.next_candidate())
        if s.complete_outer_iteration():
            assert all(a > b for a, b in zip(window, window[1:]))
            window = []


def test_restart_state_law():
    s = RestartSchedule(0.5, 1.0, [2, 3])
    for _ in range(2):
        s.next_candidate()
        s.complete_outer_iteration()
    assert (s.r, s.w, s.ell) == (1, 0, 0)
    assert s.next_candidate() == 0.5
    assert s.window() == 3


def test_no_restart_bisimulation():
    a, b = KernelSchedule(0.7, 2.0), RestartSchedule(0.7, 2.0, None)
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        for _ in range(int(rng.integers(1, 4))):
            assert a.next_candidate() == b.next_candidate()
        assert a.complete_outer_iteration() is b.complete_outer_iteration() is False


@pytest.mark.parametrize("K,W", [(100, 7), (1000, 20), (50, 50), (49, 50)])
def test_restart_count(K, W):
    s = RestartSchedule(0.9, 1.0, W)
    count = sum(s.complete_outer_iteration() for _ in range(K))
    assert count == K // W


def test_underflow_gives_zero_step():
    s = KernelSchedule(0.5, 1.0)
    s.ell = 2000
    assert s.next_candidate() == 0.0


def test_config_round_trip():
    for cfg in ({"alpha": 0.6, "c": 1.0, "window": "none"},
                {"alpha": 0.99, "c": 100.0, "window": 20},
                {"alpha": 0.5, "c": 2.0, "window": [3, 5]}):
        s = schedule_from_config(cfg)
        assert schedule_to_config(s) == cfg
    with pytest.raises(ConfigurationError):
        schedule_from_config({"c": 1.0})
    with pytest.raises(ConfigurationError):
        schedule_from_config({"alpha": 0.5, "window": "often"})


def test_step_formula():
    s = KernelSchedule(0.9, 5.0)
    assert s.step(10) == 5.0 * 0.9**10
    assert math.isclose(RestartSchedule(0.9, 5.0).step(0), 5.0)
