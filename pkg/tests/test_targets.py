import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from superiorization import FixedDirection, LinearForm, SquaredNorm, TVGrid, ZeroTarget, negated_coordinate


def _central_differences(f, x, h=1e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_examples():
    assert SquaredNorm()([3, 4]) == 12.5
    assert TVGrid(M=2)(np.array([[0, 1], [0, 1]], float).ravel()) == pytest.approx(2.0)
    for M in (1, 3, 7):
        assert TVGrid(M=M)(np.full(M * M, 4.2)) == 0.0


def test_direction_examples():
    assert np.array_equal(SquaredNorm().nonascending([0.3, 0.0]), [-1.0, 0.0])
    f = LinearForm([0, 1])
    for x in ([0.0, 0.0], [5.0, -3.0]):
        assert np.array_equal(f.nonascending(x), [0.0, -1.0])
    assert np.array_equal(negated_coordinate(1, 2).nonascending([1.0, 1.0]), [0.0, 1.0])
    assert not np.any(SquaredNorm().nonascending([0.0, 0.0]))
    assert not np.any(ZeroTarget().nonascending([1.0, 2.0]))
    assert not np.any(TVGrid(M=3).nonascending(np.ones(9)))


def test_fixed_direction():
    t = FixedDirection(LinearForm([0, 1]), [0, 1])
    assert np.array_equal(t.nonascending([3.0, 4.0]), [0.0, 1.0])
    assert t([3.0, 4.0]) == 4.0
    with pytest.raises(ValueError):
        FixedDirection(LinearForm([0, 1]), [2, 0])


def test_tv_two_by_two_direction():
    tv = TVGrid(M=2)
    z = np.array([[0, 1], [0, 1]], float).ravel()
    v = tv.nonascending(z)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert tv(z + 1e-4 * v) < tv(z)


def test_tv_gradient_monotone_grid():
    M = 6
    s, t = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    z = (s + 2.0 * t).ravel()
    tv = TVGrid(M=M)
    fd = _central_differences(tv.evaluate, z)
    assert np.allclose(tv.partials(z), fd, atol=1e-6)
    v = tv.nonascending(z)
    assert np.allclose(v, -fd / np.linalg.norm(fd), atol=1e-6)


def test_tv_gradient_random_points():
    """Relative error of the analytic gradient below 1e-5 at points without zero differences."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        M = int(rng.integers(2, 6))
        z = rng.normal(size=M * M) * 10
        tv = TVGrid(M=M)
        fd = _central_differences(tv.evaluate, z)
        g = tv.partials(z)
        assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-5


def test_tv_masked_gradient():
    rng = np.random.default_rng(6)
    mask = np.zeros((5, 5), bool)
    mask[1:4, 1:3] = True
    mask[2, 3] = True
    tv = TVGrid(mask=mask)
    assert tv.dim == 7
    z = rng.normal(size=7)
    fd = _central_differences(tv.evaluate, z)
    assert np.linalg.norm(tv.partials(z) - fd) / np.linalg.norm(fd) < 1e-5


def test_tv_masked_counts_inside_neighbors_only():
    mask = np.array([[1, 0], [1, 1]], bool)
    tv = TVGrid(mask=mask)
    # pixels (0,0), (1,0), (1,1): only (0,0)-(1,0) down and (1,0)-(1,1) right pairs
    assert tv([1.0, 4.0, 6.0]) == pytest.approx(3.0 + 2.0)
    assert np.array_equal(tv.to_grid([1.0, 4.0, 6.0], fill=0.0), [[1.0, 0.0], [4.0, 6.0]])


def test_tv_kink_zeroes_partials():
    tv = TVGrid(M=2)
    z = np.array([1.0, 1.0, 1.0, 3.0])
    g = tv.partials(z)
    # both differences at pixel (0,0) vanish: its term is not differentiable in pixels 0, 1, 2
    assert np.array_equal(g[:3], [0.0, 0.0, 0.0])
    assert g[3] == 2.0


def _targets(rng, dim):
    return [SquaredNorm(), SquaredNorm(1.0), LinearForm(rng.normal(size=dim)),
            negated_coordinate(int(rng.integers(dim)), dim), ZeroTarget(),
            TVGrid(M=int(np.sqrt(dim)))]


def test_descent_and_unit_norm():
    """1200 random (target, point) pairs: ||v|| in {0, 1} and phi(x + lam v) <= phi(x) for small lam."""
    rng = np.random.default_rng(8)
    cases = 0
    for _ in range(200):
        M = int(rng.integers(2, 5))
        dim = M * M
        for t in _targets(rng, dim):
            x = rng.normal(size=dim) * 5
            v = t.nonascending(x)
            norm = np.linalg.norm(v)
            assert norm == 0.0 or abs(norm - 1.0) < 1e-12
            for lam in (1e-8, 1e-6):
                assert t(x + lam * v) <= t(x) + 1e-12 * (1 + abs(t(x)))
            cases += 1
    assert cases >= 1000


@settings(max_examples=100, deadline=None)
@given(arrays(float, 9, elements=st.floats(-100, 100)), st.floats(-50, 50))
def test_tv_translation_invariant(z, shift):
    tv = TVGrid(M=3)
    assert tv(z + shift) == pytest.approx(tv(z), rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(arrays(float, 16, elements=st.floats(-100, 100)), arrays(float, 16, elements=st.floats(-100, 100)),
       st.floats(0, 1))
def test_tv_convex(a, b, lam):
    tv = TVGrid(M=4)
    mix = tv(lam * a + (1 - lam) * b)
    assert mix <= lam * tv(a) + (1 - lam) * tv(b) + 1e-9 * (1 + tv(a) + tv(b))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        TVGrid(M=2)(np.zeros(5))
    with pytest.raises(ValueError):
        LinearForm([1, 2])([1, 2, 3])
