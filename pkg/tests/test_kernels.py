"""Covariance kernels: closed-form values, symmetries, Gram assembly."""

import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from fbmlocal.kernels import (
    IncrementBasis,
    TimeGrid,
    check_hurst,
    cross_gram,
    disjoint_kernel,
    fbm_cov,
    gram,
    increment_cov,
    levy_fbm_cov,
    levy_increment_cross_gram,
    levy_increment_gram,
)

SQRT2 = math.sqrt(2.0)


def test_hurst_guard():
    for bad in (0.0, 1.0, -0.1, 1.1, 1e-10, 1.0 - 1e-10):
        with pytest.raises(ValueError):
            check_hurst(bad)
    assert check_hurst(0.5) == 0.5


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0.0, 8)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 1.0, 1)
    pts = TimeGrid(0.0, 1.0, 5).points()
    assert np.allclose(pts, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_increment_basis_validation():
    with pytest.raises(ValueError):
        IncrementBasis(s=np.array([0.0]), t=np.array([0.0]))
    with pytest.raises(ValueError):
        IncrementBasis(s=np.array([]), t=np.array([]))
    b = IncrementBasis.from_grid(TimeGrid(0.0, 1.0, 3))
    assert len(b) == 2


def test_fbm_cov_unit_variance():
    for h in (0.1, 0.25, 0.5, 0.75, 0.9):
        assert fbm_cov(1.0, 1.0, h) == pytest.approx(1.0, abs=1e-14)


def test_fbm_cov_brownian_is_min():
    assert fbm_cov(2.0, 3.0, 0.5) == pytest.approx(2.0, abs=1e-14)
    assert fbm_cov(5.0, 1.5, 0.5) == pytest.approx(1.5, abs=1e-14)


def test_fbm_cov_opposite_signs_hand_value():
    # 0.5 * (1 + 1 - 2^{3/2}) = 1 - sqrt(2)
    assert fbm_cov(1.0, -1.0, 0.75) == pytest.approx(1.0 - SQRT2, abs=1e-14)


def test_fbm_cov_symmetry_and_diagonal():
    rng = np.random.default_rng(7)
    for _ in range(200):
        u, v = rng.uniform(-5.0, 5.0, size=2)
        h = rng.uniform(0.05, 0.95)
        assert fbm_cov(u, v, h) == fbm_cov(v, u, h)
        assert fbm_cov(u, u, h) == pytest.approx(abs(u) ** (2 * h), rel=1e-14)
    assert fbm_cov(0.0, 3.0, 0.3) == 0.0


def test_fbm_cov_self_similarity():
    rng = np.random.default_rng(8)
    for _ in range(200):
        u, v = rng.uniform(-4.0, 4.0, size=2)
        a = rng.uniform(0.1, 10.0)
        h = rng.uniform(0.05, 0.95)
        left = fbm_cov(a * u, a * v, h)
        right = a ** (2 * h) * fbm_cov(u, v, h)
        assert left == pytest.approx(right, rel=1e-12, abs=1e-12)


def test_increment_cov_unit_increment():
    for h in (0.2, 0.5, 0.8):
        assert increment_cov((0.0, 1.0), (0.0, 1.0), h) == pytest.approx(1.0, abs=1e-14)


def test_increment_cov_brownian_adjacent_zero():
    assert increment_cov((0.0, 1.0), (1.0, 2.0), 0.5) == pytest.approx(0.0, abs=1e-14)


def test_increment_cov_adjacent_hand_value():
    # 0.5 * (2^{3/2} + 0 - 1 - 1) = sqrt(2) - 1
    assert increment_cov((0.0, 1.0), (1.0, 2.0), 0.75) == pytest.approx(SQRT2 - 1.0, abs=1e-14)


def test_increment_cov_swap_symmetry():
    rng = np.random.default_rng(9)
    for _ in range(100):
        p = tuple(rng.uniform(-3.0, 3.0, size=2))
        q = tuple(rng.uniform(-3.0, 3.0, size=2))
        if p[0] == p[1] or q[0] == q[1]:
            continue
        h = rng.uniform(0.05, 0.95)
        assert increment_cov(p, q, h) == pytest.approx(increment_cov(q, p, h), rel=1e-13, abs=1e-13)


def test_increment_cov_translation_invariance():
    rng = np.random.default_rng(10)
    for _ in range(100):
        p = tuple(rng.uniform(-3.0, 3.0, size=2))
        q = tuple(rng.uniform(-3.0, 3.0, size=2))
        if p[0] == p[1] or q[0] == q[1]:
            continue
        c = rng.uniform(-50.0, 50.0)
        h = rng.uniform(0.05, 0.95)
        base = increment_cov(p, q, h)
        moved = increment_cov((p[0] + c, p[1] + c), (q[0] + c, q[1] + c), h)
        assert moved == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_disjoint_kernel_values():
    assert disjoint_kernel(0.0, 1.0, 0.5) == 0.0
    assert disjoint_kernel(0.0, 2.0, 0.75) == pytest.approx(0.75 * 0.5 * 2.0 ** -0.5, abs=1e-14)
    assert disjoint_kernel(0.0, 1.0, 0.25) == pytest.approx(-0.125, abs=1e-15)
    with pytest.raises(ValueError):
        disjoint_kernel(1.0, 1.0, 0.7)


def test_disjoint_kernel_sign():
    for h in (0.1, 0.3, 0.49):
        assert disjoint_kernel(0.0, 1.5, h) < 0.0
    for h in (0.51, 0.7, 0.9):
        assert disjoint_kernel(0.0, 1.5, h) > 0.0


def test_increment_cov_matches_kernel_double_integral():
    # disjoint supports: E dX dY = integral of the smooth kernel
    for h in (0.3, 0.75):
        p, q = (0.0, 1.0), (2.0, 3.5)
        val, err = dblquad(lambda v, u: disjoint_kernel(u, v, h), p[0], p[1], q[0], q[1])
        assert increment_cov(p, q, h) == pytest.approx(val, rel=1e-6)


def test_gram_brownian_half_grid():
    b = IncrementBasis.from_grid(TimeGrid(0.0, 1.0, 3))
    g = gram(b, 0.5)
    assert np.allclose(g, 0.5 * np.eye(2), atol=1e-14)


def test_gram_single_pair():
    g = gram(IncrementBasis(s=np.array([0.0]), t=np.array([1.0])), 0.8)
    assert g.shape == (1, 1)
    assert g[0, 0] == pytest.approx(1.0, abs=1e-14)


def test_gram_hand_values_h075():
    b = IncrementBasis.from_grid(TimeGrid(0.0, 1.0, 3))
    g = gram(b, 0.75)
    diag = 2.0 ** -1.5
    off = 0.5 * (1.0 - 2.0 * diag)
    assert np.allclose(np.diag(g), diag, atol=1e-14)
    assert g[0, 1] == pytest.approx(off, abs=1e-14)
    assert g[1, 0] == pytest.approx(off, abs=1e-14)


def test_gram_psd_random_grids():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(3, 30))
        a, width = rng.uniform(-2.0, 2.0), rng.uniform(0.2, 4.0)
        h = rng.uniform(0.05, 0.95)
        g = gram(IncrementBasis.from_grid(TimeGrid(a, a + width, n)), h)
        w = np.linalg.eigvalsh(g)
        assert w.min() >= -1e-10 * w.max()


def test_cross_gram_cases():
    a = IncrementBasis.from_grid(TimeGrid(0.0, 1.0, 4))
    b = IncrementBasis.from_grid(TimeGrid(2.0, 3.0, 4))
    assert np.allclose(cross_gram(a, b, 0.5), 0.0, atol=1e-14)
    assert np.allclose(cross_gram(a, a, 0.7), gram(a, 0.7), atol=1e-14)
    one = cross_gram(
        IncrementBasis(s=np.array([0.0]), t=np.array([1.0])),
        IncrementBasis(s=np.array([1.0]), t=np.array([2.0])),
        0.75,
    )
    assert one[0, 0] == pytest.approx(SQRT2 - 1.0, abs=1e-14)


def test_levy_cov_values():
    assert levy_fbm_cov((1.0, 0.0), (1.0, 0.0), 0.3) == pytest.approx(1.0, abs=1e-14)
    assert levy_fbm_cov((1.0, 0.0), (0.0, 1.0), 0.5) == pytest.approx(0.5 * (2.0 - SQRT2), abs=1e-14)
    assert levy_fbm_cov((0.0, 0.0), (0.7, -0.2), 0.8) == 0.0


def test_levy_cov_dimension_mismatch():
    with pytest.raises(ValueError):
        levy_fbm_cov((1.0, 0.0), (1.0, 0.0, 0.0), 0.5)


def test_levy_cov_reduces_to_1d():
    rng = np.random.default_rng(12)
    for _ in range(50):
        u, v = rng.uniform(-3.0, 3.0, size=2)
        h = rng.uniform(0.05, 0.95)
        assert levy_fbm_cov((u,), (v,), h) == pytest.approx(fbm_cov(u, v, h), rel=1e-14, abs=1e-14)


def test_levy_increment_grams_match_bilinear_expansion():
    # increments X(p_i) - X(c) for a few planar points
    rng = np.random.default_rng(13)
    center = np.array([0.3, -0.2])
    pts = rng.uniform(-1.0, 1.0, size=(5, 2)) + center
    center2 = np.array([2.0, 1.0])
    pts2 = rng.uniform(-1.0, 1.0, size=(4, 2)) + center2
    h = 0.65
    left = np.tile(center, (len(pts), 1))
    left2 = np.tile(center2, (len(pts2), 1))
    g = levy_increment_gram(left, pts, h)
    c = levy_increment_cross_gram(left, pts, left2, pts2, h)
    for i in range(len(pts)):
        for j in range(len(pts)):
            expect = (
                levy_fbm_cov(pts[i], pts[j], h)
                - levy_fbm_cov(pts[i], center, h)
                - levy_fbm_cov(center, pts[j], h)
                + levy_fbm_cov(center, center, h)
            )
            assert g[i, j] == pytest.approx(expect, rel=1e-12, abs=1e-12)
    for i in range(len(pts)):
        for j in range(len(pts2)):
            expect = (
                levy_fbm_cov(pts[i], pts2[j], h)
                - levy_fbm_cov(pts[i], center2, h)
                - levy_fbm_cov(center, pts2[j], h)
                + levy_fbm_cov(center, center2, h)
            )
            assert c[i, j] == pytest.approx(expect, rel=1e-12, abs=1e-12)
