"""Sobolev inner products, explicit constants, pairing identity."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from fbmlocal.sobolev import (
    TestFunction,
    a_h_constant,
    check_smoothness,
    fbm_pairing_spectral,
    fbm_pairing_time,
    indicator_sq_norm,
    lemma22_dual_norm,
    pairing_identity_check,
    r_h_spectral,
    riesz_fourier_constant,
    sobolev_inner,
    sobolev_norm,
)


def test_gamma_routine_sanity():
    # the constants lean on the library gamma; pin its accuracy here
    assert math.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    for n in range(1, 8):
        assert math.gamma(n + 1) == pytest.approx(math.factorial(n), rel=1e-13)


def test_smoothness_guard():
    for bad in (0.5, -0.5, 0.7, 0.5 - 1e-10):
        with pytest.raises(ValueError):
            check_smoothness(bad)
    assert check_smoothness(0.25) == 0.25


def test_testfunction_shape():
    phi = TestFunction.hat(0.0, 1.0)
    assert phi(0.0) == pytest.approx(1.0)
    assert phi(0.5) == pytest.approx(0.5)
    assert phi(1.0) == 0.0
    assert phi(2.0) == 0.0
    assert phi(-3.0) == 0.0
    lo, hi = phi.support()
    assert (lo, hi) == (-1.0, 1.0)


def test_testfunction_validation():
    with pytest.raises(ValueError):
        TestFunction.from_samples([0.0, 1.0], [])  # fewer than 3 nodes
    with pytest.raises(ValueError):
        TestFunction.from_samples([0.0, 1.0, 0.5], [1.0])  # not increasing
    with pytest.raises(ValueError):
        TestFunction.hat(0.0, -1.0)


def test_shift_dilate_bookkeeping():
    phi = TestFunction.from_samples([-1.0, 0.0, 2.0], [1.5])
    sh = phi.shifted(3.0)
    assert sh.support() == (2.0, 5.0)
    assert sh(3.0) == pytest.approx(phi(0.0))
    di = phi.dilated(2.0)
    assert di.support() == (-0.5, 1.0)
    assert di(0.25) == pytest.approx(phi(0.5))


def test_fourier_at_zero_is_mass():
    phi = TestFunction.from_samples([-1.0, -0.2, 0.5, 1.3], [0.7, -0.4])
    # (2 pi)^{-1/2} integral of phi
    xs = np.linspace(-1.0, 1.3, 20001)
    mass = np.trapezoid([phi(x) for x in xs], xs)
    assert phi.fourier(0.0)[0].real == pytest.approx(mass / math.sqrt(2 * math.pi), abs=1e-6)


def test_s_zero_is_l2():
    rng = np.random.default_rng(21)
    for _ in range(5):
        n1, n2 = rng.integers(3, 7, size=2)
        phi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, n1)), rng.uniform(-1, 1, n1 - 2))
        psi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, n2)), rng.uniform(-1, 1, n2 - 2))
        assert sobolev_inner(phi, psi, 0.0) == pytest.approx(phi.l2_inner(psi), rel=1e-8, abs=1e-10)


def test_symmetry_and_bilinearity():
    rng = np.random.default_rng(22)
    phi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, 5)), rng.uniform(-1, 1, 3))
    psi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, 4)), rng.uniform(-1, 1, 2))
    for s in (-0.3, 0.0, 0.3):
        a = sobolev_inner(phi, psi, s)
        b = sobolev_inner(psi, phi, s)
        assert a == pytest.approx(b, rel=1e-10, abs=1e-12)
        # scaling one argument scales the pairing
        phi2 = TestFunction(nodes=phi.nodes, values=2.5 * phi.values)
        assert sobolev_inner(phi2, psi, s) == pytest.approx(2.5 * a, rel=1e-9, abs=1e-12)


def test_norm_positivity_and_cauchy_schwarz():
    rng = np.random.default_rng(23)
    for _ in range(5):
        phi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, 5)), rng.uniform(-1, 1, 3))
        psi = TestFunction.from_samples(np.sort(rng.uniform(-2, 2, 5)), rng.uniform(-1, 1, 3))
        for s in (-0.25, 0.25):
            np_, ns = sobolev_norm(phi, s), sobolev_norm(psi, s)
            assert np_ >= 0.0
            assert abs(sobolev_inner(phi, psi, s)) <= np_ * ns * (1 + 1e-9)


def test_dilation_law_quick():
    phi = TestFunction.hat(0.2, 0.8)
    for s in (-0.25, 0.25):
        base = sobolev_norm(phi, s) ** 2
        got = sobolev_norm(phi.dilated(4.0), s) ** 2
        assert got == pytest.approx(4.0 ** (2 * s - 1.0) * base, rel=1e-6)


def test_a_h_values():
    assert a_h_constant(0.5) == 1.0
    assert a_h_constant(3 / 4) == pytest.approx(math.sin(0.75 * math.pi) * math.gamma(2.5), rel=1e-14)
    assert a_h_constant(3 / 4) == pytest.approx(0.93998, abs=1e-5)
    assert a_h_constant(1e-6) < 1e-4
    assert a_h_constant(1.0 - 1e-6) < 1e-4
    for h in np.linspace(0.01, 0.99, 25):
        assert a_h_constant(h) > 0.0


def test_indicator_norm_against_quadrature():
    # |chi_hat|^2 = (1 - cos xi) / (pi xi^2), integrated against |xi|^{2s};
    # beyond the cutoff the non-oscillatory 1/(pi xi^{2-2s}) piece still
    # carries mass and is added in closed form, the cosine piece is
    # O(cutoff^{2s-2}) and ignored
    cutoff = 400.0
    for s in (-0.2, 0.15):
        head = 2.0 * quad(
            lambda x: (1.0 - math.cos(x)) / (math.pi * x * x) * x ** (2 * s),
            0.0,
            cutoff,
            limit=800,
        )[0]
        tail = 2.0 * cutoff ** (2 * s - 1.0) / (math.pi * (1.0 - 2.0 * s))
        assert indicator_sq_norm(s) == pytest.approx(head + tail, rel=1e-4)
    assert indicator_sq_norm(0.0) == pytest.approx(1.0, rel=1e-10)


def test_r_h_spectral_values():
    assert r_h_spectral(0.5) == 0.0
    for h in (0.1, 0.3, 0.7, 0.9):
        assert r_h_spectral(h) > 0.0


def test_riesz_constant():
    assert riesz_fourier_constant(1, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert riesz_fourier_constant(2, 1.0) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        riesz_fourier_constant(1, 1.0)
    with pytest.raises(ValueError):
        riesz_fourier_constant(2, -0.5)
    # diverges toward alpha -> n^- (Gamma((n-alpha)/2) pole)
    grid = [riesz_fourier_constant(1, a) for a in (0.9, 0.95, 0.99)]
    assert grid[0] < grid[1] < grid[2]


def test_pairing_brownian_disjoint():
    phi = TestFunction.hat(0.0, 0.5)
    psi = TestFunction.hat(3.0, 0.5)
    assert abs(fbm_pairing_time(phi, psi, 0.5)) < 1e-12
    assert abs(fbm_pairing_spectral(phi, psi, 0.5)) < 1e-8


def test_pairing_identity_examples():
    phi = TestFunction.hat(0.5, 0.5)  # support [0, 1]
    psi = TestFunction.hat(2.5, 0.5)  # support [2, 3]
    assert pairing_identity_check(phi, psi, 0.75) <= 1e-3
    assert pairing_identity_check(phi, phi, 0.3) <= 1e-3


def test_lemma22_dual_norm_decreasing_in_k():
    vals = [lemma22_dual_norm(2.0, 0.25, k, truncation_t=16.0, n=64) for k in (2.0, 4.0, 8.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0
