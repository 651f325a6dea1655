import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from snyder_osc.classical import closed_form_state, effective_period, integrate_trajectory
from snyder_osc.errors import IncompleteOrbit
from snyder_osc.harmonics import (
    compare_harmonics,
    extract_harmonics,
    harmonic_trajectory,
    perturbative_coefficients,
    perturbative_p1,
    perturbative_q1,
)
from snyder_osc.params import SnyderParams


def fft_oracle(params, component="q", M=4096):
    """Fourier coefficients of the exact solution over one period, via numpy's FFT."""
    T = effective_period(params)
    t = T * np.arange(M) / M
    s = closed_form_state(params, t)
    F = np.fft.rfft(s.q if component == "q" else s.p)
    cos = 2 * F.real / M
    sin = -2 * F.imag / M
    cos[0] /= 2
    return cos, sin


# --- perturbative series ------------------------------------------------------

def test_q1_undeformed():
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(perturbative_q1(SnyderParams(0, 1.3), t), np.cos(1.3 * t), atol=1e-15)


@given(l=st.floats(0, 2), omega=st.floats(0.01, 5))
def test_q1_starts_at_one(l, omega):
    assert perturbative_q1(SnyderParams(l, omega), 0.0) == pytest.approx(1.0, abs=1e-12)


def test_q1_third_harmonic_coefficient():
    cos, _ = perturbative_coefficients(SnyderParams(0.1, 1.0), "q", 5)
    assert cos[3] == pytest.approx(8.3333333e-4, rel=1e-7)


def test_p1_undeformed_and_origin():
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(perturbative_p1(SnyderParams(0, 1.0), t), -np.sin(t), atol=1e-15)
    assert perturbative_p1(SnyderParams(0.3, 1.7), 0.0) == 0.0


def test_p1_third_harmonic_coefficient():
    _, sin = perturbative_coefficients(SnyderParams(0.1, 1.0), "p", 5)
    assert sin[3] == pytest.approx(-1 / 900 + 11 / 1440000, rel=1e-12)
    assert sin[3] == pytest.approx(-1.1035e-3, abs=1e-7)


@pytest.mark.parametrize("component, fn", [("q", perturbative_q1), ("p", perturbative_p1)])
def test_coefficients_reproduce_series(component, fn):
    params = SnyderParams(0.3, 1.4)
    cos, sin = perturbative_coefficients(params, component, 7)
    t = np.linspace(0, 12, 301)
    k = np.arange(8)[:, None]
    recon = cos @ np.cos(k * params.omega * t) + sin @ np.sin(k * params.omega * t)
    np.testing.assert_allclose(recon, fn(params, t), atol=1e-14)


# --- extraction -----------------------------------------------------------------

def test_undeformed_pure_cosine():
    spec = extract_harmonics(harmonic_trajectory(SnyderParams(0.0, 1.0), periods=6), "q", K=9)
    assert spec.cos_coeffs[1] == pytest.approx(1.0, abs=1e-8)
    others = np.concatenate([np.delete(spec.cos_coeffs, 1), spec.sin_coeffs])
    assert np.max(np.abs(others)) < 1e-8


@pytest.mark.parametrize("l", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("component", ["q", "p"])
def test_extraction_matches_fft_of_exact_solution(l, component):
    params = SnyderParams(l, 1.0)
    spec = extract_harmonics(harmonic_trajectory(params, periods=4), component, K=9)
    cos, sin = fft_oracle(params, component)
    np.testing.assert_allclose(spec.cos_coeffs, cos[:10], atol=1e-8)
    np.testing.assert_allclose(spec.sin_coeffs, sin[:10], atol=1e-8)


def test_third_harmonic_by_quadrature():
    params = SnyderParams(0.1, 1.0)
    T = effective_period(params)
    W = 2 * math.pi / T
    c3 = 2 / T * quad(lambda t: closed_form_state(params, t).q * math.cos(3 * W * t), 0, T, limit=200,
                      epsabs=1e-13)[0]
    spec = extract_harmonics(harmonic_trajectory(params, periods=4), "q", K=5)
    assert spec.cos_coeffs[3] == pytest.approx(c3, abs=1e-10)


def test_even_harmonics_vanish():
    spec = extract_harmonics(harmonic_trajectory(SnyderParams(0.5, 1.0), periods=4), "q", K=9)
    c1 = spec.cos_coeffs[1]
    for k in (0, 2, 4, 6, 8):
        assert abs(spec.cos_coeffs[k]) < 1e-6 * c1
        assert abs(spec.sin_coeffs[k]) < 1e-6 * c1


def test_misaligned_sampling_is_resampled():
    params = SnyderParams(0.4, 1.0)
    T = effective_period(params)
    aligned = extract_harmonics(harmonic_trajectory(params, periods=5), "q", K=7)
    odd = integrate_trajectory(params, t_end=5.3 * T, dt=T / 1013.7)
    resampled = extract_harmonics(odd, "q", K=7, periods=5)
    np.testing.assert_allclose(resampled.cos_coeffs, aligned.cos_coeffs, atol=1e-8)
    np.testing.assert_allclose(resampled.sin_coeffs, aligned.sin_coeffs, atol=1e-8)


def test_needs_four_periods():
    params = SnyderParams(0.2, 1.0)
    with pytest.raises(IncompleteOrbit):
        extract_harmonics(harmonic_trajectory(params, periods=3), "q")
    with pytest.raises(IncompleteOrbit):
        extract_harmonics(harmonic_trajectory(params, periods=5), "q", periods=6)


@given(lw=st.floats(0, 0.7))
def test_parseval_bound(lw):
    spec = extract_harmonics(harmonic_trajectory(SnyderParams(lw, 1.0), periods=4, steps_per_period=400), "q", 9)
    assert spec.power() <= spec.mean_square + 1e-12


def test_residual_decreases_with_K():
    traj = harmonic_trajectory(SnyderParams(0.6, 1.0), periods=4)
    residuals = [extract_harmonics(traj, "q", K).residual for K in range(1, 12)]
    assert all(b <= a + 1e-15 for a, b in zip(residuals, residuals[1:]))


@pytest.mark.parametrize("lw", [0.1, 0.3, 0.5])
def test_reconstruction_residual(lw):
    spec = extract_harmonics(harmonic_trajectory(SnyderParams(lw, 1.0), periods=4), "q", 9)
    assert spec.residual < 1e-6


@pytest.mark.parametrize("lw", [0.0, 0.2, 0.5, 0.8])
def test_fundamental_matches_effective_frequency(lw):
    params = SnyderParams(lw, 1.0)
    spec = extract_harmonics(harmonic_trajectory(params, periods=4), "q", 3)
    assert spec.fundamental == pytest.approx(2 * math.pi / effective_period(params), rel=1e-6)


@pytest.mark.parametrize("l", [0.1, 0.05, 0.025])
def test_third_harmonic_ratio_scales_with_l_squared(l):
    ratio = []
    for x in (l, 2 * l):
        spec = extract_harmonics(harmonic_trajectory(SnyderParams(x, 1.0), periods=4), "q", 5)
        ratio.append(spec.cos_coeffs[3] / spec.cos_coeffs[1])
    assert ratio[1] / ratio[0] == pytest.approx(4.0, rel=0.05)


def test_third_harmonic_leading_order_is_one_eighth():
    # Exact leading behaviour of the closed-form solution: c3/c1 = a/8 (1 + O(a)), a = l^2 w^2.
    for l in (0.1, 0.05, 0.02):
        spec = extract_harmonics(harmonic_trajectory(SnyderParams(l, 1.0), periods=4), "q", 5)
        a = l * l
        assert spec.cos_coeffs[3] / spec.cos_coeffs[1] == pytest.approx(a / 8, rel=2 * a)


# --- comparison -----------------------------------------------------------------

def test_compare_undeformed_is_exact():
    _, rows = compare_harmonics(SnyderParams(0.0, 1.0), K=7, periods=4)
    assert max(r.abs_dev for r in rows) < 1e-8


def test_compare_rows_structure():
    _, rows = compare_harmonics(SnyderParams(0.5, 1.0), K=5, periods=4)
    assert [r.k for r in rows] == list(range(6))
    for r in rows:
        assert r.abs_dev == pytest.approx(abs(r.measured - r.perturbative))
        if r.perturbative == 0:
            assert math.isnan(r.rel_dev)


def test_compare_deviation_order():
    # Halving l: the k = 1 and k = 3 deviations fall by 4 (first order in l^2).
    dev = {}
    for l in (0.1, 0.05):
        _, rows = compare_harmonics(SnyderParams(l, 1.0), K=5, periods=4)
        dev[l] = rows
    for k in (1, 3):
        assert dev[0.1][k].abs_dev / dev[0.05][k].abs_dev == pytest.approx(4.0, rel=0.05)


def test_compare_p_component():
    rows = {l: compare_harmonics(SnyderParams(l, 1.0), K=5, periods=4, component="p")[1] for l in (0.1, 0.05)}
    assert [r.k for r in rows[0.1]] == list(range(6))
    assert rows[0.1][1].abs_dev / rows[0.05][1].abs_dev == pytest.approx(4.0, rel=0.05)
