import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from snyder_osc.classical import (
    PhaseState,
    Trajectory,
    action_integral,
    closed_form_branches,
    closed_form_state,
    closed_form_trajectory,
    effective_period,
    integrate_trajectory,
    measured_period,
    orbit_invariant,
    solve_phase_constant,
    vector_field,
    zero_crossings,
)
from snyder_osc.errors import CutoffRegime, IncompleteOrbit, NonUniformSampling, StepTooLarge
from snyder_osc.io import read_trajectory, write_trajectory
from snyder_osc.params import SnyderParams


# --- vector field -----------------------------------------------------------

@given(q=st.floats(-5, 5), p=st.floats(-5, 5), omega=st.floats(0.1, 10))
def test_vector_field_undeformed(q, p, omega):
    dq, dp = vector_field(SnyderParams(0.0, omega), (q, p))
    assert dq == p
    assert dp == pytest.approx(-omega**2 * q)


def test_vector_field_at_rest():
    assert vector_field(SnyderParams(0.7, 1.3), (1.0, 0.0)) == (0.0, -1.3**2)


def test_vector_field_deformed_value():
    assert vector_field(SnyderParams(0.5, 1.0), (0.0, 1.0)) == (0.75, 0.0)


# --- closed form ----------------------------------------------------------

def test_closed_form_initial_condition():
    s = closed_form_state(SnyderParams(0.5, 1.0), 0.0)
    assert s.q == pytest.approx(1.0, abs=1e-15)
    assert s.p == pytest.approx(0.0, abs=1e-15)


def test_closed_form_undeformed():
    params = SnyderParams(0.0, 1.7)
    t = np.linspace(0, 20, 401)
    q, p = closed_form_state(params, t)
    np.testing.assert_allclose(q, np.cos(1.7 * t), atol=1e-14)
    np.testing.assert_allclose(p, -1.7 * np.sin(1.7 * t), atol=1e-13)


def test_closed_form_quarter_period():
    params = SnyderParams(0.1, 1.0)
    s = closed_form_state(params, effective_period(params) / 4)
    assert s.q == pytest.approx(0.0, abs=1e-15)
    assert abs(s.p) == pytest.approx(1.0, abs=1e-15)
    traj = integrate_trajectory(params, t_end=effective_period(params) / 4, dt=effective_period(params) / 4000)
    assert traj.q[-1] == pytest.approx(0.0, abs=1e-10)
    assert abs(traj.p[-1]) == pytest.approx(1.0, abs=1e-10)


def test_stitched_solution_follows_a_raw_branch():
    params = SnyderParams(0.6, 1.0)
    t = np.linspace(0, 3 * effective_period(params), 2001)
    d = solve_phase_constant(params)
    x = (t + d) * math.sqrt(1 - params.deformation)
    keep = np.abs(np.cos(x)) > 1e-3
    plus, minus = closed_form_branches(params, t)
    q, _ = closed_form_state(params, t)
    err = np.minimum(np.abs(q - plus), np.abs(q - minus))
    assert np.max(err[keep]) < 1e-12


def test_momentum_magnitude_matches_orbit():
    params = SnyderParams(0.4, 2.0)
    t = np.linspace(0, 10, 997)
    q, p = closed_form_state(params, t)
    np.testing.assert_allclose(np.abs(p), 2.0 * np.sqrt(np.clip(1 - q**2, 0, None)), atol=1e-7)


def test_closed_form_refuses_cutoff():
    with pytest.raises(CutoffRegime):
        closed_form_state(SnyderParams(2.0, 1.0), 0.0)
    with pytest.raises(CutoffRegime):
        solve_phase_constant(SnyderParams(1.0, 1.0))
    with pytest.raises(CutoffRegime):
        effective_period(SnyderParams(1.0, 1.0))


@pytest.mark.parametrize("l, omega", [(0.0, 1.0), (0.3, 1.0), (0.5, 1.0), (0.2, 3.0)])
def test_phase_constant_against_root_solve(l, omega):
    params = SnyderParams(l, omega)
    s = math.sqrt(1 - params.deformation)

    def p0(d):  # momentum at t = 0 from the raw tangent form: vanishes where the branch saturates
        x = d * s
        return math.cos(x) / math.sqrt(math.cos(x) ** 2 / (1 - params.deformation) + math.sin(x) ** 2)

    d_root = brentq(p0, 0.5 / s, 2.5 / s, xtol=1e-15)
    assert solve_phase_constant(params) == pytest.approx(d_root, abs=1e-12)
    if l == 0.0:
        assert solve_phase_constant(params) == pytest.approx(math.pi / 2)


@given(lw=st.floats(0, 0.99), omega=st.floats(0.05, 20))
def test_phase_constant_gives_unit_start(lw, omega):
    params = SnyderParams(lw / omega, omega)
    assert closed_form_state(params, 0.0, solve_phase_constant(params)).q == pytest.approx(1.0, abs=1e-10)


def test_closed_form_residual_against_vector_field():
    rng = np.random.default_rng(7)
    params = SnyderParams(0.5, 1.0)
    t = rng.uniform(0, 50, 1000)
    h = 1e-6
    plus, minus = closed_form_state(params, t + h), closed_form_state(params, t - h)
    dq = (plus.q - minus.q) / (2 * h)
    dp = (plus.p - minus.p) / (2 * h)
    fq, fp = vector_field(params, closed_form_state(params, t))
    assert np.max(np.abs(dq - fq)) <= 1e-6
    assert np.max(np.abs(dp - fp)) <= 1e-6


def test_undeformed_limit_rate():
    # sup |q_l - cos| over a fixed window shrinks like l^2
    t = np.linspace(0, 10, 2001)
    errs = [np.max(np.abs(closed_form_state(SnyderParams(l, 1.0), t).q - np.cos(t))) for l in (0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.02)


# --- integrator ---------------------------------------------------------------

def test_integrator_undeformed_full_period():
    traj = integrate_trajectory(SnyderParams(0.0, 1.0), t_end=2 * math.pi, dt=2 * math.pi / 1000)
    assert len(traj) == 1001
    assert traj.q[-1] == pytest.approx(1.0, abs=1e-8)
    assert traj.p[-1] == pytest.approx(0.0, abs=1e-8)


def test_integrator_conservation_ten_periods():
    params = SnyderParams(0.5, 1.0)
    T = effective_period(params)
    traj = integrate_trajectory(params, t_end=10 * T, dt=T / 1000)
    assert traj.meta["drift"] < 1e-9


def test_integrator_matches_closed_form():
    params = SnyderParams(0.5, 1.0)
    T = effective_period(params)
    traj = integrate_trajectory(params, t_end=3 * T, dt=T / 1000)
    q, p = closed_form_state(params, traj.times)
    assert np.max(np.abs(traj.q - q)) < 1e-6
    assert np.max(np.abs(traj.p - p)) < 1e-6


def test_step_too_large():
    params = SnyderParams(0.5, 1.0)
    with pytest.raises(StepTooLarge):
        integrate_trajectory(params, t_end=10, dt=effective_period(params) / 10)


def test_integrator_runs_beyond_cutoff():
    # Beyond the cutoff the motion creeps to the fixed point p^2 = 1/l^2 on the
    # orbit p^2 + q^2 = 1 instead of oscillating.
    traj = integrate_trajectory(SnyderParams(2.0, 1.0), t_end=20.0, dt=0.01)
    assert np.all(np.isfinite(traj.q))
    assert traj.q[-1] == pytest.approx(math.sqrt(0.75), abs=1e-6)
    assert traj.p[-1] == pytest.approx(-0.5, abs=1e-6)
    assert traj.max_drift < 1e-8


def test_integrator_general_initial_condition():
    params = SnyderParams(0.3, 1.0)
    traj = integrate_trajectory(params, PhaseState(0.5, 0.2), t_end=30.0, dt=0.01)
    assert traj.max_drift < 1e-10


@given(q=st.floats(-2, 2), p=st.floats(-2, 2), l=st.floats(0, 0.45))
def test_invariant_conserved_property(q, p, l):
    params = SnyderParams(l, 1.0)
    traj = integrate_trajectory(params, PhaseState(q, p), t_end=5.0, dt=0.005)
    assert traj.max_drift <= 1e-9 * max(1.0, traj.invariant[0])


def test_energy_also_conserved():
    params = SnyderParams(0.5, 1.0)
    traj = integrate_trajectory(params, t_end=30.0, dt=0.01)
    H = 0.5 * traj.p**2 + 0.5 * traj.q**2
    assert np.max(np.abs(H - H[0])) < 1e-9


# --- invariant and period -------------------------------------------------

def test_orbit_invariant_examples():
    assert orbit_invariant(PhaseState(1.0, 0.0), SnyderParams(0.1, 0.5)) == 0.25
    assert orbit_invariant(PhaseState(0.0, 0.5), SnyderParams(0.1, 0.5)) == 0.25


def test_effective_period_values():
    assert effective_period(SnyderParams(0.0, 2.0)) == pytest.approx(math.pi)
    assert effective_period(SnyderParams(0.1, 1.0)) == pytest.approx(6.3148388339965, rel=1e-12)


def test_effective_period_diverges_monotonically():
    lw = np.array([0.5, 0.9, 0.99, 0.999, 0.99999])
    T = [effective_period(SnyderParams(x, 1.0)) for x in lw]
    assert np.all(np.diff(T) > 0)
    assert T[-1] > 100 * T[0]


@pytest.mark.parametrize("lw", [0.0, 0.1, 0.5, 0.9])
def test_zero_crossing_spacing(lw):
    params = SnyderParams(lw, 1.0)
    T = effective_period(params)
    traj = integrate_trajectory(params, t_end=5 * T, dt=T / 1000)
    t = zero_crossings(traj, 0)
    np.testing.assert_allclose(np.diff(t), T / 2, atol=1e-6 * T)
    assert measured_period(traj) == pytest.approx(T, rel=1e-6)


def test_measured_period_needs_two_crossings():
    params = SnyderParams(0.1, 1.0)
    traj = integrate_trajectory(params, t_end=0.5 * effective_period(params), dt=0.01)
    with pytest.raises(IncompleteOrbit):
        measured_period(traj)


# --- action ---------------------------------------------------------------------

@pytest.mark.parametrize("l, omega", [(0.0, 1.0), (0.0, 2.5), (0.5, 1.0), (0.2, 2.5)])
def test_action_is_ellipse_area(l, omega):
    params = SnyderParams(l, omega)
    T = effective_period(params)
    traj = integrate_trajectory(params, t_end=1.5 * T, dt=T / 1000)
    assert action_integral(traj) == pytest.approx(math.pi * omega, rel=1e-4)


def test_action_needs_full_period():
    params = SnyderParams(0.5, 1.0)
    T = effective_period(params)
    traj = integrate_trajectory(params, t_end=0.5 * T, dt=T / 1000)
    with pytest.raises(IncompleteOrbit):
        action_integral(traj)


# --- trajectory container ---------------------------------------------------

def test_trajectory_samples_and_times():
    traj = closed_form_trajectory(SnyderParams(0.2, 1.0), 1.0, 0.25)
    assert len(traj) == 5
    np.testing.assert_allclose(traj.times, [0, 0.25, 0.5, 0.75, 1.0])
    assert traj.samples[0] == PhaseState(1.0, traj.p[0])
    with pytest.raises(ValueError):
        traj.q[0] = 3.0


def test_non_uniform_samples_rejected():
    params = SnyderParams(0.1, 1.0)
    with pytest.raises(NonUniformSampling):
        Trajectory.from_samples([0, 0.1, 0.3], [1, 1, 1], [0, 0, 0], params)


def test_csv_round_trip(tmp_path):
    params = SnyderParams(0.3, 1.0)
    traj = integrate_trajectory(params, t_end=2.0, dt=0.01)
    path = write_trajectory(tmp_path / "traj.csv", traj)
    assert path.read_text().splitlines()[0] == "t,q,p,invariant"
    back = read_trajectory(path, params)
    np.testing.assert_array_equal(back.q, traj.q)
    np.testing.assert_array_equal(back.p, traj.p)
    assert back.dt == pytest.approx(traj.dt, rel=1e-12)
