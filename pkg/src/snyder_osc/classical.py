"""Classical oscillator under the deformed bracket {q, p} = 1 - l^2 p^2 (m = 1).

The equations of motion

    dq/dt = p - l^2 p^3
    dp/dt = -omega^2 q + omega^2 l^2 q p^2

conserve p^2 + omega^2 q^2, so orbits are the undeformed ellipses while the
motion along them is reparametrised in time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, CutoffRegime, IncompleteOrbit, NonUniformSampling, StepTooLarge
from .params import Regime, SnyderParams, classify_regime

INTEGRATED = "integrated"
CLOSED_FORM = "closed_form"

# Relative tolerance on sample spacing accepted by Trajectory.from_samples.
_UNIFORM_RTOL = 1e-9


class PhaseState(NamedTuple):
    q: float
    p: float


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled (t, q, p) record.

    Sample ``k`` sits at ``t0 + k * dt``. ``q`` and ``p`` are stored as
    read-only float arrays.
    """

    t0: float
    dt: float
    q: np.ndarray
    p: np.ndarray
    params: SnyderParams
    source: str = INTEGRATED
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        p = np.array(self.p, dtype=float)
        if q.ndim != 1 or q.shape != p.shape:
            raise ValueError("q and p must be 1-D arrays of equal length")
        if q.size == 0:
            raise ValueError("trajectory must contain at least one sample")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if self.source not in (INTEGRATED, CLOSED_FORM):
            raise ValueError(f"unknown trajectory source {self.source!r}")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_samples(cls, t, q, p, params: SnyderParams, source: str = INTEGRATED) -> "Trajectory":
        """Build a trajectory from explicit sample times, which must be uniform."""
        t = np.asarray(t, dtype=float)
        if t.size < 2:
            raise NonUniformSampling("need at least two samples to establish a step")
        steps = np.diff(t)
        dt = (t[-1] - t[0]) / (t.size - 1)
        if dt <= 0 or np.max(np.abs(steps - dt)) > _UNIFORM_RTOL * max(abs(dt), abs(t[-1])):
            raise NonUniformSampling("sample times are not uniformly spaced")
        return cls(float(t[0]), float(dt), q, p, params, source)

    def __len__(self) -> int:
        return self.q.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.q.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.q.size - 1)

    @property
    def samples(self) -> list[PhaseState]:
        return [PhaseState(float(a), float(b)) for a, b in zip(self.q, self.p)]

    @property
    def invariant(self) -> np.ndarray:
        return self.p**2 + self.params.omega**2 * self.q**2

    @property
    def max_drift(self) -> float:
        """Largest departure of p^2 + omega^2 q^2 from its initial value."""
        inv = self.invariant
        return float(np.max(np.abs(inv - inv[0])))


def vector_field(params: SnyderParams, state):
    """Return ``(dq/dt, dp/dt)``; works on scalars or arrays."""
    q, p = state
    l2 = params.l * params.l
    w2 = params.omega * params.omega
    return p - l2 * p**3, -w2 * q + w2 * l2 * q * p**2


def orbit_invariant(state, params: SnyderParams):
    q, p = state
    return p**2 + params.omega**2 * q**2


def _require_oscillatory(params: SnyderParams) -> None:
    if classify_regime(params) is Regime.CUTOFF:
        raise CutoffRegime(
            f"l*omega = {params.l_omega:.17g} >= 1: no closed-form oscillation (frequency cutoff)"
        )


def effective_period(params: SnyderParams) -> float:
    """Period 2 pi / (omega sqrt(1 - l^2 omega^2)) of the orbit through (1, 0)."""
    _require_oscillatory(params)
    return 2.0 * math.pi / (params.omega * math.sqrt(1.0 - params.deformation))


def effective_frequency(params: SnyderParams) -> float:
    _require_oscillatory(params)
    return params.omega * math.sqrt(1.0 - params.deformation)


def orbit_period(params: SnyderParams, invariant: float) -> float:
    """Period of the orbit with p^2 + omega^2 q^2 = ``invariant``.

    The orbit has momentum amplitude sqrt(invariant), so its deformation is
    l^2 * invariant. Returns ``inf`` when that reaches 1 (the motion then
    creeps towards a fixed point instead of oscillating).
    """
    a = params.l**2 * invariant
    if a >= 1.0:
        return math.inf
    return 2.0 * math.pi / (params.omega * math.sqrt(1.0 - a))


def solve_phase_constant(params: SnyderParams) -> float:
    """Phase constant d placing the closed-form solution at q(0) = 1.

    q(0) = 1 requires the tangent argument d * sqrt(1 - l^2 omega^2) to sit at
    pi/2, where the closed-form expression saturates.
    """
    _require_oscillatory(params)
    return 0.5 * math.pi / math.sqrt(1.0 - params.deformation)


def _phase(params: SnyderParams, t, d):
    return (params.omega * np.asarray(t, dtype=float) + d) * math.sqrt(1.0 - params.deformation)


def closed_form_branches(params: SnyderParams, t, d: float | None = None):
    """The two raw branches +-tan(x)/sqrt(1/(1 - l^2 w^2) + tan^2 x) of q(t).

    Each branch jumps by 2 at every zero of cos(x); :func:`closed_form_state`
    stitches them into one smooth trajectory.
    """
    _require_oscillatory(params)
    if d is None:
        d = solve_phase_constant(params)
    x = _phase(params, t, d)
    tan = np.tan(x)
    q = tan / np.sqrt(1.0 / (1.0 - params.deformation) + tan**2)
    return q, -q


def closed_form_state(params: SnyderParams, t, d: float | None = None) -> PhaseState:
    """Closed-form (q, p) at time(s) ``t`` for the orbit through (1, 0).

    With x the tangent argument, multiplying the raw expression by
    sign(cos x) selects, on each half period, the branch that keeps q smooth:

        q = sqrt(1 - a) sin x / sqrt(1 - a sin^2 x),   a = l^2 omega^2

    p follows from p = +-omega sqrt(1 - q^2) with
    sqrt(1 - q^2) = |cos x| / sqrt(1 - a sin^2 x); its sign is that of dq/dt
    (1 - l^2 p^2 > 0 below the cutoff), which is the sign of cos x.
    Scalars in give floats out; arrays give arrays.
    """
    _require_oscillatory(params)
    if d is None:
        d = solve_phase_constant(params)
    a = params.deformation
    x = _phase(params, t, d)
    s, c = np.sin(x), np.cos(x)
    root = np.sqrt(1.0 - a * s * s)
    q = math.sqrt(1.0 - a) * s / root
    p = params.omega * c / root
    if np.ndim(q) == 0:
        return PhaseState(float(q), float(p))
    return PhaseState(q, p)


def closed_form_trajectory(params: SnyderParams, t_end: float, dt: float, t0: float = 0.0) -> Trajectory:
    _check_span(t_end - t0, dt)
    n = int(math.floor((t_end - t0) / dt + 1e-9)) + 1
    t = t0 + dt * np.arange(n)
    q, p = closed_form_state(params, t)
    return Trajectory(t0, dt, q, p, params, CLOSED_FORM)


def _check_span(span: float, dt: float) -> None:
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    if not span > 0:
        raise ConfigError(f"t_end must be > 0 (after t0), got span {span!r}")


def integrate_trajectory(
    params: SnyderParams,
    init: PhaseState = PhaseState(1.0, 0.0),
    t_end: float = 2.0 * math.pi,
    dt: float = 2.0 * math.pi / 1000,
) -> Trajectory:
    """Fixed-step classical RK4 from ``init`` at t = 0 up to ``t_end``.

    Refuses steps longer than 1/20 of the orbit period; in the cutoff regime
    (infinite period) the bare period 2 pi / omega is used for that check.
    The conservation drift of p^2 + omega^2 q^2 is stored in ``meta``.
    """
    _check_span(t_end, dt)
    q, p = float(init[0]), float(init[1])
    period = orbit_period(params, p * p + params.omega**2 * q * q)
    if not math.isfinite(period):
        period = 2.0 * math.pi / params.omega
    if dt > period / 20.0:
        raise StepTooLarge(f"dt = {dt:.6g} exceeds period/20 = {period / 20.0:.6g}")

    n_steps = int(math.floor(t_end / dt + 1e-9))
    l2 = params.l * params.l
    w2 = params.omega * params.omega
    h, h2, h6 = dt, 0.5 * dt, dt / 6.0
    qs = np.empty(n_steps + 1)
    ps = np.empty(n_steps + 1)
    qs[0], ps[0] = q, p
    # Plain floats: this loop dominates the runtime of every classical workflow.
    for k in range(1, n_steps + 1):
        k1q = p - l2 * p * p * p
        k1p = -w2 * q * (1.0 - l2 * p * p)
        qm, pm = q + h2 * k1q, p + h2 * k1p
        k2q = pm - l2 * pm * pm * pm
        k2p = -w2 * qm * (1.0 - l2 * pm * pm)
        qm, pm = q + h2 * k2q, p + h2 * k2p
        k3q = pm - l2 * pm * pm * pm
        k3p = -w2 * qm * (1.0 - l2 * pm * pm)
        qm, pm = q + h * k3q, p + h * k3p
        k4q = pm - l2 * pm * pm * pm
        k4p = -w2 * qm * (1.0 - l2 * pm * pm)
        q += h6 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        p += h6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        qs[k], ps[k] = q, p

    traj = Trajectory(0.0, dt, qs, ps, params, INTEGRATED)
    traj.meta["drift"] = traj.max_drift
    return traj


def _hermite(y0, y1, d0, d1, h, s):
    """Cubic Hermite interpolant on one step, s in [0, 1]."""
    s2, s3 = s * s, s * s * s
    return (
        (2 * s3 - 3 * s2 + 1) * y0
        + (s3 - 2 * s2 + s) * h * d0
        + (-2 * s3 + 3 * s2) * y1
        + (s3 - s2) * h * d1
    )


def interpolate_state(traj: Trajectory, t: float) -> PhaseState:
    """State at an arbitrary time inside the trajectory.

    Cubic Hermite interpolation using the vector field for the slopes, so the
    error is O(dt^4) like the samples themselves.
    """
    pos = (t - traj.t0) / traj.dt
    n = len(traj)
    if pos < -1e-9 or pos > n - 1 + 1e-9:
        raise ValueError(f"t = {t!r} outside trajectory span")
    i = min(max(int(math.floor(pos)), 0), n - 2)
    s = pos - i
    y0 = (traj.q[i], traj.p[i])
    y1 = (traj.q[i + 1], traj.p[i + 1])
    d0 = vector_field(traj.params, y0)
    d1 = vector_field(traj.params, y1)
    q = _hermite(y0[0], y1[0], d0[0], d1[0], traj.dt, s)
    p = _hermite(y0[1], y1[1], d0[1], d1[1], traj.dt, s)
    return PhaseState(float(q), float(p))


def zero_crossings(traj: Trajectory, direction: int = -1) -> np.ndarray:
    """Times where q changes sign, refined on the Hermite interpolant.

    ``direction=-1`` keeps downward crossings (q: + to -), ``+1`` upward ones and
    ``0`` both.
    """
    q = traj.q
    if len(traj) < 2:
        return np.empty(0)
    lo, hi = q[:-1], q[1:]
    hits = ((lo > 0) & (hi <= 0)) | ((lo < 0) & (hi >= 0))
    if direction < 0:
        hits &= lo > 0
    elif direction > 0:
        hits &= lo < 0
    times = []
    for i in np.flatnonzero(hits):
        y0, y1 = q[i], q[i + 1]
        if y1 == 0.0:
            times.append(traj.t0 + (i + 1) * traj.dt)
            continue
        d0 = vector_field(traj.params, (q[i], traj.p[i]))[0]
        d1 = vector_field(traj.params, (q[i + 1], traj.p[i + 1]))[0]
        s = brentq(lambda s: _hermite(y0, y1, d0, d1, traj.dt, s), 0.0, 1.0, xtol=1e-15, rtol=1e-15)
        times.append(traj.t0 + (i + s) * traj.dt)
    return np.asarray(times)


def measured_period(traj: Trajectory) -> float:
    """Mean spacing of successive downward zero crossings of q."""
    t = zero_crossings(traj, -1)
    if t.size < 2:
        raise IncompleteOrbit("trajectory does not contain a full period")
    return float((t[-1] - t[0]) / (t.size - 1))


def action_integral(traj: Trajectory) -> float:
    """Loop integral of p dq over the first complete period.

    The loop runs between two successive downward zero crossings of q; the
    trapezoidal sum uses the interpolated states at the crossings as end
    points so that the polygon closes exactly.
    """
    t = zero_crossings(traj, -1)
    if t.size < 2:
        raise IncompleteOrbit("trajectory does not contain a full period")
    ta, tb = t[0], t[1]
    i0 = int(math.floor((ta - traj.t0) / traj.dt)) + 1
    i1 = int(math.ceil((tb - traj.t0) / traj.dt)) - 1
    start, stop = interpolate_state(traj, ta), interpolate_state(traj, tb)
    q = np.concatenate(([start.q], traj.q[i0 : i1 + 1], [stop.q]))
    p = np.concatenate(([start.p], traj.p[i0 : i1 + 1], [stop.p]))
    return float(np.sum(0.5 * (p[1:] + p[:-1]) * np.diff(q)))
