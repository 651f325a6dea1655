"""Harmonic content of the classical motion.

Two routes: the first perturbative iterate in l^2 (built on the bare
frequency omega), and a discrete Fourier projection of a sampled trajectory
onto harmonics of its measured fundamental.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import (
    Trajectory,
    _hermite,
    effective_period,
    integrate_trajectory,
    measured_period,
    vector_field,
)
from .errors import ConfigError, IncompleteOrbit
from .params import SnyderParams

MIN_PERIODS = 4


def perturbative_q1(params: SnyderParams, t):
    """First-order position iterate, normalised so that q1(0) = 1."""
    w, l = params.omega, params.l
    a = l * l * w * w
    c1 = 1.0 - 0.75 * a
    c3 = a / 12.0
    q10 = 1.0 - c1 - c3
    t = np.asarray(t, dtype=float)
    return c1 * np.cos(w * t) + c3 * np.cos(3 * w * t) + q10


def perturbative_p1(params: SnyderParams, t):
    # Coefficients kept exactly as published, including the mixed powers of omega.
    w, l = params.omega, params.l
    l2, l4 = l * l, l**4
    s1 = -1.0 + l2 * w**2 - 5.0 / 24.0 * l4 * w**5
    s3 = -1.0 / 9.0 * l2 * w**3 + 11.0 / 144.0 * l4 * w**5
    s5 = -1.0 / 240.0 * l4 * w**5
    t = np.asarray(t, dtype=float)
    return s1 * np.sin(w * t) + s3 * np.sin(3 * w * t) + s5 * np.sin(5 * w * t)


def perturbative_coefficients(params: SnyderParams, component: str, K: int):
    """Cosine and sine coefficients (index k = 0..K) of q1 or p1 in harmonics of omega."""
    cos = np.zeros(K + 1)
    sin = np.zeros(K + 1)
    w, l = params.omega, params.l
    if component == "q":
        a = l * l * w * w
        terms = {1: 1.0 - 0.75 * a, 3: a / 12.0}
        terms[0] = 1.0 - terms[1] - terms[3]
        for k, v in terms.items():
            if k <= K:
                cos[k] = v
    elif component == "p":
        l2, l4 = l * l, l**4
        terms = {
            1: -1.0 + l2 * w**2 - 5.0 / 24.0 * l4 * w**5,
            3: -1.0 / 9.0 * l2 * w**3 + 11.0 / 144.0 * l4 * w**5,
            5: -1.0 / 240.0 * l4 * w**5,
        }
        for k, v in terms.items():
            if k <= K:
                sin[k] = v
    else:
        raise ConfigError(f"component must be 'q' or 'p', got {component!r}")
    return cos, sin


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Fourier coefficients of one trajectory component.

    ``cos_coeffs[k]`` and ``sin_coeffs[k]`` multiply cos(k W (t - t0)) and
    sin(k W (t - t0)) with W = ``fundamental``; index 0 holds the mean.
    """

    fundamental: float
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    residual: float
    mean_square: float
    periods: int
    component: str
    t0: float = 0.0

    @property
    def K(self) -> int:
        return self.cos_coeffs.size - 1

    def power(self) -> float:
        """Mean square carried by the retained harmonics."""
        c, s = self.cos_coeffs, self.sin_coeffs
        return float(c[0] ** 2 + 0.5 * np.sum(c[1:] ** 2 + s[1:] ** 2))

    def reconstruct(self, t):
        t = np.asarray(t, dtype=float)
        phase = self.fundamental * (t - self.t0)
        out = np.full_like(phase, self.cos_coeffs[0])
        for k in range(1, self.K + 1):
            out += self.cos_coeffs[k] * np.cos(k * phase) + self.sin_coeffs[k] * np.sin(k * phase)
        return out


def _resample(traj: Trajectory, times: np.ndarray):
    pos = (times - traj.t0) / traj.dt
    i = np.clip(np.floor(pos).astype(int), 0, len(traj) - 2)
    s = pos - i
    y0 = (traj.q[i], traj.p[i])
    y1 = (traj.q[i + 1], traj.p[i + 1])
    d0 = vector_field(traj.params, y0)
    d1 = vector_field(traj.params, y1)
    q = _hermite(y0[0], y1[0], d0[0], d1[0], traj.dt, s)
    p = _hermite(y0[1], y1[1], d0[1], d1[1], traj.dt, s)
    return q, p


def extract_harmonics(
    traj: Trajectory, component: str = "q", K: int = 9, periods: int | None = None
) -> HarmonicSpectrum:
    """Project one component onto harmonics of the measured fundamental.

    The window starts at the first sample and covers exactly ``periods`` whole
    periods (default: as many as the trajectory holds, at least 4). When the
    window does not end on a sample, the trajectory is resampled onto a
    uniform grid with Hermite interpolation. The trapezoidal rule on a
    periodic window is the plain mean, which is spectrally accurate.
    """
    if component not in ("q", "p"):
        raise ConfigError(f"component must be 'q' or 'p', got {component!r}")
    if K < 1:
        raise ConfigError("K must be >= 1")
    T = measured_period(traj)
    available = int(math.floor((traj.t_end - traj.t0) / T + 1e-6))
    if periods is None:
        periods = available
    if periods < MIN_PERIODS or periods > available:
        raise IncompleteOrbit(
            f"need {max(periods, MIN_PERIODS)} whole periods, trajectory holds {available}"
        )
    span = periods * T
    m_float = span / traj.dt
    M = int(round(m_float))
    if abs(m_float - M) <= 1e-6 and M <= len(traj) - 1:
        signal = getattr(traj, component)[:M]
    else:
        M = int(math.ceil(m_float))
        times = traj.t0 + span * np.arange(M) / M
        q, p = _resample(traj, times)
        signal = q if component == "q" else p

    W = 2.0 * math.pi / T
    phase = 2.0 * math.pi * periods * np.arange(M) / M
    cos = np.empty(K + 1)
    sin = np.empty(K + 1)
    cos[0], sin[0] = np.mean(signal), 0.0
    for k in range(1, K + 1):
        cos[k] = 2.0 * np.mean(signal * np.cos(k * phase))
        sin[k] = 2.0 * np.mean(signal * np.sin(k * phase))

    recon = np.full(M, cos[0])
    for k in range(1, K + 1):
        recon += cos[k] * np.cos(k * phase) + sin[k] * np.sin(k * phase)
    residual = float(np.sqrt(np.mean((signal - recon) ** 2)))
    return HarmonicSpectrum(
        fundamental=W,
        cos_coeffs=cos,
        sin_coeffs=sin,
        residual=residual,
        mean_square=float(np.mean(signal**2)),
        periods=periods,
        component=component,
        t0=traj.t0,
    )


@dataclass(frozen=True)
class ComparisonRow:
    k: int
    measured: float
    perturbative: float
    abs_dev: float
    rel_dev: float


def harmonic_trajectory(params: SnyderParams, periods: int = 8, steps_per_period: int = 1000) -> Trajectory:
    """Integrated trajectory from (1, 0) whose samples tile whole periods exactly."""
    T = effective_period(params)
    return integrate_trajectory(params, t_end=periods * T, dt=T / steps_per_period)


def compare_harmonics(
    params: SnyderParams,
    K: int = 9,
    periods: int = 8,
    steps_per_period: int = 1000,
    component: str = "q",
) -> tuple[HarmonicSpectrum, list[ComparisonRow]]:
    """Measured harmonics of the exact motion against the perturbative iterate.

    q is even in time, so its cosine coefficients are compared; p is odd and
    its sine coefficients are compared. ``rel_dev`` is NaN where the
    perturbative coefficient vanishes.
    """
    traj = harmonic_trajectory(params, periods, steps_per_period)
    spectrum = extract_harmonics(traj, component, K, periods)
    pert_cos, pert_sin = perturbative_coefficients(params, component, K)
    measured = spectrum.cos_coeffs if component == "q" else spectrum.sin_coeffs
    predicted = pert_cos if component == "q" else pert_sin
    rows = []
    for k in range(K + 1):
        dev = abs(measured[k] - predicted[k])
        rel = dev / abs(predicted[k]) if predicted[k] != 0.0 else math.nan
        rows.append(ComparisonRow(k, float(measured[k]), float(predicted[k]), float(dev), float(rel)))
    return spectrum, rows
