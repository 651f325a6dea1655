"""The computations behind each CLI subcommand.

Every workflow returns a :class:`Result`: scalar metrics (used by the sweep)
plus named tables that the CLI writes as CSV files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classical, fock, grid, harmonics
from .errors import IncompleteOrbit
from .params import Regime, SnyderParams


@dataclass
class Result:
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # file stem -> (header, rows)
    objects: dict = field(default_factory=dict)  # in-memory results for plotting


def simulate(params: SnyderParams, periods: float = 2.0, steps_per_period: int = 1000,
             dt: float | None = None, closed_form_only: bool = False) -> Result:
    res = Result()
    oscillatory = params.regime is Regime.OSCILLATORY
    if closed_form_only or oscillatory:
        period = classical.effective_period(params)  # raises CutoffRegime
    else:
        period = 2.0 * math.pi / params.omega
    step = dt if dt is not None else period / steps_per_period
    t_end = periods * period

    closed = None
    if oscillatory:
        closed = classical.closed_form_trajectory(params, t_end, step)
        res.tables["trajectory_closed_form"] = (classical_header(), _traj_rows(closed))
        res.objects["closed_form"] = closed
    if closed_form_only:
        res.metrics["closed_form_samples"] = len(closed)
        return res

    traj = classical.integrate_trajectory(params, t_end=t_end, dt=step)
    res.tables["trajectory_integrated"] = (classical_header(), _traj_rows(traj))
    res.objects["integrated"] = traj
    res.metrics["max_drift"] = traj.max_drift
    try:
        res.metrics["measured_period"] = classical.measured_period(traj)
    except IncompleteOrbit:
        res.metrics["measured_period"] = math.nan
    res.metrics["effective_period"] = period if oscillatory else math.inf
    if closed is not None:
        n = min(len(closed), len(traj))
        res.metrics["max_closed_form_discrepancy"] = float(
            max(np.max(np.abs(closed.q[:n] - traj.q[:n])), np.max(np.abs(closed.p[:n] - traj.p[:n])))
        )
    return res


def classical_header():
    return ("t", "q", "p", "invariant")


def _traj_rows(traj):
    return list(zip(traj.times, traj.q, traj.p, traj.invariant))


def fourier(params: SnyderParams, periods: int, K: int = 9, steps_per_period: int = 1000,
            component: str = "q") -> Result:
    spectrum, rows = harmonics.compare_harmonics(params, K, periods, steps_per_period, component)
    res = Result()
    res.tables["spectrum"] = (
        ("k", "cos_coeff", "sin_coeff"),
        [(k, spectrum.cos_coeffs[k], spectrum.sin_coeffs[k]) for k in range(K + 1)],
    )
    res.tables["comparison"] = (
        ("k", "measured", "perturbative", "abs_dev", "rel_dev"),
        [(r.k, r.measured, r.perturbative, r.abs_dev, r.rel_dev) for r in rows],
    )
    coeffs = spectrum.cos_coeffs if component == "q" else spectrum.sin_coeffs
    res.metrics["fundamental"] = spectrum.fundamental
    res.metrics["residual"] = spectrum.residual
    res.metrics["c1"] = float(coeffs[1])
    if K >= 3:
        res.metrics["c3"] = float(coeffs[3])
        res.metrics["c3_over_c1"] = float(coeffs[3] / coeffs[1])
    res.objects.update(spectrum=spectrum, rows=rows)
    return res


def fock_levels(params: SnyderParams, dim: int = 60, backend: str = fock.NORMAL_ORDERED,
                levels: int = 10, dump_matrix: bool = False) -> Result:
    fm = fock.build_hamiltonian(params, dim, backend)
    spec = fock.diagonalize(fm, levels)
    ref = fock.paper_spectrum(params, levels - 1)
    res = Result()
    res.tables["spectrum"] = (
        ("n", "energy", "converged", "paper_spectrum"),
        [(n, spec.eigenvalues[n], spec.converged[n], ref.eigenvalues[n]) for n in range(levels)],
    )
    diff = fock.backend_difference(params, dim)
    scale = params.omega * params.l**2
    res.tables["backend_difference"] = (
        ("quantity", "value"),
        [("max_abs_difference", diff), ("max_abs_difference_over_omega_l2", diff / scale if scale else math.nan)],
    )
    if dump_matrix:
        res.tables["matrix"] = (("i", "j", "value"), fm.nonzeros())
    for n in range(levels):
        res.metrics[f"E{n}"] = float(spec.eigenvalues[n])
    res.metrics["converged_levels"] = spec.count_converged
    res.metrics["backend_difference"] = diff
    res.objects.update(spectrum=spec, reference=ref)
    return res


def grid_levels(params: SnyderParams, variant: str = grid.PLAIN, levels: int = 6,
                spacing: float = 0.02, rho_max: float | None = None, points: int | None = None,
                convergence_rtol: float = 1e-5) -> Result:
    if points is not None:
        if rho_max is None:
            rho_max = grid.suggest_grid(params, spacing, variant).rho_max
        gspec = grid.GridSpec(rho_max, points, variant)
    else:
        gspec = grid.suggest_grid(params, spacing, variant, rho_max)
    op = grid.build_grid_hamiltonian(params, gspec)
    spec = grid.grid_spectrum(op, levels, convergence_rtol)
    extrapolated = spec.metadata["extrapolated"]
    _, w_t = fock.renormalized_params(params)
    ref = w_t * (np.arange(levels) + 0.5)
    dev = extrapolated - ref
    res = Result()
    res.tables["spectrum"] = (
        ("n", "energy", "converged", "bound"),
        [(n, spec.eigenvalues[n], spec.converged[n], spec.bound[n]) for n in range(levels)],
    )
    res.tables["deviation"] = (
        ("n", "energy_extrapolated", "omega_tilde_ref", "deviation"),
        [(n, extrapolated[n], ref[n], dev[n]) for n in range(levels)],
    )
    for n in range(levels):
        res.metrics[f"E{n}"] = float(spec.eigenvalues[n])
        res.metrics[f"E{n}_extrapolated"] = float(extrapolated[n])
        res.metrics[f"dev{n}"] = float(dev[n])
    res.metrics["points"] = gspec.points
    res.metrics["rho_max"] = gspec.rho_max
    res.objects.update(spectrum=spec, reference=ref)
    return res


WORKFLOWS = {
    "simulate": simulate,
    "fourier": fourier,
    "fock": fock_levels,
    "grid": grid_levels,
}
