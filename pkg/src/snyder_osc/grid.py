"""Finite-difference realisation of the deformed algebra [Q, P] = i (1 - l^2 P^2).

On an auxiliary coordinate rho take P = tanh(l rho) / l (multiplication) and
Q = i d/drho. Then [Q, P] = i sech^2(l rho) = i (1 - l^2 P^2) with a flat
measure, and

    H  = -(m w^2 / 2) d^2/drho^2 + tanh^2(l rho) / (2 m l^2)
    H~ = H + (l^2 / 2) P^2

are ordinary Schroedinger operators in rho. The potential saturates at
1/(2 m l^2) (times 1 + m l^2 for H~), so only finitely many bound states
exist. At l = 0 the potential is the limit rho^2 / (2 m).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import ConfigError, ConvergenceFailure, DomainTooSmall, GridTooCoarse, InvalidGrid
from .fock import EigenSpectrum, renormalized_params
from .params import SnyderParams

PLAIN = "plain"
TILDE = "tilde"
MIN_POINTS = 101
SATURATION_GAP = 1e-10
# atanh(1 - SATURATION_GAP): smallest l * rho_max passing the saturation check.
_SATURATION_ARG = math.atanh(1.0 - SATURATION_GAP)


@dataclass(frozen=True)
class GridSpec:
    rho_max: float
    points: int
    variant: str = PLAIN

    def __post_init__(self):
        if self.variant not in (PLAIN, TILDE):
            raise InvalidGrid(f"variant must be {PLAIN!r} or {TILDE!r}, got {self.variant!r}")
        if self.points < MIN_POINTS:
            raise GridTooCoarse(f"need at least {MIN_POINTS} points, got {self.points}")
        if self.points % 2 == 0:
            raise InvalidGrid(f"points must be odd so the grid contains rho = 0, got {self.points}")
        if not self.rho_max > 0:
            raise InvalidGrid(f"rho_max must be > 0, got {self.rho_max!r}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.rho_max / (self.points - 1)

    def rho(self) -> np.ndarray:
        return np.linspace(-self.rho_max, self.rho_max, self.points)


def minimal_rho_max(params: SnyderParams) -> float:
    """Smallest half-width at which tanh(l rho_max) saturates; ``inf`` for l = 0."""
    if params.l == 0.0:
        return math.inf
    return _SATURATION_ARG / params.l


def suggest_grid(params: SnyderParams, spacing: float = 0.005, variant: str = PLAIN,
                 rho_max: float | None = None) -> GridSpec:
    """Grid of roughly the requested spacing on a domain passing the saturation check.

    For l = 0 the default half-width is 8 oscillator lengths sqrt(m w), which
    holds the lowest levels with exponentially small wall effects.
    """
    if rho_max is None:
        if params.l == 0.0:
            rho_max = 8.0 * math.sqrt(params.mass * params.omega)
        else:
            rho_max = 1.01 * minimal_rho_max(params)
    half = int(math.ceil(rho_max / spacing))
    half += half % 2  # points = 1 mod 4 keeps the coarser grid nested
    return GridSpec(rho_max, max(2 * half + 1, MIN_POINTS), variant)


def saturation_energy(params: SnyderParams, variant: str = PLAIN) -> float:
    """Energy at which the rho potential flattens out (``inf`` for l = 0)."""
    if params.l == 0.0:
        return math.inf
    v0 = 1.0 / (2.0 * params.mass * params.l**2)
    if variant == TILDE:
        v0 *= 1.0 + params.mass * params.l**2
    return v0


def momentum_values(params: SnyderParams, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if params.l == 0.0:
        return rho.copy()
    return np.tanh(params.l * rho) / params.l


def potential(params: SnyderParams, rho, variant: str = PLAIN) -> np.ndarray:
    P = momentum_values(params, rho)
    V = P**2 / (2.0 * params.mass)
    if variant == TILDE:
        V = V + 0.5 * params.l**2 * P**2
    return V


def apply_position(psi: np.ndarray, spacing: float) -> np.ndarray:
    """Q psi = i dpsi/drho by central differences on interior points (ends zero)."""
    out = np.zeros(psi.shape, dtype=complex)
    out[1:-1] = 1j * (psi[2:] - psi[:-2]) / (2.0 * spacing)
    return out


@dataclass(frozen=True)
class GridOperator:
    """Symmetric tridiagonal matrix on the interior points (Dirichlet walls)."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    rho: np.ndarray
    params: SnyderParams
    spec: GridSpec
    saturation: float

    @property
    def size(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


def build_grid_hamiltonian(params: SnyderParams, spec: GridSpec) -> GridOperator:
    if params.l > 0.0 and not math.tanh(params.l * spec.rho_max) > 1.0 - SATURATION_GAP:
        raise DomainTooSmall(
            f"tanh(l * rho_max) = {math.tanh(params.l * spec.rho_max)!r} has not saturated; "
            f"need rho_max > {minimal_rho_max(params):.6g}"
        )
    rho = spec.rho()[1:-1]
    h = spec.spacing
    kinetic = 0.5 * params.mass * params.omega**2 / (h * h)
    diag = potential(params, rho, spec.variant) + 2.0 * kinetic
    off = np.full(rho.size - 1, -kinetic)
    return GridOperator(diag, off, rho, params, spec, saturation_energy(params, spec.variant))


def _solve(op: GridOperator, k: int) -> np.ndarray:
    try:
        return eigh_tridiagonal(
            op.diagonal, op.off_diagonal, eigvals_only=True, select="i", select_range=(0, k - 1)
        )
    except LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def coarser(spec: GridSpec) -> GridSpec:
    """Same domain at (about) twice the spacing; nested when points = 1 mod 4."""
    points = (spec.points - 1) // 2 + 1
    if points % 2 == 0:
        points += 1
    return GridSpec(spec.rho_max, max(points, MIN_POINTS), spec.variant)


def richardson(fine: np.ndarray, h_fine: float, coarse: np.ndarray, h_coarse: float) -> np.ndarray:
    """Remove the leading h^2 error term from two solves."""
    w_f, w_c = h_coarse**2, h_fine**2
    return (w_f * fine - w_c * coarse) / (w_f - w_c)


def grid_spectrum(op: GridOperator, k: int, convergence_rtol: float | None = None) -> EigenSpectrum:
    """Lowest ``k`` eigenvalues; levels at or above saturation are flagged unbound.

    With ``convergence_rtol`` set, the problem is also solved at twice the
    spacing. A level counts as converged when the two solves agree to that
    relative tolerance, and the Richardson-extrapolated levels are stored in
    ``metadata["extrapolated"]``. Without it no level is marked converged.
    """
    if not 1 <= k <= op.size:
        raise ConfigError(f"k must lie in [1, {op.size}], got {k}")
    ev = _solve(op, k)
    converged = np.zeros(k, bool)
    meta = {"variant": op.spec.variant, "points": op.spec.points, "rho_max": op.spec.rho_max}
    if convergence_rtol is not None:
        cspec = coarser(op.spec)
        ref = _solve(build_grid_hamiltonian(op.params, cspec), k)
        converged = np.abs(ev - ref) <= convergence_rtol * np.abs(ev)
        meta["reference_points"] = cspec.points
        meta["extrapolated"] = richardson(ev, op.spec.spacing, ref, cspec.spacing)
    return EigenSpectrum(ev, converged, op.spec.points, meta, bound=ev < op.saturation)


def bound_state_count(op: GridOperator) -> int:
    """Number of eigenvalues strictly below the saturation energy."""
    if not math.isfinite(op.saturation):
        raise ConfigError("bound-state count is only finite for l > 0")
    try:
        ev = eigh_tridiagonal(
            op.diagonal, op.off_diagonal, eigvals_only=True, select="v",
            select_range=(-1.0, op.saturation),
        )
    except LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return int(ev.size)


@dataclass(frozen=True)
class ConvergenceReport:
    points: list
    eigenvalues: np.ndarray  # shape (levels, k)
    orders: np.ndarray  # observed order per eigenvalue from the three finest grids
    extrapolated: np.ndarray  # Richardson (h^2) extrapolation from the two finest grids


def convergence_study(params: SnyderParams, spec: GridSpec, levels: int = 3, k: int = 6) -> ConvergenceReport:
    """Solve on ``levels`` nested grids, each halving the spacing of the last.

    The observed order is log2 of the ratio of successive eigenvalue
    differences; for the three-point stencil it should approach 2.
    """
    if levels < 3:
        raise ConfigError("a convergence study needs at least 3 grid levels")
    points = [spec.points]
    for _ in range(levels - 1):
        points.append(2 * points[-1] - 1)
    table = np.array(
        [_solve(build_grid_hamiltonian(params, GridSpec(spec.rho_max, n, spec.variant)), k) for n in points]
    )
    d1 = table[-3] - table[-2]
    d2 = table[-2] - table[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(np.abs(d1 / d2))
    extrapolated = (4.0 * table[-1] - table[-2]) / 3.0
    return ConvergenceReport(points, table, orders, extrapolated)


def tilde_deviation(params: SnyderParams, spec: GridSpec, n_levels: int = 6):
    """Grid levels of H~ against w~ (n + 1/2).

    Eigenvalues are Richardson-extrapolated from ``spec`` and a grid of twice
    the spacing, which removes the leading h^2 stencil error. Returns
    ``(energies, reference, deviation)`` arrays.
    """
    if spec.variant != TILDE:
        spec = GridSpec(spec.rho_max, spec.points, TILDE)
    spectrum = grid_spectrum(build_grid_hamiltonian(params, spec), n_levels, convergence_rtol=np.inf)
    energies = spectrum.metadata["extrapolated"]
    _, w_t = renormalized_params(params)
    reference = w_t * (np.arange(n_levels) + 0.5)
    return energies, reference, energies - reference
