"""Quantum Snyder oscillator in a truncated number basis (hbar = 1).

Backends for the Hamiltonian matrix:

``paper_literal``
    the published action of H on |n> (couplings to |n +- 2>), entry by entry;
``normal_ordered``
    H = w (a^+ a + 1/2) + (m w^2 l^2 / 2)(a^+^2 - a^+ a - a a^+ + a^2), built
    from the standard ladder matrices;
``tilde``
    the counter-term Hamiltonian H + (l^2/2) P^2 (see :func:`build_hamiltonian_tilde`).

Products of ladder matrices are formed at dimension N + 4 and then cropped to
N x N, so every retained entry is exact rather than polluted by the truncation
edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, eig_banded, eigh_tridiagonal

from .errors import ConfigError, ConvergenceFailure, DimTooSmall, NotSymmetric
from .params import SnyderParams

PAPER_LITERAL = "paper_literal"
NORMAL_ORDERED = "normal_ordered"
TILDE = "tilde"
BACKENDS = (PAPER_LITERAL, NORMAL_ORDERED, TILDE)

_PAD = 4
CONVERGENCE_RTOL = 1e-8


@dataclass(frozen=True)
class EigenSpectrum:
    """Ascending eigenvalues with per-level convergence flags."""

    eigenvalues: np.ndarray
    converged: np.ndarray
    truncation_dim: int | None = None
    metadata: dict = field(default_factory=dict)
    bound: np.ndarray | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        conv = np.asarray(self.converged, dtype=bool)
        if conv.shape != ev.shape:
            raise ValueError("converged flags must match eigenvalues")
        if ev.size > 1 and np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "converged", conv)
        if self.bound is not None:
            object.__setattr__(self, "bound", np.asarray(self.bound, dtype=bool))

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def count_converged(self) -> int:
        return int(np.count_nonzero(self.converged))


@dataclass(frozen=True)
class FockMatrix:
    """A real symmetric Hamiltonian matrix in the truncated number basis.

    ``rebuild`` regenerates the same operator at another dimension; it is what
    :func:`diagonalize` uses for its convergence check. Matrices without it
    (e.g. wrapped user arrays) are reported as unconverged.
    """

    matrix: np.ndarray
    backend: str
    params: SnyderParams | None = None
    rebuild: Callable[[int], "FockMatrix"] | None = field(default=None, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def band(self, offset: int) -> np.ndarray:
        return np.diagonal(self.matrix, offset)

    def nonzeros(self):
        """(i, j, value) triples of the nonzero entries, row-major."""
        i, j = np.nonzero(self.matrix)
        return [(int(a), int(b), float(self.matrix[a, b])) for a, b in zip(i, j)]


def _check_dim(dim: int, minimum: int) -> None:
    if dim < minimum:
        raise DimTooSmall(f"dimension must be >= {minimum}, got {dim}")


def ladder_matrices(dim: int):
    """Truncated annihilation and creation matrices ``(a, a_dagger)``."""
    _check_dim(dim, 2)
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    return a, a.T.copy()


def quadratures(dim: int, mass: float, omega: float):
    """Position and momentum matrices X, P built on ladder operators for (mass, omega).

    X = (a + a^+) / sqrt(2 m w) and P = i sqrt(m w / 2)(a^+ - a). P is returned
    as the real matrix ``Pi`` with P = i * Pi, so P^2 = -Pi @ Pi.
    """
    a, ad = ladder_matrices(dim)
    X = (a + ad) / math.sqrt(2.0 * mass * omega)
    Pi = math.sqrt(0.5 * mass * omega) * (ad - a)
    return X, Pi


def _crop(m: np.ndarray, dim: int) -> np.ndarray:
    out = np.array(m[:dim, :dim])
    return 0.5 * (out + out.T)


def build_hamiltonian_paper(params: SnyderParams, dim: int) -> FockMatrix:
    """Matrix with the published coefficients, written in entry by entry.

    diag:      w { n [1 - l^2/(1+l^2)] + 1/2 [1 + l^2/(1+l^2)] }
    (n, n+2):  w l^2 / (2 (1+l^2)) sqrt(n+1) sqrt(n+2)
    """
    _check_dim(dim, 4)
    w, l2 = params.omega, params.l**2
    r = l2 / (1.0 + l2)
    n = np.arange(dim, dtype=float)
    H = np.diag(w * (n * (1.0 - r) + 0.5 * (1.0 + r)))
    off = w * l2 / (2.0 * (1.0 + l2)) * np.sqrt(n[:-2] + 1.0) * np.sqrt(n[:-2] + 2.0)
    idx = np.arange(dim - 2)
    H[idx, idx + 2] = off
    H[idx + 2, idx] = off
    return FockMatrix(H, PAPER_LITERAL, params, lambda d: build_hamiltonian_paper(params, d))


def deformation_coefficient(params: SnyderParams) -> float:
    """Prefactor m w^2 l^2 / 2 of (a^+^2 - a^+ a - a a^+ + a^2).

    With m w = 1 this is the published w l^2 / 2.
    """
    return 0.5 * params.mass * params.omega**2 * params.l**2


def build_hamiltonian_normal_ordered(params: SnyderParams, dim: int) -> FockMatrix:
    _check_dim(dim, 4)
    big = dim + _PAD
    a, ad = ladder_matrices(big)
    w = params.omega
    # a^+ a and a a^+ written as exact diagonals; sqrt(n) * sqrt(n) would round
    number = np.diag(np.arange(big, dtype=float))
    eye = np.eye(big)
    H = w * (number + 0.5 * eye)
    H = H + deformation_coefficient(params) * (ad @ ad - number - (number + eye) + a @ a)
    return FockMatrix(
        _crop(H, dim), NORMAL_ORDERED, params, lambda d: build_hamiltonian_normal_ordered(params, d)
    )


def renormalized_params(params: SnyderParams) -> tuple[float, float]:
    """Effective ``(m_tilde, omega_tilde)`` = (m / (1 + m l^2), w sqrt(1 + m l^2))."""
    s = 1.0 + params.mass * params.l**2
    return params.mass / s, params.omega * math.sqrt(s)


def build_hamiltonian_tilde(
    params: SnyderParams,
    dim: int,
    route: str = "counterterm",
    basis: str = "bare",
    reordering: bool = True,
) -> FockMatrix:
    """Counter-term Hamiltonian H~ = H + (l^2/2) P^2.

    ``route`` picks the assembly:

    * ``"counterterm"``: P^2/2m + m w^2 X^2/2 + (l^2/2) P^2
    * ``"regrouped"``: P^2/2m~ + m~ w~^2 X^2/2 with the renormalised parameters

    ``basis`` chooses the ladder operators behind X and P: built on (m, w)
    (``"bare"``) or on (m~, w~) (``"renormalized"``).

    Turning the deformed commutator into the normal-ordered form adds the
    remainder m w^2 l^2/2 (a^+ - a)^2 = -w l^2 P^2 to the canonical
    P^2/2m + m w^2 X^2/2. With ``reordering=True`` that remainder is kept, so
    in the bare basis the counterterm route equals the ``normal_ordered``
    backend plus (l^2/2) P^2. With ``reordering=False`` both routes are read
    with the canonical algebra; in the renormalised basis H~ is then
    diag(w~ (n + 1/2)).
    """
    _check_dim(dim, 4)
    if route not in ("counterterm", "regrouped"):
        raise ConfigError(f"route must be 'counterterm' or 'regrouped', got {route!r}")
    if basis not in ("bare", "renormalized"):
        raise ConfigError(f"basis must be 'bare' or 'renormalized', got {basis!r}")
    m, w, l2 = params.mass, params.omega, params.l**2
    m_t, w_t = renormalized_params(params)
    big = dim + _PAD
    X, Pi = quadratures(big, *((m, w) if basis == "bare" else (m_t, w_t)))
    P2 = -(Pi @ Pi)
    X2 = X @ X
    if route == "counterterm":
        H = P2 / (2.0 * m) + 0.5 * m * w * w * X2 + 0.5 * l2 * P2
    else:
        H = P2 / (2.0 * m_t) + 0.5 * m_t * w_t * w_t * X2
    if reordering:
        H = H - w * l2 * P2
    return FockMatrix(
        _crop(H, dim),
        TILDE,
        params,
        lambda d: build_hamiltonian_tilde(params, d, route, basis, reordering),
    )


def build_hamiltonian(params: SnyderParams, dim: int, backend: str) -> FockMatrix:
    if backend == PAPER_LITERAL:
        return build_hamiltonian_paper(params, dim)
    if backend == NORMAL_ORDERED:
        return build_hamiltonian_normal_ordered(params, dim)
    if backend == TILDE:
        return build_hamiltonian_tilde(params, dim)
    raise ConfigError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")


def backend_difference(params: SnyderParams, dim: int) -> float:
    """Max-norm of the published-coefficient matrix minus the normal-ordered one at the same truncation."""
    a = build_hamiltonian_paper(params, dim).matrix
    b = build_hamiltonian_normal_ordered(params, dim).matrix
    return float(np.max(np.abs(a - b)))


def paper_spectrum(params: SnyderParams, n_max: int) -> EigenSpectrum:
    """Levels w~ (n + 1/2) for n = 0..n_max."""
    _, w_t = renormalized_params(params)
    n = np.arange(n_max + 1, dtype=float)
    return EigenSpectrum(w_t * (n + 0.5), np.ones(n.size, bool), None, {"source": "closed_form"})


def _lowest(matrix: np.ndarray, k: int) -> np.ndarray:
    n = matrix.shape[0]
    # Odd bands vanish for every backend: even and odd n then form two
    # independent tridiagonal blocks.
    odd_zero = all(not np.any(np.diagonal(matrix, o)) for o in range(1, n, 2))
    band_limit = 2
    outside = any(np.any(np.diagonal(matrix, o)) for o in range(band_limit + 1, n))
    try:
        if odd_zero and not outside:
            parts = []
            for start in (0, 1):
                block = matrix[start::2, start::2]
                if block.shape[0] == 0:
                    continue
                kk = min(k, block.shape[0])
                d = np.diagonal(block).copy()
                e = np.diagonal(block, 1).copy()
                if block.shape[0] == 1:
                    parts.append(d)
                else:
                    parts.append(
                        eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, kk - 1))
                    )
            return np.sort(np.concatenate(parts))[:k]
        # General symmetric input: lower banded storage, bandwidth = last nonzero band.
        bw = max([o for o in range(n) if np.any(np.diagonal(matrix, o))] or [0])
        lower = np.zeros((bw + 1, n))
        for o in range(bw + 1):
            lower[o, : n - o] = np.diagonal(matrix, -o)
        return eig_banded(lower, lower=True, eigvals_only=True, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def diagonalize(fm: FockMatrix, k: int, check_convergence: bool = True) -> EigenSpectrum:
    """Lowest ``k`` eigenvalues, ascending.

    A level is flagged converged when rebuilding the operator at twice the
    dimension changes it by less than 1e-8 relative.
    """
    M = fm.matrix
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric("matrix must be square")
    if not np.array_equal(M, M.T):
        raise NotSymmetric("matrix is not exactly symmetric")
    if not 1 <= k <= fm.dim:
        raise ConfigError(f"k must lie in [1, {fm.dim}], got {k}")
    ev = _lowest(M, k)
    if not np.all(np.isfinite(ev)):
        raise ConvergenceFailure("eigensolver returned non-finite values")
    converged = np.zeros(k, bool)
    meta = {"backend": fm.backend}
    if check_convergence and fm.rebuild is not None:
        ref = _lowest(fm.rebuild(2 * fm.dim).matrix, k)
        scale = np.maximum(np.abs(ref), np.finfo(float).tiny)
        converged = np.abs(ev - ref) / scale < CONVERGENCE_RTOL
        meta["reference_dim"] = 2 * fm.dim
    return EigenSpectrum(ev, converged, fm.dim, meta)
