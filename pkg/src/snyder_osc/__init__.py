"""Classical and quantum harmonic oscillator in one-dimensional Snyder space."""
from .classical import (
    PhaseState,
    Trajectory,
    action_integral,
    closed_form_state,
    closed_form_trajectory,
    effective_period,
    integrate_trajectory,
    measured_period,
    orbit_invariant,
    solve_phase_constant,
    vector_field,
)
from .fock import (
    EigenSpectrum,
    FockMatrix,
    build_hamiltonian_normal_ordered,
    build_hamiltonian_paper,
    build_hamiltonian_tilde,
    diagonalize,
    ladder_matrices,
    paper_spectrum,
    renormalized_params,
)
from .grid import GridSpec, build_grid_hamiltonian, convergence_study, grid_spectrum
from .harmonics import (
    HarmonicSpectrum,
    compare_harmonics,
    extract_harmonics,
    perturbative_p1,
    perturbative_q1,
)
from .params import Regime, SnyderParams, classify_regime, validate

__version__ = "0.1.0"
