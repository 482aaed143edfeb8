"""Pseudospectral laboratory for the 1D focusing fractional nonlinear Schrodinger equation

    i u_t - (-d_xx)^s u + |u|^(2 sigma) u = 0

on a periodic interval: Fourier Galerkin discretisation, a fourth-order
composition of implicit-midpoint steps, solitary-wave profiles, invariants,
experiment presets and a linear dispersion analysis.
"""

__version__ = "0.1.0"

from .grid import (
    ComplexField,
    ModelParams,
    NonlinearEvaluator,
    SpectralGrid,
    Spectrum,
    frac_laplacian,
    from_spectrum,
    nonlinear_term,
    rhs,
    to_spectrum,
)
from .integrator import (
    CompositionCoefficients,
    NonConvergence,
    Stepper,
    StepperConfig,
    composition_step,
    integrate,
    midpoint_substep,
)
from .waves import (
    Inadmissible,
    LinearPhase,
    Profile,
    QuadraticPhase,
    Stagnation,
    WaveParams,
    decay_fit,
    exact_nls_soliton,
    existence_bound,
    phase_coefficient,
    solve_profile,
    stationary_residual,
    traveling_solution,
)
from .observables import InvariantSet, PeakTracker, energy_sign, invariants, peak_locate, speed_estimate
from .dispersion import DispersionParams, group_velocity, omega, phase_velocity, tail_direction_report
from .experiments import ExperimentSpec, PRESETS, RunSettings, build_initial, precision_noise, preset
