"""Initial conditions for the solitary-wave experiments and named presets.

Every constructor is deterministic.  ``build_initial`` assembles the field
for an :class:`ExperimentSpec`, projects it onto the retained modes and
reports the projection loss.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Literal, Union

import numpy as np

from .grid import ComplexField, ModelParams, SpectralGrid, from_spectrum, to_spectrum
from .waves import (
    LinearPhase,
    Profile,
    QuadraticPhase,
    WaveParams,
    exact_nls_soliton,
    phase_coefficient,
    solve_profile,
    stationary_residual,
)

__all__ = [
    "AmplitudeScale",
    "Noise",
    "Nonsymmetric",
    "Gaussian",
    "Superposition",
    "SPerturb",
    "RunSettings",
    "ExperimentSpec",
    "InitialData",
    "amplitude_scale",
    "precision_noise",
    "add_noise",
    "nonsymmetric",
    "gaussian_data",
    "superpose",
    "s_perturbation",
    "make_profile",
    "build_initial",
    "PRESETS",
    "preset",
]

Component = Literal["v", "w"]


@dataclass(frozen=True)
class AmplitudeScale:
    A1: float = 1.0
    A2: float = 1.0


@dataclass(frozen=True)
class Noise:
    target: Component = "v"
    m: float = 1e5


@dataclass(frozen=True)
class Nonsymmetric:
    target: Component = "v"
    alpha: float = 0.0


@dataclass(frozen=True)
class Gaussian:
    A1: float = 1.0
    A2: float = 0.01
    phase: Union[LinearPhase, QuadraticPhase] = field(default_factory=LinearPhase)
    lambda2: float = 0.25
    s: float = 0.8
    x0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        if not self.A2 > 0:
            raise ValueError("Gaussian width parameter A2 must be positive")


@dataclass(frozen=True)
class Superposition:
    waves: tuple[WaveParams, ...]

    def __post_init__(self):
        if len(self.waves) < 2:
            raise ValueError("a superposition needs at least two waves")
        centers = [w.x0 for w in self.waves]
        if len(set(centers)) != len(centers):
            raise ValueError("superposed waves need distinct centers")


@dataclass(frozen=True)
class SPerturb:
    sbar: float = 0.8
    eps: float = 0.05

    def __post_init__(self):
        for value in (self.sbar, self.sbar + self.eps):
            if not 0.5 < value < 1.0:
                raise ValueError(f"s-perturbation needs sbar and sbar+eps in (1/2, 1), got {value}")


Kind = Union[AmplitudeScale, Noise, Nonsymmetric, Gaussian, Superposition, SPerturb]


@dataclass(frozen=True)
class RunSettings:
    dt: float = 0.01
    T: float = 400.0
    cadence: float = 0.5
    N: int = 16384
    L: float = 1024.0
    points: int | None = None
    stage_tol: float = 1e-13
    stage_max_iter: int = 100

    def grid(self) -> SpectralGrid:
        # odd sample count: every sampled datum is exactly a trigonometric polynomial
        points = self.points if self.points is not None else 2 * self.N + 1
        return SpectralGrid(self.L, self.N, points)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: Kind
    base: WaveParams | None = None
    run: RunSettings = field(default_factory=RunSettings)
    model: ModelParams | None = None
    profile_tol: float = 1e-10

    def run_model(self) -> ModelParams:
        """Model parameters used for the time integration."""
        if isinstance(self.kind, SPerturb):
            sigma = self.base.model.sigma if self.base else 1.0
            return ModelParams(self.kind.sbar + self.kind.eps, sigma)
        if self.model is not None:
            return self.model
        if self.base is not None:
            return self.base.model
        if isinstance(self.kind, Superposition):
            return self.kind.waves[0].model
        if isinstance(self.kind, Gaussian):
            return ModelParams(self.kind.s, 1.0)
        raise ValueError("experiment has no model parameters")


def _component_scale(u: ComplexField, a1: float, a2: float) -> ComplexField:
    return ComplexField(u.grid, a1 * u.samples.real + 1j * (a2 * u.samples.imag))


def amplitude_scale(prof: Profile | ComplexField, A1: float, A2: float) -> ComplexField:
    """``A1 v0 + i A2 w0``."""
    u = prof.u0 if isinstance(prof, Profile) else prof
    return _component_scale(u, A1, A2)


def precision_noise(f: np.ndarray, m: float) -> np.ndarray:
    """``m (f - single(f))`` with IEEE round-to-nearest-even binary32 rounding."""
    f = np.asarray(f, dtype=np.float64)
    return m * (f - f.astype(np.float32).astype(np.float64))


def add_noise(u: ComplexField, target: Component, m: float) -> ComplexField:
    v, w = u.samples.real.copy(), u.samples.imag.copy()
    if target == "v":
        v += precision_noise(v, m)
    elif target == "w":
        w += precision_noise(w, m)
    else:
        raise ValueError(f"target must be 'v' or 'w', got {target!r}")
    return ComplexField(u.grid, v + 1j * w)


def nonsymmetric(prof: Profile | ComplexField, target: Component, alpha: float,
                 x0: float | None = None) -> ComplexField:
    """Multiply one component by ``1 + alpha tanh((x - x0)/2)``."""
    u = prof.u0 if isinstance(prof, Profile) else prof
    if x0 is None:
        x0 = prof.params.x0 if isinstance(prof, Profile) else 0.0
    p = 1.0 + alpha * np.tanh(0.5 * (u.grid.x - x0))
    v, w = u.samples.real, u.samples.imag
    if target == "v":
        v = v * p
    elif target == "w":
        w = w * p
    else:
        raise ValueError(f"target must be 'v' or 'w', got {target!r}")
    return ComplexField(u.grid, v + 1j * w)


def gaussian_data(A1: float, A2: float, phase, x0: float, theta0: float,
                  grid: SpectralGrid, lambda2: float = 0.25, s: float = 0.8) -> ComplexField:
    """Modulated Gaussian ``A1 exp(-A2 (x-x0)^2) exp(i(theta(x-x0) + theta0))``.

    A linear phase without an explicit slope takes ``A`` from ``lambda2`` and ``s``.
    """
    y = grid.x - x0
    rho = A1 * np.exp(-A2 * y ** 2)
    if isinstance(phase, QuadraticPhase):
        theta = y ** 2
    else:
        slope = phase.A if phase.A is not None else phase_coefficient(lambda2, s)
        theta = slope * y
    return ComplexField(grid, rho * np.cos(theta + theta0) + 1j * rho * np.sin(theta + theta0))


def _core_width(prof: Profile) -> float:
    rho = prof.rho
    return float(np.count_nonzero(rho >= 0.5 * rho.max()) * prof.grid.spacing)


def superpose(profiles: list[Profile]) -> ComplexField:
    """Sum of profiles already centred at their own ``x0``."""
    if not profiles:
        raise ValueError("nothing to superpose")
    grid = profiles[0].grid
    centers = [p.params.x0 for p in profiles]
    width = max(_core_width(p) for p in profiles)
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            gap = abs(centers[i] - centers[j])
            if gap < 10 * width:
                warnings.warn(f"waves at {centers[i]} and {centers[j]} are closer than "
                              f"10 core widths ({10 * width:.3g})", stacklevel=2)
    total = np.zeros(grid.points, dtype=complex)
    for p in profiles:
        if p.grid != grid:
            raise ValueError("profiles live on different grids")
        total += p.u0.samples
    return ComplexField(grid, total)


def s_perturbation(prof: Profile, eps: float) -> tuple[ComplexField, ModelParams]:
    """The ``sbar`` profile as datum for the equation with ``s = sbar + eps``."""
    sbar = prof.params.model.s
    SPerturb(sbar, eps)
    return prof.u0.copy(), ModelParams(sbar + eps, prof.params.model.sigma)


def make_profile(params: WaveParams, grid: SpectralGrid, tol: float = 1e-10) -> Profile:
    """Closed-form soliton for ``s = 1``, Petviashvili profile otherwise."""
    if params.model.s == 1.0:
        return exact_nls_soliton(params, grid)
    return solve_profile(params, grid, tol)


@dataclass(eq=False)
class InitialData:
    field: ComplexField
    model: ModelParams
    profiles: list[Profile]
    projection_loss: float
    notes: dict = field(default_factory=dict)


def _project(u: ComplexField) -> tuple[ComplexField, float]:
    projected = from_spectrum(to_spectrum(u))
    total = float(np.sum(np.abs(u.samples) ** 2))
    lost = float(np.sum(np.abs(u.samples - projected.samples) ** 2))
    return projected, (lost / total if total > 0 else 0.0)


def build_initial(spec: ExperimentSpec) -> InitialData:
    """Construct, project and describe the initial field of ``spec``."""
    grid = spec.run.grid()
    kind = spec.kind
    profiles: list[Profile] = []
    notes: dict = {}
    if isinstance(kind, Superposition):
        profiles = [make_profile(w, grid, spec.profile_tol) for w in kind.waves]
        u = superpose(profiles)
    elif isinstance(kind, Gaussian):
        u = gaussian_data(kind.A1, kind.A2, kind.phase, kind.x0, kind.theta0, grid,
                          kind.lambda2, kind.s)
    else:
        if spec.base is None:
            raise ValueError(f"{type(kind).__name__} needs a base wave")
        base = spec.base
        if isinstance(kind, SPerturb):
            base = replace(base, model=ModelParams(kind.sbar, base.model.sigma))
        prof = make_profile(base, grid, spec.profile_tol)
        profiles = [prof]
        if isinstance(kind, AmplitudeScale):
            u = amplitude_scale(prof, kind.A1, kind.A2)
        elif isinstance(kind, Noise):
            u = add_noise(prof.u0, kind.target, kind.m)
        elif isinstance(kind, Nonsymmetric):
            u = nonsymmetric(prof, kind.target, kind.alpha)
        elif isinstance(kind, SPerturb):
            u, _ = s_perturbation(prof, kind.eps)
            shifted = replace(base, model=spec.run_model())
            notes["initial_residual"] = stationary_residual(to_spectrum(u), shifted)
        else:
            raise TypeError(f"unknown experiment kind {kind!r}")
    projected, loss = _project(u)
    return InitialData(projected, spec.run_model(), profiles, loss, notes)


def _wave(lambda2: float, x0: float = 0.0, phase=None, s: float = 0.8, sigma: float = 1.0) -> WaveParams:
    return WaveParams(ModelParams(s, sigma), 1.0, lambda2, x0, 0.0,
                      phase if phase is not None else LinearPhase())


def _presets() -> dict[str, ExperimentSpec]:
    quad = QuadraticPhase()
    nls_run = RunSettings(dt=6.25e-3, T=100.0, N=4096, L=128.0)
    return {
        "nls_perturbed": ExperimentSpec(AmplitudeScale(1.1, 1.0), _wave(0.25, s=1.0), nls_run),
        "small_amplitude": ExperimentSpec(AmplitudeScale(1.1, 1.0), _wave(0.25, phase=quad)),
        "breather": ExperimentSpec(AmplitudeScale(1.2, 1.2), _wave(0.25, phase=quad)),
        "noise_small": ExperimentSpec(Noise("v", 1e5), _wave(0.25)),
        "resolution_amplitude": ExperimentSpec(AmplitudeScale(1.8, 2.0), _wave(0.25)),
        "resolution_gaussian": ExperimentSpec(Gaussian(1.0, 0.01, LinearPhase(), 0.25)),
        "overtaking": ExperimentSpec(Superposition((_wave(1.0, -600.0), _wave(0.25, -500.0)))),
        "head_on": ExperimentSpec(Superposition((_wave(1.0, -600.0), _wave(-0.25, -500.0)))),
        "noise_large": ExperimentSpec(Noise("v", 1e7), _wave(0.25)),
        "nonsymmetric": ExperimentSpec(Nonsymmetric("v", 3.0), _wave(0.25)),
        "s_perturbation": ExperimentSpec(SPerturb(0.8, 0.05), _wave(0.25)),
        "blowup_probe": ExperimentSpec(AmplitudeScale(1.5, 1.5), _wave(0.25, sigma=2.0)),
    }


PRESETS = _presets()


def preset(name: str, **run_overrides) -> ExperimentSpec:
    """Named experiment, optionally with some :class:`RunSettings` fields replaced."""
    try:
        spec = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    if run_overrides:
        spec = replace(spec, run=replace(spec.run, **run_overrides))
    return spec
