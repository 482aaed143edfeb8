"""Fourth-order diagonally implicit Runge-Kutta composition time stepper.

One step of size ``dt`` is three implicit-midpoint substeps of sizes
``b1 dt, b2 dt, b3 dt`` with ``b1 = b3 = 1/(2 - 2^(1/3))`` and
``b2 = 1 - 2 b1``.  The midpoint map preserves quadratic invariants (mass,
momentum) of the Galerkin system up to the stage-solver tolerance, and the
symmetric composition is time-reversible.

Each midpoint stage ``U = u + (h/2) F(U)`` is solved by a fixed-point
iteration that treats the stiff, diagonal dispersive part exactly::

    (1 + i h |k|^(2s) / 2) U_{m+1} = u + (h/2) i P_N(|U_m|^(2 sigma) U_m)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .grid import ComplexField, ModelParams, NonlinearEvaluator, Spectrum, SpectralGrid, from_spectrum, to_spectrum

log = logging.getLogger(__name__)

__all__ = [
    "CompositionCoefficients",
    "StepperConfig",
    "NonConvergence",
    "Stepper",
    "midpoint_substep",
    "composition_step",
    "integrate",
    "stability_ratio",
    "STABILITY_LIMIT",
]

# N * dt above this triggers a warning (the convergence study peaks at ~1.6e2)
STABILITY_LIMIT = 200.0


@dataclass(frozen=True)
class CompositionCoefficients:
    b: tuple[float, ...]

    @classmethod
    def fourth_order(cls) -> "CompositionCoefficients":
        b1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
        return cls((b1, 1.0 - 2.0 * b1, b1))

    def tableau(self) -> np.ndarray:
        """Butcher matrix ``a_ij``: ``b_j`` below the diagonal, ``b_i/2`` on it."""
        n = len(self.b)
        a = np.zeros((n, n))
        for i in range(n):
            a[i, :i] = self.b[:i]
            a[i, i] = self.b[i] / 2
        return a


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    stage_tol: float = 1e-13
    stage_max_iter: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.stage_tol > 0:
            raise ValueError("stage_tol must be positive")
        if self.stage_max_iter < 1:
            raise ValueError("stage_max_iter must be >= 1")


class NonConvergence(RuntimeError):
    """Stage iteration failed to reach ``stage_tol``; usually ``dt`` is too large."""

    def __init__(self, iterations: int, residual: float, step: int | None = None,
                 time: float | None = None):
        self.iterations = iterations
        self.residual = residual
        self.step = step
        self.time = time
        msg = f"stage iteration did not converge after {iterations} iterations (residual {residual:.3e})"
        if step is not None:
            msg += f" at step {step}, t = {time:.6g}"
        super().__init__(msg)


# quartic extrapolation of a stage value from the same stage of the last five steps
_EXTRAPOLATION = (5.0, -10.0, 10.0, -5.0, 1.0)


def stability_ratio(modes: int, dt: float) -> float:
    return modes * dt


@dataclass(eq=False)
class Stepper:
    """Time stepper bound to one grid and model; owns scratch state.

    Parameters
    ----------
    grid, params, config
        Discretisation, equation and step controls.
    coeffs
        Composition weights; defaults to the 3-stage fourth-order set.
    nonlinear
        Set to False to integrate the linear dispersive equation only.
    """

    grid: SpectralGrid
    params: ModelParams
    config: StepperConfig
    coeffs: CompositionCoefficients = field(default_factory=CompositionCoefficients.fourth_order)
    nonlinear: bool = True

    def __post_init__(self):
        self.symbol = self.grid.symbol(2.0 * self.params.s)
        self._nl = NonlinearEvaluator(self.grid, self.params.sigma)
        self._solvers: dict[float, np.ndarray] = {}
        self._history: list[list[np.ndarray]] = []
        self._history_dt: float | None = None
        self.iterations = 0
        self.substeps = 0
        if stability_ratio(self.grid.modes, self.config.dt) > STABILITY_LIMIT:
            log.warning("N*dt = %.3g exceeds the guideline %.3g; expect stage-solver trouble",
                        stability_ratio(self.grid.modes, self.config.dt), STABILITY_LIMIT)

    def _inverse(self, h: float) -> np.ndarray:
        inv = self._solvers.get(h)
        if inv is None:
            inv = 1.0 / (1.0 + 0.5j * h * self.symbol)
            if len(self._solvers) > 8:
                self._solvers.clear()
            self._solvers[h] = inv
        return inv

    def solve_stage(self, u: np.ndarray, h: float, guess: np.ndarray | None = None) -> np.ndarray:
        """Stage value ``U = u + (h/2) F(U)`` of the midpoint rule."""
        inv = self._inverse(h)
        if not self.nonlinear:
            return inv * u
        tol = self.config.stage_tol
        half = 0.5j * h
        stage = u if guess is None else guess
        residual = math.inf
        for it in range(1, self.config.stage_max_iter + 1):
            new = inv * (u + half * self._nl(stage))
            diff = np.linalg.norm(new - stage)
            scale = np.linalg.norm(new)
            stage = new
            residual = diff / scale if scale > 0 else diff
            if residual <= tol:
                self.iterations += it
                return stage
            if not np.isfinite(residual):
                break
        raise NonConvergence(self.config.stage_max_iter, residual)

    def substep(self, u: np.ndarray, h: float, guess: np.ndarray | None = None) -> np.ndarray:
        """Implicit midpoint substep of size ``h`` on raw coefficients."""
        self.substeps += 1
        return 2.0 * self.solve_stage(u, h, guess) - u

    def reset(self) -> None:
        """Forget the stage history used to predict initial iterates."""
        self._history = []
        self._history_dt = None

    def _predict(self, i: int) -> np.ndarray | None:
        hist = self._history
        if len(hist) < len(_EXTRAPOLATION):
            return None
        guess = _EXTRAPOLATION[0] * hist[-1][i]
        for j in range(1, len(_EXTRAPOLATION)):
            guess += _EXTRAPOLATION[j] * hist[-1 - j][i]
        return guess

    def step(self, u: np.ndarray, dt: float | None = None) -> np.ndarray:
        """One composition step; raw coefficients in and out."""
        dt = self.config.dt if dt is None else dt
        if not self.nonlinear:
            for b in self.coeffs.b:
                u = self.substep(u, b * dt)
            return u
        if dt != self._history_dt:
            self.reset()
            self._history_dt = dt
        stages = []
        for i, b in enumerate(self.coeffs.b):
            h = b * dt
            guess = self._predict(i)
            try:
                stage = self.solve_stage(u, h, guess)
            except NonConvergence:
                if guess is None:
                    raise
                self._history = []
                stage = self.solve_stage(u, h)
            self.substeps += 1
            stages.append(stage)
            u = 2.0 * stage - u
        self._history.append(stages)
        if len(self._history) > len(_EXTRAPOLATION):
            del self._history[0]
        return u

    def advance(self, c: Spectrum, T: float,
                observers: Iterable[Callable[[float, Spectrum], None]] = (),
                cadence: float | None = None, t0: float = 0.0) -> Spectrum:
        """Advance ``c`` by ``T`` time units, calling ``observers(t, spectrum)``.

        Observers fire at ``t0`` and then whenever at least ``cadence`` time units
        have elapsed since the previous call (every step if ``cadence`` is None),
        and always at the final time.
        """
        if T < 0:
            raise ValueError("T must be non-negative")
        observers = list(observers)
        self.reset()
        dt = self.config.dt
        nsteps = int(math.floor(T / dt + 1e-9))
        tail = T - nsteps * dt
        if tail <= 1e-12 * max(T, 1.0):
            tail = 0.0
        u = c.coefficients.copy()

        def notify(t):
            if observers:
                snap = Spectrum(self.grid, u.copy())
                for obs in observers:
                    obs(t, snap)

        notify(t0)
        last = t0
        step_sizes = [dt] * nsteps + ([tail] if tail > 0 else [])
        t = t0
        for index, h in enumerate(step_sizes, start=1):
            try:
                u = self.step(u, h)
            except NonConvergence as exc:
                raise NonConvergence(exc.iterations, exc.residual, step=index, time=t) from None
            t = t0 + (index * dt if index <= nsteps else T)
            final = index == len(step_sizes)
            if final or cadence is None or t - last >= cadence - 1e-9 * dt:
                notify(t)
                last = t
        return Spectrum(self.grid, u)


def midpoint_substep(c: Spectrum, h: float, p: ModelParams, cfg: StepperConfig,
                     nonlinear: bool = True) -> Spectrum:
    stepper = Stepper(c.grid, p, cfg, nonlinear=nonlinear)
    return Spectrum(c.grid, stepper.substep(c.coefficients, h))


def composition_step(c: Spectrum, cfg: StepperConfig,
                     coeffs: CompositionCoefficients | None = None,
                     p: ModelParams | None = None, nonlinear: bool = True) -> Spectrum:
    if p is None:
        raise ValueError("model parameters are required")
    stepper = Stepper(c.grid, p, cfg, coeffs or CompositionCoefficients.fourth_order(),
                      nonlinear=nonlinear)
    return Spectrum(c.grid, stepper.step(c.coefficients))


def integrate(u0: ComplexField, T: float, cfg: StepperConfig, p: ModelParams,
              observers: Iterable[Callable[[float, Spectrum], None]] = (),
              cadence: float | None = None, nonlinear: bool = True) -> ComplexField:
    """Advance the field ``u0`` to time ``T`` and return the final field."""
    if T == 0:
        return u0.copy()
    stepper = Stepper(u0.grid, p, cfg, nonlinear=nonlinear)
    out = stepper.advance(to_spectrum(u0), T, observers, cadence)
    return from_spectrum(out)
