"""Solitary waves: parameters, existence bound, exact NLS soliton, profile solver.

A solitary wave travels as ``u(x, t) = exp(i lambda1 t) u0(x - lambda2 t)``
where the profile ``u0`` solves the stationary equation::

    -(-d_xx)^s u0 + |u0|^(2 sigma) u0 - lambda1 u0 - i lambda2 u0' = 0

In Fourier variables this is ``Lhat(k) c_k = Nhat_k`` with
``Lhat(k) = |k|^(2s) + lambda1 - lambda2 k``, which is solved by a
generalized Petviashvili iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .grid import (
    ComplexField,
    ModelParams,
    NonlinearEvaluator,
    Spectrum,
    SpectralGrid,
    from_spectrum,
    to_spectrum,
)

__all__ = [
    "Inadmissible",
    "Stagnation",
    "NonPositiveA",
    "DecayFitError",
    "LinearPhase",
    "QuadraticPhase",
    "WaveParams",
    "Profile",
    "DecayFit",
    "existence_bound",
    "phase_coefficient",
    "stationary_symbol",
    "stationary_residual",
    "exact_nls_soliton",
    "traveling_solution",
    "solve_profile",
    "decay_fit",
]


class Inadmissible(ValueError):
    """Wave parameters violate the existence condition ``|lambda2| < c(lambda1)``."""


class Stagnation(RuntimeError):
    """Profile iteration stalled above the requested tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NonPositiveA(ValueError):
    pass


class DecayFitError(ValueError):
    pass


def existence_bound(lambda1: float, s: float) -> float:
    """Speed threshold ``c(lambda1) = 2s (lambda1/(2s-1))^((2s-1)/(2s))``."""
    if not 0.5 < s <= 1.0:
        raise ValueError(f"existence bound needs s in (1/2, 1], got {s}")
    if not lambda1 > 0:
        raise ValueError(f"lambda1 must be positive, got {lambda1}")
    q = 2.0 * s - 1.0
    return 2.0 * s * (lambda1 / q) ** (q / (2.0 * s))


def phase_coefficient(lambda2: float, s: float) -> float:
    """Slope ``A`` of the linear phase, inverting ``lambda2 = 2s |A|^(2s-2) A``."""
    if not 0.5 < s <= 1.0:
        raise ValueError(f"phase coefficient needs s in (1/2, 1], got {s}")
    if lambda2 == 0:
        return 0.0
    return math.copysign((abs(lambda2) / (2.0 * s)) ** (1.0 / (2.0 * s - 1.0)), lambda2)


@dataclass(frozen=True)
class LinearPhase:
    """``theta(x) = A x``; ``A = None`` means derive it from ``lambda2``."""

    A: float | None = None

    name = "linear"


@dataclass(frozen=True)
class QuadraticPhase:
    """``theta(x) = x^2``."""

    name = "quadratic"


Phase = Union[LinearPhase, QuadraticPhase]


@dataclass(frozen=True)
class WaveParams:
    model: ModelParams
    lambda1: float = 1.0
    lambda2: float = 0.0
    x0: float = 0.0
    theta0: float = 0.0
    phase: Phase = field(default_factory=LinearPhase)

    @property
    def speed(self) -> float:
        return self.lambda2

    def bound(self) -> float:
        return existence_bound(self.lambda1, self.model.s)

    def is_admissible(self) -> bool:
        if not 0.5 < self.model.s <= 1.0 or self.lambda1 <= 0:
            return False
        return abs(self.lambda2) < self.bound()

    def check_admissible(self) -> None:
        if not 0.5 < self.model.s <= 1.0:
            raise Inadmissible(f"s = {self.model.s} outside (1/2, 1]")
        if self.lambda1 <= 0:
            raise Inadmissible(f"lambda1 = {self.lambda1} must be positive")
        c = self.bound()
        if abs(self.lambda2) >= c:
            raise Inadmissible(
                f"|lambda2| = {abs(self.lambda2):g} must be below c(lambda1) = {c:.6g}")

    def phase_slope(self) -> float:
        if isinstance(self.phase, LinearPhase) and self.phase.A is not None:
            return self.phase.A
        return phase_coefficient(self.lambda2, self.model.s)

    def theta(self, y: np.ndarray) -> np.ndarray:
        """Phase function evaluated at ``y = x - x0``."""
        if isinstance(self.phase, QuadraticPhase):
            return y ** 2
        return self.phase_slope() * y

    def with_center(self, x0: float) -> "WaveParams":
        return WaveParams(self.model, self.lambda1, self.lambda2, x0, self.theta0, self.phase)


def stationary_symbol(grid: SpectralGrid, lambda1: float, lambda2: float, s: float) -> np.ndarray:
    """``Lhat(k) = |k|^(2s) + lambda1 - lambda2 k`` on the grid's wavenumbers."""
    return grid.symbol(2.0 * s) + lambda1 - lambda2 * grid.wavenumbers


def _wrap(y: np.ndarray, half_length: float) -> np.ndarray:
    return (y + half_length) % (2.0 * half_length) - half_length


@dataclass(eq=False)
class Profile:
    """Stationary profile ``u0 = v0 + i w0`` with its residual."""

    grid: SpectralGrid
    u0: ComplexField
    params: WaveParams
    residual: float
    iterations: int = 0

    @property
    def spectrum(self) -> Spectrum:
        return to_spectrum(self.u0)

    @property
    def rho(self) -> np.ndarray:
        return self.u0.rho

    @property
    def amplitude(self) -> float:
        """Peak of ``rho0`` located on the spectral interpolant."""
        return _refined_peak(self.spectrum)[1]

    @property
    def center(self) -> float:
        return _refined_peak(self.spectrum)[0]


def stationary_residual(u: Spectrum, params: WaveParams) -> float:
    """L2 norm of the stationary-equation residual for the coefficients ``u``."""
    grid = u.grid
    s = params.model.s
    Lhat = stationary_symbol(grid, params.lambda1, params.lambda2, s)
    nl = NonlinearEvaluator(grid, params.model.sigma)(u.coefficients)
    return Spectrum(grid, nl - Lhat * u.coefficients).l2_norm()


def _evaluate(c: Spectrum, x: float) -> tuple[complex, complex, complex]:
    """Value and first two derivatives of the trigonometric polynomial at ``x``."""
    kt = c.grid.wavenumbers
    e = c.coefficients * np.exp(1j * kt * x)
    return e.sum(), (1j * kt * e).sum(), (-(kt ** 2) * e).sum()


def _refined_peak(c: Spectrum) -> tuple[float, float]:
    """Maximum of ``|u|`` by Newton's method on ``d/dx |u|^2`` of the interpolant."""
    grid = c.grid
    rho2 = np.abs(from_spectrum(c).samples) ** 2
    x = float(grid.x[int(np.argmax(rho2))])
    for _ in range(20):
        f, fx, fxx = _evaluate(c, x)
        g1 = 2.0 * (np.conj(f) * fx).real
        g2 = 2.0 * (abs(fx) ** 2 + (np.conj(f) * fxx).real)
        if g2 >= 0:
            break
        dx = -g1 / g2
        dx = max(-grid.spacing, min(grid.spacing, dx))
        x += dx
        if abs(dx) < 1e-14 * max(1.0, abs(x)):
            break
    return x, float(abs(_evaluate(c, x)[0]))


def _normalize(c: Spectrum, params: WaveParams) -> Spectrum:
    """Translate the peak to ``x0`` and rotate the phase there to ``theta0``."""
    xc, _ = _refined_peak(c)
    shifted = c.shift(params.x0 - xc)
    value = _evaluate(shifted, params.x0)[0]
    rotation = np.exp(1j * (params.theta0 - np.angle(value)))
    return shifted * rotation


def _check_single_bump(rho: np.ndarray, fraction: float = 0.1) -> None:
    peak = int(np.argmax(rho))
    left, right = np.roll(rho, 1), np.roll(rho, -1)
    # strict on the left so a two-node plateau counts once
    local = (rho > left) & (rho >= right) & (rho > fraction * rho[peak])
    local[peak] = False
    if np.any(local):
        raise Stagnation("profile iteration converged to a multi-bump state")


def exact_nls_soliton(p: WaveParams, grid: SpectralGrid) -> Profile:
    """Closed-form soliton of the classical (s = 1) NLS sampled on ``grid``.

    ``rho(x) = (a(sigma+1))^(1/(2 sigma)) sech(sigma sqrt(a) x)^(1/sigma)`` with
    ``a = lambda1 - lambda2^2/4`` and phase ``theta(x) = lambda2 x / 2``.
    """
    if p.model.s != 1.0:
        raise ValueError("the closed-form soliton exists only for s = 1")
    sigma = p.model.sigma
    a = p.lambda1 - p.lambda2 ** 2 / 4.0
    if a <= 0:
        raise NonPositiveA(f"a = lambda1 - lambda2^2/4 = {a:g} must be positive")
    y = _wrap(grid.x - p.x0, grid.half_length)
    rho = (a * (sigma + 1.0)) ** (1.0 / (2.0 * sigma)) / np.cosh(sigma * math.sqrt(a) * y) ** (1.0 / sigma)
    u = rho * np.exp(1j * (0.5 * p.lambda2 * y + p.theta0))
    field_ = ComplexField(grid, u)
    params = WaveParams(p.model, p.lambda1, p.lambda2, p.x0, p.theta0, LinearPhase(0.5 * p.lambda2))
    return Profile(grid, field_, params, stationary_residual(to_spectrum(field_), params))


def traveling_solution(prof: Profile, t: float) -> ComplexField:
    """The profile translated by ``lambda2 t`` and rotated by ``lambda1 t``."""
    if t == 0:
        return prof.u0.copy()
    p = prof.params
    c = prof.spectrum.shift(p.lambda2 * t) * np.exp(1j * p.lambda1 * t)
    return from_spectrum(c)


def solve_profile(p: WaveParams, grid: SpectralGrid, tol: float = 1e-10,
                  max_iter: int = 10_000, seed: ComplexField | None = None) -> Profile:
    """Generalized Petviashvili iteration for the stationary profile.

    Iterates ``c <- M^gamma Nhat(c) / Lhat`` with the stabilizing factor
    ``M = <Lhat c, c> / <Nhat(c), c>`` and ``gamma = (2 sigma + 1)/(2 sigma)``
    until the stationary residual drops below ``tol``.  The default seed is a
    unit Gaussian at ``x0`` carrying the requested phase family.

    Raises
    ------
    Inadmissible
        The existence condition fails, so ``Lhat`` is not positive.
    Stagnation
        The residual stalls above ``tol`` or the iteration cap is reached.
    """
    p.check_admissible()
    s, sigma = p.model.s, p.model.sigma
    Lhat = stationary_symbol(grid, p.lambda1, p.lambda2, s)
    if Lhat.min() <= 0:
        raise Inadmissible(f"stationary symbol is not positive on this grid (min {Lhat.min():.3g})")
    nl = NonlinearEvaluator(grid, sigma)
    gamma = (2.0 * sigma + 1.0) / (2.0 * sigma)
    if seed is None:
        y = _wrap(grid.x - p.x0, grid.half_length)
        seed = ComplexField(grid, np.exp(-y ** 2) * np.exp(1j * (p.theta(y) + p.theta0)))
    c = to_spectrum(seed).coefficients
    norm = math.sqrt(2.0 * grid.half_length)
    best = math.inf
    best_at = 0
    residual = math.inf
    for it in range(1, max_iter + 1):
        n = nl(c)
        residual = norm * float(np.linalg.norm(n - Lhat * c))
        if residual < tol:
            break
        if not np.isfinite(residual):
            raise Stagnation("profile iteration diverged", residual, it)
        if residual < 0.9 * best:
            best, best_at = residual, it
        elif it - best_at > 2000:
            raise Stagnation(f"residual stalled at {residual:.3e} (tol {tol:.1e})", residual, it)
        num = float(np.sum(Lhat * np.abs(c) ** 2))
        den = float(np.sum(np.conj(c) * n).real)
        if den <= 0:
            raise Stagnation("iteration collapsed to the zero state", residual, it)
        c = (num / den) ** gamma * n / Lhat
    else:
        raise Stagnation(f"no convergence in {max_iter} iterations (residual {residual:.3e})",
                         residual, max_iter)
    c_spec = _normalize(Spectrum(grid, c), p)
    u0 = from_spectrum(c_spec)
    _check_single_bump(u0.rho)
    # the residual is recomputed because normalization adds rounding
    return Profile(grid, u0, p, stationary_residual(to_spectrum(u0), p), it)


class DecayFit(NamedTuple):
    prefactor: float
    exponent: float
    rms: float
    points: int

    @property
    def algebraic(self) -> bool:
        """Whether a power law describes the tail (log-log residual below 0.05)."""
        return self.rms < 0.05


def decay_fit(prof: Profile, window: tuple[float, float]) -> DecayFit:
    """Least-squares fit ``log rho = log K + p log|x - xc|`` over ``a <= |x - xc| <= b``."""
    a, b = window
    grid = prof.grid
    if not 0 < a < b < grid.half_length:
        raise DecayFitError(f"window {window} must lie inside (0, L = {grid.half_length})")
    xc = prof.center
    r = np.abs(_wrap(grid.x - xc, grid.half_length))
    mask = (r >= a) & (r <= b)
    if mask.sum() < 8:
        raise DecayFitError("window holds fewer than 8 grid points")
    rho = prof.rho[mask]
    if rho.min() <= 1e2 * np.finfo(float).eps * prof.rho.max():
        raise DecayFitError("tail falls below 1e2 machine epsilon inside the window")
    X = np.log(r[mask])
    Y = np.log(rho)
    A = np.vstack([np.ones_like(X), X]).T
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - Y) ** 2)))
    return DecayFit(float(np.exp(coef[0])), float(coef[1]), rms, int(mask.sum()))
