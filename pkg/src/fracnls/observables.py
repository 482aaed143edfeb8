"""Conserved quantities and solitary-wave diagnostics.

For a trigonometric polynomial ``u = sum c_k exp(i k x)`` on ``[-L, L]``::

    I1 = 1/2 int |u|^2          = L sum |c_k|^2
    I2 = 1/2 int (v w_x - w v_x) = L sum k |c_k|^2
    H  = 1/2 int ||D|^s u|^2 - 1/(2 sigma + 2) int |u|^(2 sigma + 2)

The potential part of ``H`` is integrated by the trapezoid rule on the padded
grid, which is exact for integer ``sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import ComplexField, ModelParams, NonlinearEvaluator, Spectrum, to_spectrum

__all__ = [
    "InvariantSet",
    "NoPeak",
    "PeakTrack",
    "PeakTracker",
    "invariants",
    "spectrum_invariants",
    "energy_sign",
    "negative_energy_scale",
    "peak_locate",
    "speed_estimate",
]


class InvariantSet(NamedTuple):
    I1: float
    I2: float
    H: float


class NoPeak(ValueError):
    pass


def spectrum_invariants(c: Spectrum, p: ModelParams,
                        evaluator: NonlinearEvaluator | None = None) -> InvariantSet:
    grid = c.grid
    L = grid.half_length
    power = np.abs(c.coefficients) ** 2
    I1 = L * float(power.sum())
    I2 = L * float(np.dot(grid.wavenumbers, power))
    kinetic = L * float(np.dot(grid.symbol(2.0 * p.s), power))
    if evaluator is None:
        evaluator = NonlinearEvaluator(grid, p.sigma)
    potential = evaluator.power_integral(c.coefficients, 2.0 * p.sigma + 2.0)
    return InvariantSet(I1, I2, kinetic - potential / (2.0 * p.sigma + 2.0))


def invariants(u: ComplexField, p: ModelParams) -> InvariantSet:
    """Mass, momentum and energy of ``u``."""
    return spectrum_invariants(to_spectrum(u), p)


def energy_sign(u: ComplexField, p: ModelParams) -> int:
    """Sign of the energy; negative energy is the blow-up probe precondition."""
    H = invariants(u, p).H
    return int(np.sign(H))


def negative_energy_scale(u: ComplexField, p: ModelParams) -> float:
    """Smallest factor ``e`` with ``H(e u) < 0`` for every larger factor.

    ``H(e u) = e^2 K - e^(2 sigma + 2) P/(2 sigma + 2)`` with kinetic part ``K``
    and potential integral ``P``, so the threshold is
    ``((2 sigma + 2) K / P)^(1/(2 sigma))``.
    """
    c = to_spectrum(u)
    L = c.grid.half_length
    kinetic = L * float(np.dot(c.grid.symbol(2.0 * p.s), np.abs(c.coefficients) ** 2))
    potential = NonlinearEvaluator(c.grid, p.sigma).power_integral(c.coefficients, 2.0 * p.sigma + 2.0)
    if potential == 0:
        raise ValueError("zero field has no negative-energy scale")
    return ((2.0 * p.sigma + 2.0) * kinetic / potential) ** (1.0 / (2.0 * p.sigma))


def peak_locate(u: ComplexField) -> tuple[float, float]:
    """Position and height of the maximum of ``rho = |u|``.

    The grid argmax is refined by a parabola through ``rho^2`` at the three
    nearest nodes (periodic neighbours).
    """
    rho2 = np.abs(u.samples) ** 2
    j = int(np.argmax(rho2))
    if rho2[j] - rho2.min() <= 1e-14 * max(rho2[j], 1e-300) or rho2[j] == 0:
        raise NoPeak("field is flat")
    fm, f0, fp = rho2[j - 1], rho2[j], rho2[(j + 1) % rho2.size]
    curv = fm - 2.0 * f0 + fp
    delta = 0.5 * (fm - fp) / curv if curv < 0 else 0.0
    peak2 = f0 - 0.25 * (fm - fp) * delta
    return float(u.grid.x[j] + delta * u.grid.spacing), float(np.sqrt(peak2))


def speed_estimate(track: "PeakTrack", window: int = 11) -> np.ndarray:
    """Sliding least-squares slope of position against time.

    ``window`` is an odd sample count; it shrinks symmetrically near the ends
    of the track.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 3")
    t = np.asarray(track.times, dtype=float)
    x = np.asarray(track.positions, dtype=float)
    n = t.size
    speeds = np.full(n, np.nan)
    half = window // 2
    for i in range(n):
        w = min(half, i, n - 1 - i)
        if w == 0:
            lo, hi = max(0, i - 1), min(n, i + 2)
        else:
            lo, hi = i - w, i + w + 1
        if hi - lo < 2:
            continue
        tt = t[lo:hi] - t[lo:hi].mean()
        speeds[i] = float(np.dot(tt, x[lo:hi] - x[lo:hi].mean()) / np.dot(tt, tt))
    return speeds


@dataclass
class PeakTrack:
    times: list[float] = field(default_factory=list)
    positions: list[float] = field(default_factory=list)
    amplitudes: list[float] = field(default_factory=list)

    def speeds(self, window: int = 11) -> np.ndarray:
        if len(self.times) < 2:
            return np.full(len(self.times), np.nan)
        return speed_estimate(self, window)

    def __len__(self):
        return len(self.times)


@dataclass
class PeakTracker:
    """Follows the tallest peak and unwraps its position across the period.

    If the argmax jumps by more than ``jump_cells`` grid cells while a bump
    of at least ``persistence`` times the previous amplitude survives near
    the old position, the old bump is kept.
    """

    half_length: float
    jump_cells: int = 10
    persistence: float = 0.9
    track: PeakTrack = field(default_factory=PeakTrack)
    _raw: float | None = field(default=None, repr=False)
    _offset: float = field(default=0.0, repr=False)

    def observe(self, t: float, u: ComplexField) -> tuple[float, float]:
        x, amp = peak_locate(u)
        if self._raw is not None:
            h = u.grid.spacing
            jump = _wrap_distance(x - self._raw, self.half_length)
            if abs(jump) > self.jump_cells * h:
                held = _local_peak(u, self._raw, self.jump_cells)
                if held is not None and held[1] >= self.persistence * self.track.amplitudes[-1]:
                    x, amp = held
            step = x - self._raw
            if step > self.half_length:
                self._offset -= 2.0 * self.half_length
            elif step < -self.half_length:
                self._offset += 2.0 * self.half_length
        self._raw = x
        self.track.times.append(float(t))
        self.track.positions.append(x + self._offset)
        self.track.amplitudes.append(amp)
        return x + self._offset, amp


def _wrap_distance(d: float, half_length: float) -> float:
    return (d + half_length) % (2.0 * half_length) - half_length


def _local_peak(u: ComplexField, x: float, cells: int) -> tuple[float, float] | None:
    """Peak of ``|u|`` restricted to ``cells`` grid cells around ``x``."""
    grid = u.grid
    j0 = int(round((x + grid.half_length) / grid.spacing))
    idx = np.arange(j0 - cells, j0 + cells + 1) % grid.points
    sub = np.abs(u.samples[idx]) ** 2
    j = int(np.argmax(sub))
    if j == 0 or j == sub.size - 1:
        return None
    fm, f0, fp = sub[j - 1], sub[j], sub[j + 1]
    curv = fm - 2.0 * f0 + fp
    delta = 0.5 * (fm - fp) / curv if curv < 0 else 0.0
    xj = grid.x[idx[j]]
    return float(xj + delta * grid.spacing), float(np.sqrt(f0 - 0.25 * (fm - fp) * delta))
