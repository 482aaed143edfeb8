"""Linear dispersion analysis around a wave moving at speed ``cs``.

Plane waves ``exp(i(k y - omega t))`` of the linearization in the co-moving
variable satisfy ``omega_pm(k) = -cs k +- |k|^(2s)``.  Phase speeds are
``V_pm(k) = -cs +- phi(k)`` with ``phi(k) = |k|^(2s)/k`` (``phi(0) = 0``) and
group velocities ``omega'_pm(k) = -cs +- psi'(k)`` with
``psi'(k) = 2s sign(k) |k|^(2s-1)``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DispersionParams",
    "omega",
    "phase_velocity",
    "group_velocity",
    "essential_spectrum",
    "phase_threshold",
    "group_threshold",
    "tail_direction_report",
    "report_csv",
]


def _sign(branch) -> int:
    if branch in ("+", 1, +1):
        return 1
    if branch in ("-", -1):
        return -1
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


@dataclass(frozen=True)
class DispersionParams:
    cs: float
    s: float
    lambda1: float = 1.0

    def __post_init__(self):
        if not 0.5 < self.s <= 1.0:
            raise ValueError(f"dispersion analysis needs s in (1/2, 1], got {self.s}")


def omega(k, branch, p: DispersionParams):
    k = np.asarray(k, dtype=float)
    return -p.cs * k + _sign(branch) * np.abs(k) ** (2.0 * p.s)


def _phi(k, s):
    k = np.asarray(k, dtype=float)
    out = np.zeros_like(k)
    nz = k != 0
    out[nz] = np.abs(k[nz]) ** (2.0 * s) / k[nz]
    return out


def phase_velocity(k, branch, p: DispersionParams):
    """``V_pm(k) = omega_pm(k)/k``, continued by ``phi(0) = 0`` at the origin."""
    return -p.cs + _sign(branch) * _phi(k, p.s)


def group_velocity(k, branch, p: DispersionParams):
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise ValueError("group velocity is undefined at k = 0")
    dpsi = 2.0 * p.s * np.sign(k) * np.abs(k) ** (2.0 * p.s - 1.0)
    return -p.cs + _sign(branch) * dpsi


def essential_spectrum(xi, branch, lambda1: float, lambda2: float, s: float):
    """``lambda_pm(xi) = -(|xi|^(2s) + lambda1) +- xi lambda2``."""
    xi = np.asarray(xi, dtype=float)
    return -(np.abs(xi) ** (2.0 * s) + lambda1) + _sign(branch) * xi * lambda2


def phase_threshold(p: DispersionParams) -> float:
    """``k* = cs^(1/(2s-1))``: root of ``V_+`` for ``k > 0``."""
    return p.cs ** (1.0 / (2.0 * p.s - 1.0))


def group_threshold(p: DispersionParams) -> float:
    """``(cs/2s)^(1/(2s-1))``: root of ``omega'_+`` for ``k > 0``."""
    return (p.cs / (2.0 * p.s)) ** (1.0 / (2.0 * p.s - 1.0))


_COLUMNS = ("k", "omega_plus", "omega_minus", "V_plus", "V_minus",
            "group_plus", "group_minus", "plus_leads", "minus_leads")


def tail_direction_report(p: DispersionParams, k_grid) -> list[dict]:
    """Rows of frequencies, phase and group velocities for each ``k``.

    Group velocities are relative to the wave, so a branch leads the wave
    when its group velocity is positive and trails it when negative.  For
    ``k > 0`` the ordering ``omega'_- < -cs < omega'_+`` always holds.
    ``k = 0`` rows carry no group velocity.
    """
    rows = []
    for k in np.asarray(k_grid, dtype=float):
        row = {
            "k": float(k),
            "omega_plus": float(omega(k, "+", p)),
            "omega_minus": float(omega(k, "-", p)),
            "V_plus": float(phase_velocity(k, "+", p)),
            "V_minus": float(phase_velocity(k, "-", p)),
        }
        if k == 0:
            row.update(group_plus=None, group_minus=None, plus_leads=None, minus_leads=None)
        else:
            gp = float(group_velocity(k, "+", p))
            gm = float(group_velocity(k, "-", p))
            row.update(group_plus=gp, group_minus=gm,
                       plus_leads=gp > 0, minus_leads=gm > 0)
        rows.append(row)
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    return repr(float(value) + 0.0)


def report_csv(p: DispersionParams, k_grid) -> str:
    """CSV text of :func:`tail_direction_report` with the thresholds as header comments."""
    buf = io.StringIO()
    buf.write(f"# cs = {p.cs!r}\n# s = {p.s!r}\n")
    buf.write(f"# k_phase_threshold = {phase_threshold(p)!r}\n")
    buf.write(f"# k_group_threshold = {group_threshold(p)!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for row in tail_direction_report(p, k_grid):
        writer.writerow([_fmt(row[c]) for c in _COLUMNS])
    return buf.getvalue()
