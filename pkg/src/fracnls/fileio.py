"""CSV and key-value text output.

Numbers are written as the shortest decimal string that round-trips to the
same binary64 value, so files are byte-deterministic and reload losslessly.
"""
from __future__ import annotations

import csv
import hashlib
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .grid import ComplexField, SpectralGrid

__all__ = [
    "SERIES_COLUMNS",
    "SNAPSHOT_COLUMNS",
    "fmt",
    "write_series",
    "read_series",
    "write_snapshot",
    "read_snapshot",
    "snapshot_name",
    "write_keyvalue",
    "read_keyvalue",
    "checksum",
]

SERIES_COLUMNS = ("t", "I1", "I2", "H", "x_peak", "amplitude", "speed")
SNAPSHOT_COLUMNS = ("x", "v", "w", "rho")


def fmt(value) -> str:
    """Shortest round-trip text for a real number."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_rows(path: Path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_series(path, rows: Iterable[Iterable[float]]) -> None:
    _write_rows(Path(path), SERIES_COLUMNS, rows)


def read_series(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return {name: data[:, i] for i, name in enumerate(header)}


def snapshot_name(t: float) -> str:
    return f"u_t{fmt(t)}.csv"


def write_snapshot(path, u: ComplexField) -> None:
    rows = zip(u.grid.x, u.v, u.w, u.rho)
    _write_rows(Path(path), SNAPSHOT_COLUMNS, rows)


def read_snapshot(path) -> ComplexField:
    """Reload a snapshot; the grid is recovered from the node column."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = data[:, 0]
    points = x.size
    half_length = -float(x[0])
    modes = (points - 1) // 2 if points % 2 else (points - 2) // 2
    grid = SpectralGrid(half_length, modes, points)
    if not np.allclose(grid.x, x, rtol=0, atol=1e-9 * half_length):
        raise ValueError(f"{path}: nodes are not a uniform grid starting at -L")
    return ComplexField(grid, data[:, 1] + 1j * data[:, 2])


def write_keyvalue(path, items: Mapping[str, object] | Iterable[tuple[str, object]]) -> None:
    pairs = items.items() if isinstance(items, Mapping) else items
    with open(path, "w") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {value}\n")


def read_keyvalue(path) -> dict[str, str]:
    from .config import parse_keyvalue

    return parse_keyvalue(Path(path).read_text())


def checksum(array: np.ndarray) -> str:
    """SHA-256 of the little-endian bytes of ``array``."""
    a = np.ascontiguousarray(array)
    return hashlib.sha256(a.astype(a.dtype.newbyteorder("<"), copy=False).tobytes()).hexdigest()
