"""Periodic Fourier grid, field containers and Fourier multiplier operators.

Fields live on the equispaced nodes ``x_j = -L + j h`` (``h = 2L/M``) of the
interval ``[-L, L)``.  Spectra hold the ``2N + 1`` Galerkin coefficients
``c_k``, ``k = -N..N``, stored DC-centred so that ``coefficients[k + N]``
multiplies ``exp(i k pi x / L)``.

The pointwise nonlinearity ``|u|^(2 sigma) u`` is evaluated on a zero-padded
grid and projected back onto the retained modes.  For integer ``sigma`` the
padding makes the projection exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "SpectralGrid",
    "ComplexField",
    "Spectrum",
    "ModelParams",
    "NonlinearEvaluator",
    "to_spectrum",
    "from_spectrum",
    "frac_laplacian",
    "half_operator",
    "derivative",
    "nonlinear_term",
    "rhs",
]


def _is_integer(value: float) -> bool:
    return float(value).is_integer()


@dataclass(frozen=True)
class ModelParams:
    """Fractional order ``s`` and nonlinearity exponent ``sigma``."""

    s: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.s <= 1.0:
            raise ValueError(f"fractional order s must lie in (0, 1], got {self.s}")
        if self.sigma < 0.5:
            raise ValueError(f"sigma must be >= 1/2, got {self.sigma}")

    def require_profile_range(self) -> None:
        """Raise unless ``s`` lies in ``(1/2, 1]`` (profiles, dispersion)."""
        if not 0.5 < self.s <= 1.0:
            raise ValueError(f"operation requires s in (1/2, 1], got {self.s}")


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Periodic grid on ``[-L, L)`` carrying the modes ``k = -N..N``.

    Parameters
    ----------
    half_length
        Half period ``L``.
    modes
        Degree bound ``N``; the Galerkin space is spanned by
        ``exp(i k pi x / L)`` for ``|k| <= N``.
    points
        Number of physical samples ``M``.  Defaults to ``2N + 2``.
    """

    half_length: float
    modes: int
    points: int | None = None

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")
        if int(self.modes) != self.modes or self.modes < 1:
            raise ValueError("modes must be a positive integer")
        object.__setattr__(self, "modes", int(self.modes))
        if self.points is None:
            object.__setattr__(self, "points", 2 * self.modes + 2)
        if self.points < 2 * self.modes + 1:
            raise ValueError(f"points must be >= 2N+1 = {2 * self.modes + 1}, got {self.points}")
        object.__setattr__(self, "points", int(self.points))

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return (self.half_length, self.modes, self.points) == (
            other.half_length, other.modes, other.points)

    def __hash__(self):
        return hash((self.half_length, self.modes, self.points))

    @property
    def L(self) -> float:
        return self.half_length

    @property
    def N(self) -> int:
        return self.modes

    @property
    def M(self) -> int:
        return self.points

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.points

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_length + self.spacing * np.arange(self.points)
        x.flags.writeable = False
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Signed mode indices ``-N..N``."""
        k = np.arange(-self.modes, self.modes + 1)
        k.flags.writeable = False
        return k

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Scaled wavenumbers ``k pi / L`` for ``k = -N..N``."""
        kt = self.k * (np.pi / self.half_length)
        kt[self.modes] = 0.0
        kt.flags.writeable = False
        return kt

    @cached_property
    def _fft_index(self) -> np.ndarray:
        # position of mode k inside a length-M FFT array
        return np.mod(self.k, self.points)

    @cached_property
    def _node_sign(self) -> np.ndarray:
        # exp(i k pi x_0 / L) with x_0 = -L
        return np.where(self.k % 2 == 0, 1.0, -1.0)

    def symbol(self, exponent: float) -> np.ndarray:
        """``|k pi / L|^exponent`` with the zero mode mapped to 0."""
        out = np.abs(self.wavenumbers) ** exponent
        out[self.modes] = 0.0
        return out

    def zeros(self) -> "Spectrum":
        return Spectrum(self, np.zeros(2 * self.modes + 1, dtype=complex))

    def field(self, samples) -> "ComplexField":
        return ComplexField(self, samples)


@dataclass(eq=False)
class ComplexField:
    """Samples of ``u = v + i w`` at the grid nodes."""

    grid: SpectralGrid
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.points,):
            raise ValueError(
                f"expected {self.grid.points} samples, got shape {self.samples.shape}")

    @property
    def v(self) -> np.ndarray:
        return self.samples.real

    @property
    def w(self) -> np.ndarray:
        return self.samples.imag

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.samples)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.spacing * np.sum(np.abs(self.samples) ** 2)))

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.samples.copy())


@dataclass(eq=False)
class Spectrum:
    """Galerkin coefficients ``c_k``, ``k = -N..N``, DC-centred."""

    grid: SpectralGrid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        n = 2 * self.grid.modes + 1
        if self.coefficients.shape != (n,):
            raise ValueError(f"expected {n} coefficients, got shape {self.coefficients.shape}")

    def __getitem__(self, k: int) -> complex:
        return self.coefficients[k + self.grid.modes]

    def l2_norm(self) -> float:
        """L2 norm on ``[-L, L]`` of the trigonometric polynomial."""
        return float(np.sqrt(2.0 * self.grid.half_length * np.sum(np.abs(self.coefficients) ** 2)))

    def real_part(self) -> "Spectrum":
        """Coefficients of ``v = Re u``."""
        c = self.coefficients
        return Spectrum(self.grid, 0.5 * (c + np.conj(c[::-1])))

    def imag_part(self) -> "Spectrum":
        """Coefficients of ``w = Im u``."""
        c = self.coefficients
        return Spectrum(self.grid, -0.5j * (c - np.conj(c[::-1])))

    def conj(self) -> "Spectrum":
        return Spectrum(self.grid, np.conj(self.coefficients[::-1]))

    def shift(self, dx: float) -> "Spectrum":
        """Exact translation ``u(x) -> u(x - dx)`` of the trigonometric polynomial."""
        return Spectrum(self.grid, self.coefficients * np.exp(-1j * self.grid.wavenumbers * dx))

    def __add__(self, other: "Spectrum") -> "Spectrum":
        _check_same_grid(self.grid, other.grid)
        return Spectrum(self.grid, self.coefficients + other.coefficients)

    def __sub__(self, other: "Spectrum") -> "Spectrum":
        _check_same_grid(self.grid, other.grid)
        return Spectrum(self.grid, self.coefficients - other.coefficients)

    def __mul__(self, scalar) -> "Spectrum":
        return Spectrum(self.grid, self.coefficients * scalar)

    __rmul__ = __mul__


def _check_same_grid(a: SpectralGrid, b: SpectralGrid) -> None:
    if a != b:
        raise ValueError("fields live on different grids")


def to_spectrum(f: ComplexField) -> Spectrum:
    """Discrete Fourier coefficients of ``f`` truncated to ``|k| <= N``."""
    g = f.grid
    if f.samples.shape != (g.points,):
        raise ValueError("sample count does not match grid")
    full = sfft.fft(f.samples, norm="forward")
    return Spectrum(g, full[g._fft_index] * g._node_sign)


def from_spectrum(c: Spectrum) -> ComplexField:
    """Evaluate the trigonometric polynomial at the grid nodes."""
    g = c.grid
    if c.coefficients.shape != (2 * g.modes + 1,):
        raise ValueError("coefficient count does not match grid")
    full = np.zeros(g.points, dtype=complex)
    full[g._fft_index] = c.coefficients * g._node_sign
    return ComplexField(g, sfft.ifft(full, norm="forward"))


def frac_laplacian(c: Spectrum, s: float) -> Spectrum:
    """Apply ``(-d_xx)^s``: multiply mode ``k`` by ``|k pi/L|^(2s)``."""
    if not s > 0:
        raise ValueError("s must be positive")
    return Spectrum(c.grid, c.coefficients * c.grid.symbol(2.0 * s))


def half_operator(c: Spectrum, s: float) -> Spectrum:
    """Apply ``|D|^s``: multiply mode ``k`` by ``|k pi/L|^s``."""
    if not s > 0:
        raise ValueError("s must be positive")
    return Spectrum(c.grid, c.coefficients * c.grid.symbol(s))


def derivative(c: Spectrum) -> Spectrum:
    return Spectrum(c.grid, c.coefficients * (1j * c.grid.wavenumbers))


def padded_size(modes: int, sigma: float) -> int:
    """Evaluation grid size used to project ``|u|^(2 sigma) u``."""
    factor = int(sigma) + 1 if _is_integer(sigma) else 2
    return sfft.next_fast_len(factor * (2 * modes + 1))


@dataclass(eq=False)
class NonlinearEvaluator:
    """Projected nonlinearity ``P_N(|u|^(2 sigma) u)`` on raw coefficient arrays.

    Holds the zero-padded evaluation grid; reuse one instance per
    ``(grid, sigma)`` pair inside time loops.
    """

    grid: SpectralGrid
    sigma: float
    size: int = field(init=False)

    def __post_init__(self):
        self.size = padded_size(self.grid.modes, self.sigma)
        self._index = np.mod(self.grid.k, self.size)
        self._cubic = self.sigma == 1.0
        self._buffer = np.zeros(self.size, dtype=complex)

    def evaluate(self, coefficients: np.ndarray) -> np.ndarray:
        """Values of the polynomial on the padded grid ``y_j = 2L j / P``."""
        buf = self._buffer
        buf[:] = 0.0
        buf[self._index] = coefficients
        return sfft.ifft(buf, norm="forward")

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        mod2 = values.real * values.real + values.imag * values.imag
        if self._cubic:
            return mod2 * values
        weight = np.zeros_like(mod2)
        nz = mod2 > 0.0
        weight[nz] = np.exp(self.sigma * np.log(mod2[nz]))
        return weight * values

    def __call__(self, coefficients: np.ndarray) -> np.ndarray:
        values = self.evaluate(coefficients)
        return sfft.fft(self.pointwise(values), norm="forward")[self._index]

    def power_integral(self, coefficients: np.ndarray, power: float) -> float:
        """``int |u|^power dx`` by the trapezoid rule on the padded grid."""
        values = self.evaluate(coefficients)
        mod2 = values.real ** 2 + values.imag ** 2
        weight = np.zeros_like(mod2)
        nz = mod2 > 0.0
        weight[nz] = np.exp(0.5 * power * np.log(mod2[nz]))
        return float(2.0 * self.grid.half_length * np.mean(weight))


def nonlinear_term(u: ComplexField, sigma: float) -> ComplexField:
    """Projection of ``(v^2 + w^2)^sigma (v + i w)`` onto the grid's modes."""
    if sigma < 0.5:
        raise ValueError("sigma must be >= 1/2")
    c = to_spectrum(u)
    nl = NonlinearEvaluator(u.grid, sigma)(c.coefficients)
    return from_spectrum(Spectrum(u.grid, nl))


def rhs(c: Spectrum, p: ModelParams, nonlinear: bool = True) -> Spectrum:
    """Right-hand side ``du/dt = -i |k|^(2s) u + i P_N(|u|^(2 sigma) u)``."""
    out = -1j * c.grid.symbol(2.0 * p.s) * c.coefficients
    if nonlinear:
        out = out + 1j * NonlinearEvaluator(c.grid, p.sigma)(c.coefficients)
    return Spectrum(c.grid, out)
