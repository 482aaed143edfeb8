import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracnls.grid import (
    ComplexField,
    ModelParams,
    NonlinearEvaluator,
    SpectralGrid,
    Spectrum,
    derivative,
    frac_laplacian,
    from_spectrum,
    half_operator,
    nonlinear_term,
    padded_size,
    rhs,
    to_spectrum,
)

from oracles import dense_coefficients, dense_rhs, evaluate, random_trig


def test_grid_defaults_and_wavenumbers():
    g = SpectralGrid(10.0, 8)
    assert g.points == 18
    assert g.spacing == pytest.approx(20.0 / 18)
    kt = g.wavenumbers
    assert kt[8] == 0.0
    np.testing.assert_array_equal(kt[::-1], -kt)
    assert kt[9] == pytest.approx(np.pi / 10)


@pytest.mark.parametrize("kw", [dict(half_length=0.0, modes=4), dict(half_length=1.0, modes=0),
                                dict(half_length=1.0, modes=4, points=8)])
def test_grid_rejects_bad_sizes(kw):
    with pytest.raises(ValueError):
        SpectralGrid(**kw)


def test_model_params_ranges():
    ModelParams(0.3, 0.5)
    with pytest.raises(ValueError):
        ModelParams(0.0)
    with pytest.raises(ValueError):
        ModelParams(1.2)
    with pytest.raises(ValueError):
        ModelParams(0.8, 0.4)
    with pytest.raises(ValueError):
        ModelParams(0.4).require_profile_range()


def test_field_size_mismatch():
    g = SpectralGrid(5.0, 4)
    with pytest.raises(ValueError):
        ComplexField(g, np.zeros(7))
    with pytest.raises(ValueError):
        Spectrum(g, np.zeros(8))


def test_constant_is_dc_mode():
    g = SpectralGrid(3.0, 6)
    c = to_spectrum(g.field(np.ones(g.points)))
    expected = np.zeros(13)
    expected[6] = 1.0
    np.testing.assert_allclose(c.coefficients, expected, atol=1e-15)


@pytest.mark.parametrize("points", [None, 17, 40])
def test_pure_mode(points):
    g = SpectralGrid(3.0, 8, points)
    c = to_spectrum(g.field(np.exp(1j * np.pi * g.x / 3.0)))
    assert c[1] == pytest.approx(1.0, abs=1e-14)
    c.coefficients[9] = 0.0
    assert np.max(np.abs(c.coefficients)) < 1e-14


@pytest.mark.parametrize("points", [None, 21, 64])
def test_transform_matches_dense_sum(rng, points):
    g = SpectralGrid(2.5, 10, points)
    f = rng.normal(size=g.points) + 1j * rng.normal(size=g.points)
    c = to_spectrum(g.field(f)).coefficients
    full = dense_coefficients(f, 2.5, g.x)
    np.testing.assert_allclose(c, full[len(full) // 2 - 10: len(full) // 2 + 11], atol=1e-13)
    back = from_spectrum(Spectrum(g, c)).samples
    np.testing.assert_allclose(back, evaluate(c, 2.5, g.x), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 40), extra=st.integers(0, 5), seed=st.integers(0, 2**32 - 1),
       L=st.floats(0.5, 100.0))
def test_round_trip_and_parseval_on_span(N, extra, seed, L):
    g = SpectralGrid(L, N, 2 * N + 1 + extra)
    rng = np.random.default_rng(seed)
    c = Spectrum(g, random_trig(rng, N))
    u = from_spectrum(c)
    back = to_spectrum(u)
    assert np.linalg.norm(back.coefficients - c.coefficients) <= 1e-13 * np.linalg.norm(c.coefficients)
    u2 = from_spectrum(back)
    assert np.linalg.norm(u2.samples - u.samples) <= 1e-13 * np.linalg.norm(u.samples)
    assert u.l2_norm() == pytest.approx(c.l2_norm(), rel=1e-13)


def test_arbitrary_samples_project_idempotently(rng):
    # with M = 2N + 2 one sample direction (the Nyquist mode) lies outside the span
    g = SpectralGrid(4.0, 12)
    f = g.field(rng.normal(size=g.points) + 1j * rng.normal(size=g.points))
    once = from_spectrum(to_spectrum(f))
    twice = from_spectrum(to_spectrum(once))
    np.testing.assert_allclose(twice.samples, once.samples, atol=1e-14)
    assert once.l2_norm() <= f.l2_norm()


def test_odd_grid_round_trip_is_exact_for_any_samples(rng):
    g = SpectralGrid(4.0, 12, 25)
    f = g.field(rng.normal(size=25) + 1j * rng.normal(size=25))
    back = from_spectrum(to_spectrum(f))
    assert np.linalg.norm(back.samples - f.samples) <= 1e-13 * np.linalg.norm(f.samples)


def test_fractional_operators_on_modes():
    L = 4.0
    g = SpectralGrid(L, 6)
    const = g.zeros()
    const.coefficients[6] = 2.0 + 1j
    assert np.max(np.abs(frac_laplacian(const, 0.7).coefficients)) == 0.0
    assert np.max(np.abs(half_operator(const, 0.7).coefficients)) == 0.0
    assert np.max(np.abs(derivative(const).coefficients)) == 0.0
    mode = to_spectrum(g.field(np.exp(1j * np.pi * g.x / L)))
    out = frac_laplacian(mode, 0.7)
    assert out[1] == pytest.approx((np.pi / L) ** 1.4, rel=1e-13)
    assert half_operator(mode, 0.7)[1] == pytest.approx((np.pi / L) ** 0.7, rel=1e-13)


def test_s1_laplacian_is_second_derivative():
    L = 5.0
    g = SpectralGrid(L, 10)
    k = 3 * np.pi / L
    c = to_spectrum(g.field(np.cos(k * g.x)))
    out = from_spectrum(frac_laplacian(c, 1.0)).samples
    np.testing.assert_allclose(out, k ** 2 * np.cos(k * g.x), atol=1e-12)
    d = from_spectrum(derivative(to_spectrum(g.field(np.sin(k * g.x))))).samples
    np.testing.assert_allclose(d, k * np.cos(k * g.x), atol=1e-12)


def test_derivative_matches_finite_differences():
    g = SpectralGrid(20.0, 256)
    u = 1.0 / np.cosh(g.x)
    du = from_spectrum(derivative(to_spectrum(g.field(u)))).samples.real
    errors = []
    for h in (1e-2, 5e-3):
        fd = (1.0 / np.cosh(g.x + h) - 1.0 / np.cosh(g.x - h)) / (2 * h)
        errors.append(np.max(np.abs(du - fd)))
    # centred differences: error ratio 4 when h halves
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.02)
    assert errors[0] < 1e-4


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.05, 1.0))
def test_operators_self_adjoint_and_semigroup(seed, s):
    rng = np.random.default_rng(seed)
    g = SpectralGrid(3.0, 16)
    f = Spectrum(g, random_trig(rng, 16))
    h = Spectrum(g, random_trig(rng, 16))

    def inner(a, b):
        return np.vdot(b.coefficients, a.coefficients) * 2 * g.L

    Af = frac_laplacian(f, s)
    assert inner(Af, f).real >= -1e-12
    scale = max(1.0, abs(inner(Af, h)))
    assert abs(inner(Af, h) - inner(f, frac_laplacian(h, s))) <= 1e-12 * scale
    twice = half_operator(half_operator(f, s), s).coefficients
    assert np.max(np.abs(twice - Af.coefficients)) <= 1e-13 * max(1.0, np.max(np.abs(Af.coefficients)))


def test_padding_sizes():
    assert padded_size(10, 1.0) >= 2 * 21
    assert padded_size(10, 2.0) >= 3 * 21
    assert padded_size(10, 1.5) >= 2 * 21


def test_nonlinear_trivial_cases():
    g = SpectralGrid(3.0, 8)
    zero = nonlinear_term(g.field(np.zeros(g.points)), 1.5)
    assert np.all(zero.samples == 0)
    c = 0.3 - 0.7j
    out = nonlinear_term(g.field(np.full(g.points, c)), 1.0)
    np.testing.assert_allclose(out.samples, abs(c) ** 2 * c, atol=1e-15)
    mode = g.field(np.exp(1j * 2 * np.pi * g.x / 3.0))
    np.testing.assert_allclose(nonlinear_term(mode, 1.0).samples, mode.samples, atol=1e-14)
    np.testing.assert_allclose(nonlinear_term(mode, 1.7).samples, mode.samples, atol=1e-14)
    with pytest.raises(ValueError):
        nonlinear_term(mode, 0.25)


def test_non_integer_sigma_guards_vacuum():
    g = SpectralGrid(3.0, 8)
    u = np.zeros(g.points, dtype=complex)
    u[3] = 1.0
    ev = NonlinearEvaluator(g, 0.5)
    vals = ev.pointwise(np.array([0.0, 1e-300, 2.0 + 0j]))
    assert np.all(np.isfinite(vals))
    assert vals[0] == 0.0 and vals[2] == pytest.approx(4.0)


@pytest.mark.parametrize("s,sigma", [(1.0, 1.0), (0.8, 1.0), (0.6, 2.0)])
def test_rhs_matches_dense_assembly(rng, s, sigma):
    L, N = 2.0, 8
    g = SpectralGrid(L, N)
    c = random_trig(rng, N, scale=0.4, decay=0.2)
    got = rhs(Spectrum(g, c), ModelParams(s, sigma)).coefficients
    want = dense_rhs(c, L, s, sigma)
    np.testing.assert_allclose(got, want, atol=1e-13 * np.max(np.abs(want)))


def test_rhs_trivial_cases():
    g = SpectralGrid(2.0, 8)
    p = ModelParams(0.7, 1.0)
    assert np.all(rhs(g.zeros(), p).coefficients == 0)
    mode = g.zeros()
    mode.coefficients[8 + 3] = 0.5
    lin = rhs(mode, p, nonlinear=False)
    assert lin[3] == pytest.approx(-1j * (3 * np.pi / 2.0) ** 1.4 * 0.5)


def test_rhs_s1_is_classical_nls(rng):
    L, N = 6.0, 32
    g = SpectralGrid(L, N)
    c = random_trig(rng, N, scale=0.3, decay=0.3)
    uxx = from_spectrum(derivative(derivative(Spectrum(g, c))))
    classical = to_spectrum(g.field(1j * uxx.samples)).coefficients + 1j * dense_rhs(
        c, L, 1.0, 1.0, linear=False) / 1j
    got = rhs(Spectrum(g, c), ModelParams(1.0, 1.0)).coefficients
    np.testing.assert_allclose(got, classical, atol=1e-12)


def test_spectrum_parts_and_shift(rng):
    g = SpectralGrid(3.0, 10)
    c = Spectrum(g, random_trig(rng, 10))
    u = from_spectrum(c).samples
    np.testing.assert_allclose(from_spectrum(c.real_part()).samples, u.real, atol=1e-13)
    np.testing.assert_allclose(from_spectrum(c.imag_part()).samples, u.imag, atol=1e-13)
    np.testing.assert_allclose(from_spectrum(c.conj()).samples, np.conj(u), atol=1e-13)
    shifted = c.shift(3 * g.spacing)
    np.testing.assert_allclose(from_spectrum(shifted).samples, np.roll(u, 3), atol=1e-12)
