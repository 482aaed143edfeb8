import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracnls.grid import ModelParams, SpectralGrid, Spectrum, from_spectrum, to_spectrum
from fracnls.integrator import Stepper, StepperConfig
from fracnls.observables import (
    NoPeak,
    PeakTrack,
    PeakTracker,
    energy_sign,
    invariants,
    negative_energy_scale,
    peak_locate,
    speed_estimate,
)
from fracnls.waves import WaveParams, exact_nls_soliton

from oracles import evaluate, random_trig

A_NLS = 0.984375
# mpmath quadrature of the closed-form soliton energy (s = sigma = 1, lambda = (1, 0.25))
H_NLS = -0.6200979635307634


@pytest.fixture(scope="module")
def soliton():
    return exact_nls_soliton(WaveParams(ModelParams(1.0), 1.0, 0.25), SpectralGrid(64.0, 1024))


def test_zero_and_real_fields():
    g = SpectralGrid(5.0, 16)
    p = ModelParams(0.8)
    assert tuple(invariants(g.field(np.zeros(g.points)), p)) == (0.0, 0.0, 0.0)
    real = g.field(np.exp(-g.x ** 2))
    assert invariants(real, p).I2 == pytest.approx(0.0, abs=1e-15)


def test_soliton_invariants(soliton):
    inv = invariants(soliton.u0, ModelParams(1.0))
    I1 = 2 * math.sqrt(A_NLS)
    assert inv.I1 == pytest.approx(I1, rel=1e-12)
    # theta' = lambda2/2 so I2 = (1/2) int rho^2 theta' = I1 lambda2 / 2
    assert inv.I2 == pytest.approx(I1 * 0.125, rel=1e-12)
    assert inv.H == pytest.approx(H_NLS, rel=1e-11)


def _dense_invariants(c, L, s, sigma, factor=4):
    N = (len(c) - 1) // 2
    M = factor * (2 * N + 2)
    x = -L + 2 * L * np.arange(M) / M
    h = 2 * L / M
    kt = np.arange(-N, N + 1) * np.pi / L
    u = evaluate(c, L, x)
    ux = evaluate(1j * kt * c, L, x)
    du = evaluate(np.abs(kt) ** s * c, L, x)
    I1 = 0.5 * h * np.sum(np.abs(u) ** 2)
    I2 = 0.5 * h * np.sum(u.real * ux.imag - u.imag * ux.real)
    H = h * np.sum(0.5 * np.abs(du) ** 2 - np.abs(u) ** (2 * sigma + 2) / (2 * sigma + 2))
    return I1, I2, H


@pytest.mark.parametrize("s,sigma", [(0.8, 1.0), (0.6, 2.0), (1.0, 1.0)])
def test_invariants_match_dense_quadrature(rng, s, sigma):
    L, N = 3.0, 12
    g = SpectralGrid(L, N)
    c = random_trig(rng, N, scale=0.5, decay=0.2)
    got = invariants(from_spectrum(Spectrum(g, c)), ModelParams(s, sigma))
    want = _dense_invariants(c, L, s, sigma)
    np.testing.assert_allclose(tuple(got), want, rtol=0, atol=1e-12 * max(1.0, max(map(abs, want))))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.55, 1.0))
def test_conjugation_symmetry(seed, s):
    rng = np.random.default_rng(seed)
    g = SpectralGrid(4.0, 16)
    u = from_spectrum(Spectrum(g, random_trig(rng, 16, decay=0.2)))
    p = ModelParams(s, 1.0)
    a = invariants(u, p)
    b = invariants(g.field(np.conj(u.samples)), p)
    assert a.I1 >= 0
    assert b.I1 == pytest.approx(a.I1, rel=1e-13)
    assert b.H == pytest.approx(a.H, rel=1e-13, abs=1e-13)
    assert b.I2 == pytest.approx(-a.I2, rel=1e-13, abs=1e-13)


def test_energy_sign_and_threshold(soliton):
    p = ModelParams(1.0)
    g = soliton.grid
    assert energy_sign(g.field(np.zeros(g.points)), p) == 0
    assert energy_sign(g.field(1e-3 * soliton.u0.samples), p) == 1
    assert energy_sign(g.field(10 * soliton.u0.samples), p) == -1
    lo, hi = 1e-3, 10.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if energy_sign(g.field(mid * soliton.u0.samples), p) < 0:
            hi = mid
        else:
            lo = mid
    assert negative_energy_scale(soliton.u0, p) == pytest.approx(hi, rel=1e-10)


def test_peak_of_soliton(soliton):
    x, amp = peak_locate(soliton.u0)
    assert abs(x) <= soliton.grid.spacing ** 2 / 8
    assert amp == pytest.approx(math.sqrt(2 * A_NLS), abs=1e-4)


def test_peak_shift_and_phase_equivariance(soliton):
    u = soliton.u0
    x, amp = peak_locate(soliton.grid.field(np.roll(u.samples, 3)))
    x0, amp0 = peak_locate(u)
    assert x - x0 == pytest.approx(3 * soliton.grid.spacing, abs=1e-12)
    assert amp == amp0
    xr, ampr = peak_locate(soliton.grid.field(u.samples * np.exp(0.4j)))
    assert (xr, ampr) == pytest.approx((x0, amp0), abs=1e-14)


def test_peak_of_gaussian():
    g = SpectralGrid(10.0, 63)
    assert 5.0 in g.x
    x, amp = peak_locate(g.field(np.exp(-(g.x - 5.0) ** 2)))
    assert x == pytest.approx(5.0, abs=1e-6)
    assert amp == pytest.approx(1.0, abs=1e-8)


def test_peak_between_nodes_is_interpolated():
    g = SpectralGrid(10.0, 255)
    x, amp = peak_locate(g.field(np.exp(-(g.x - 1.234) ** 2)))
    assert x == pytest.approx(1.234, abs=1e-4)


def test_flat_field_has_no_peak():
    g = SpectralGrid(3.0, 8)
    with pytest.raises(NoPeak):
        peak_locate(g.field(np.full(g.points, 0.5 + 0.5j)))
    with pytest.raises(NoPeak):
        peak_locate(g.field(np.zeros(g.points)))


def test_speed_of_linear_track():
    t = np.arange(30) * 0.5
    track = PeakTrack(list(t), list(0.25 * t), [1.0] * 30)
    np.testing.assert_allclose(speed_estimate(track), 0.25, rtol=1e-13)
    for bad in (2, 4, 1):
        with pytest.raises(ValueError):
            speed_estimate(track, bad)


def test_tracker_unwraps_periodic_boundary():
    g = SpectralGrid(10.0, 127)
    tracker = PeakTracker(10.0)
    for t in np.arange(0, 12.0, 0.5):
        center = (8.0 + 0.5 * t + 10.0) % 20.0 - 10.0
        y = (g.x - center + 10.0) % 20.0 - 10.0
        tracker.observe(t, g.field(np.exp(-y ** 2)))
    pos = np.array(tracker.track.positions)
    np.testing.assert_allclose(pos, 8.0 + 0.5 * np.array(tracker.track.times), atol=1e-3)
    assert np.all(np.abs(np.diff(pos)) < 10.0)


def test_tracker_holds_persistent_peak():
    g = SpectralGrid(50.0, 511)
    tracker = PeakTracker(50.0)
    tracker.observe(0.0, g.field(np.exp(-(g.x + 20) ** 2)))
    # a slightly taller bump appears far away while the tracked one persists
    two = np.exp(-(g.x + 20) ** 2) * 0.98 + 1.05 * np.exp(-(g.x - 20) ** 2)
    x, amp = tracker.observe(0.5, g.field(two))
    assert x == pytest.approx(-20.0, abs=1e-3)
    # the old bump fades: the tracker moves on
    fade = np.exp(-(g.x + 20) ** 2) * 0.5 + 1.05 * np.exp(-(g.x - 20) ** 2)
    x, amp = tracker.observe(1.0, g.field(fade))
    assert x == pytest.approx(20.0, abs=1e-3)


def test_soliton_run_speed(soliton):
    g = SpectralGrid(32.0, 256)
    prof = exact_nls_soliton(WaveParams(ModelParams(1.0), 1.0, 0.25), g)
    tracker = PeakTracker(g.L)
    stepper = Stepper(g, prof.params.model, StepperConfig(0.05))
    stepper.advance(prof.spectrum, 20.0, [lambda t, c: tracker.observe(t, from_spectrum(c))], cadence=0.5)
    speeds = tracker.track.speeds()
    assert np.mean(speeds) == pytest.approx(0.25, abs=1e-3)
