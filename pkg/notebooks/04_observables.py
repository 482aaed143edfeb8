# %% [markdown]
# # Invariants and peak tracking
#
# Mass ``I1``, momentum ``I2`` and energy ``H`` are evaluated spectrally.  The
# peak tracker refines the maximum of ``|u|`` and estimates the speed.

# %%
import numpy as np

from fracnls.grid import ModelParams, SpectralGrid, from_spectrum, to_spectrum
from fracnls.integrator import Stepper, StepperConfig
from fracnls.observables import PeakTracker, invariants
from fracnls.waves import WaveParams, solve_profile

model = ModelParams(0.8)
grid = SpectralGrid(64.0, 512)
prof = solve_profile(WaveParams(model, 1.0, 0.25), grid)
print(invariants(prof.u0, model))

# %%
tracker = PeakTracker(grid.half_length)
history = []


def observe(t, c):
    u = from_spectrum(c)
    tracker.observe(t, u)
    history.append(invariants(u, model))


Stepper(grid, model, StepperConfig(0.02)).advance(to_spectrum(prof.u0), 10.0, [observe], cadence=0.5)
I1 = np.array([h.I1 for h in history])
print("mass drift:", np.abs(I1 / I1[0] - 1).max())
print("speed estimate:", tracker.track.speeds(5)[-1], "(wave speed 0.25)")
