# %% [markdown]
# # Perturbed initial data
#
# Each preset names an initial-data construction and run settings.  Building
# the datum is deterministic; projection onto the grid loses nothing.

# %%
from fracnls.experiments import PRESETS, build_initial, precision_noise, preset

for name in sorted(PRESETS):
    print(f"{name:22s} {type(PRESETS[name].kind).__name__}")

# %%
data = build_initial(preset("noise_small", N=2048, L=256.0))
print("projection loss:", data.projection_loss)
noise = precision_noise(data.profiles[0].u0.v, 1e5)
print("max |noise|:", abs(noise).max())

# %% [markdown]
# The fractional-order perturbation keeps the profile but changes ``s``.

# %%
data = build_initial(preset("s_perturbation", N=2048, L=256.0))
print("integration order s =", data.model.s, " initial residual:", data.notes["initial_residual"])
