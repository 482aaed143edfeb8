# %% [markdown]
# # Solitary-wave profiles
#
# Profiles solve ``Lhat u = N(u)`` in Fourier space with the Petviashvili
# iteration.  Existence needs ``|lambda2| < c(lambda1)``.

# %%
from fracnls.grid import ModelParams, SpectralGrid
from fracnls.waves import (
    Inadmissible,
    QuadraticPhase,
    WaveParams,
    decay_fit,
    existence_bound,
    solve_profile,
)

print("c(1) at s = 0.8:", existence_bound(1.0, 0.8))
grid = SpectralGrid(512.0, 4096)
prof = solve_profile(WaveParams(ModelParams(0.8), 1.0, 0.25, phase=QuadraticPhase()), grid)
print(f"residual {prof.residual:.2e}, rho_max {prof.amplitude:.5f}, {prof.iterations} iterations")

# %% [markdown]
# The fractional profile decays algebraically, like ``|x|^-(2s+1)``.

# %%
fit = decay_fit(prof, (40.0, 200.0))
print(f"tail exponent {fit.exponent:.3f} (expected {-(2 * 0.8 + 1):.1f}), algebraic: {fit.algebraic}")

# %%
try:
    WaveParams(ModelParams(0.8), 1.0, 2.5).check_admissible()
except Inadmissible as exc:
    print("rejected:", exc)
