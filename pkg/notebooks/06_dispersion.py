# %% [markdown]
# # Linear dispersion of the tails
#
# In the frame moving with the wave, the linearized branches are
# ``omega_pm(k) = -c_s k pm |k|^(2s)``.  The group velocity decides which
# tail components lead the wave.

# %%
import numpy as np

from fracnls.dispersion import (
    DispersionParams,
    group_threshold,
    phase_threshold,
    report_csv,
    tail_direction_report,
)

p = DispersionParams(cs=0.25, s=0.8)
print("phase threshold k*:", phase_threshold(p))
print("group threshold:", group_threshold(p))

# %%
for row in tail_direction_report(p, np.array([0.02, 0.05, 0.1, 0.5, 1.0])):
    print(f"k {row['k']:<5} group+ {row['group_plus']:+.4f}  leads: {row['plus_leads']}")

# %%
print(report_csv(p, [0.0, 0.5, 1.0]))
