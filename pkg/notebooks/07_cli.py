# %% [markdown]
# # Command line
#
# ``fracnls run`` writes ``series.csv``, snapshots and ``manifest.txt``; the
# same entry point is callable from Python.

# %%
import tempfile
from pathlib import Path

from fracnls.cli import main
from fracnls.fileio import read_keyvalue, read_series

out = Path(tempfile.mkdtemp())
code = main(["--quiet", "--out", str(out), "run", "--preset", "small_amplitude",
             "--set", "run.N=256", "--set", "run.L=64", "--set", "run.T=2",
             "--set", "run.dt=0.01", "--set", "output.snapshot_times=0, 2"])
print("exit code", code, sorted(p.name for p in out.iterdir()))

# %%
series = read_series(out / "series.csv")
print("t:", series["t"])
print("I1:", series["I1"])
manifest = read_keyvalue(out / "manifest.txt")
print({k: manifest[k] for k in ("status", "steps", "coefficients.b1", "projection_loss")})
