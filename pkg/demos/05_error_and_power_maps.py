"""Where the error lives, and where to put the next center.

Maps the controller error of an exact-feedback fit over the box: it is
smallest near the centers and largest away from them.  The power function
gives an a-priori picture of the same structure, so its maximizer is a
natural candidate when growing the center set greedily.

Run:  python demos/05_error_and_power_maps.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from kernelpi import power_function
from kernelpi.experiments import ExperimentConfig, error_map, greedy_rounds, power_map

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

cfg = ExperimentConfig(lengthscale=1.0)

# %% spatial controller error for the 9x9 exact-feedback fit
emap = error_map(cfg, n_per_dim=9)
print(f"mean error near centers (lowest distance decile): {emap.near_decile_mean:.3e}")
print(f"mean error far from centers (highest decile):     {emap.far_decile_mean:.3e}")

# %% power function and the greedy candidate
pmap = power_map(cfg, n_per_dim=9)
print(f"power-function maximum {pmap.max_power:.4f} at candidate {pmap.candidate}")

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, field, title in ((axes[0], emap.errors, "controller error"),
                         (axes[1], pmap.values, "power function")):
    m = ax.tricontourf(emap.points[:, 0], emap.points[:, 1], field, levels=30)
    ax.plot(*emap.centers.points.T, "w.", markersize=4)
    ax.set_title(title)
    fig.colorbar(m, ax=ax)
axes[1].plot(*pmap.candidate, "r*", markersize=12, label="greedy candidate")
axes[1].legend(loc="upper right")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "maps.png"), dpi=120)
print(f"wrote {OUT}/maps.png")

# %% greedy augmentation drives the worst-case indicator down
rounds, final = greedy_rounds(cfg, n_start=5, rounds=6)
probe = cfg.domain().grid(cfg.probe_n)
for r in rounds:
    print(f"round {r.round_index}: {r.n_centers} centers, "
          f"max power {r.max_power_before:.4f}, next center {np.round(r.candidate, 3)}")
print(f"after {len(rounds)} additions: max power "
      f"{power_function(cfg.kernel(), final, probe).max():.4f}")
