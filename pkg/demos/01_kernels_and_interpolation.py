"""Kernels, interpolation, and the power function.

Walks through the basic scattered-data machinery: evaluate a kernel and its
analytic gradient, interpolate a smooth target from grid samples, and map the
power function, which predicts where interpolation is least trustworthy.

Run from the repository root:  python demos/01_kernels_and_interpolation.py
Figures land in demos/output/.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from kernelpi import (
    Kernel,
    grad_x,
    gram,
    grid_centers,
    interpolate,
    kernel_eval,
    power_function,
    unit_box,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# %% kernel values and gradients
k = Kernel("matern52", lengthscale=0.5)
x, y = np.array([0.3, -0.2]), np.array([-0.1, 0.4])
print(f"k(x, y)        = {kernel_eval(k, x, y):.6f}")
print(f"grad_x k(x, y) = {grad_x(k, x, y)}")

# central differences agree with the closed form to ~1e-9 relative
step = 1e-5
fd = np.array([
    (kernel_eval(k, x + [step, 0], y) - kernel_eval(k, x - [step, 0], y)) / (2 * step),
    (kernel_eval(k, x + [0, step], y) - kernel_eval(k, x - [0, step], y)) / (2 * step),
])
print(f"finite-diff    = {fd}   (max diff {np.abs(fd - grad_x(k, x, y)).max():.2e})")

# %% interpolate a smooth target from grid samples
box = unit_box(2)
target = lambda X: np.sin(2 * X[:, 0]) * np.exp(-X[:, 1])
probe = box.grid(101)

for n in (5, 7, 9):
    centers = grid_centers(box, n)
    s = interpolate(k, centers, target(centers.points))
    err = np.abs(s.value(probe) - target(probe)).max()
    print(f"interpolation with {n}x{n} centers: sup error = {err:.3e}")

# %% the power function bounds interpolation error per unit norm
centers = grid_centers(box, 5)
power = power_function(k, centers, probe)
print(f"power function: 0 at centers (max {power_function(k, centers, centers.points).max():.1e}), "
      f"peak {power.max():.3f} between them")

fig, ax = plt.subplots(figsize=(5, 4))
m = ax.tricontourf(probe[:, 0], probe[:, 1], power, levels=30)
ax.plot(*centers.points.T, "wx", markersize=6)
ax.set_title("power function, 5x5 centers")
fig.colorbar(m, ax=ax)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "power_function.png"), dpi=120)
print(f"wrote {OUT}/power_function.png")

# %% Gram matrices stay positive semidefinite for any point set
rng = np.random.default_rng(0)
X = rng.uniform(-1, 1, (40, 2))
print(f"min Gram eigenvalue over 40 random points: {np.linalg.eigvalsh(gram(k, X, X))[0]:.2e}")
