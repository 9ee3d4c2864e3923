"""Tour of the spectral substrate: grids, multipliers, phi functions.

Run:  python demos/01_phi_and_propagators.py
"""

import numpy as np

import duhamel as dh

# A 1-D periodic grid with 64 modes.  Coefficients live in the unitary FFT
# normalization, so Parseval is exact and Sobolev norms need no extra factor.
grid = dh.make_grid("torus", 1, 64)
print(f"grid: {grid}, frequencies {grid.mode_axes[0].min()}..{grid.mode_axes[0].max()}")

u = dh.rough_field(grid, gamma=1.0, seed=0, target_norm=1.0)
print(f"|u|_L2 = {dh.sobolev_norm(u, 0.0):.6f}, |u|_H1 = {dh.sobolev_norm(u, 1.0):.6f}")

# The NLS generator i*Lap is skew: its semigroup is unitary.
lsym = dh.symbol_for("i_laplacian", grid)
v = dh.propagate(lsym, 17.3, u)
print(f"unitary flow: |e^(tL)u| - |u| = {dh.sobolev_norm(v, 0) - dh.sobolev_norm(u, 0):+.2e}")

# The heat generator contracts.
heat = dh.symbol_for("laplacian", grid)
w = dh.propagate(heat, 1.0, u)
print(f"heat flow after t=1: |u| shrinks {dh.sobolev_norm(u,0):.4f} -> {dh.sobolev_norm(w,0):.4f}")

# The skew part A = -L + conj(L) carries the oscillations the integrators
# filter.  For i*Lap it equals -2i*Lap.
asym = dh.a_symbol(lsym)
k = np.where(grid.mode_axes[0] == 3)[0][0]
print(f"A-symbol at k=3: {asym.values[k]} (expect 2i*9)")

# phi1/phi2 interpolate between 1 (no oscillation) and decay ~1/|z|.
for z in (0.0, 0.5j, 5j, 50j):
    print(f"phi1({z!s:>5}) = {dh.phi1(z):.6f}   phi2({z!s:>5}) = {dh.phi2(z):.6f}")

# Applied as diagonal multipliers they damp exactly the modes whose
# oscillation the step cannot resolve.
tau = 0.25
filtered = dh.phi_apply(1, asym, tau, u)
ratio = np.abs(filtered.data) / np.maximum(np.abs(u.data), 1e-30)
print("per-mode phi1 damping, k=0..8:",
      np.array2string(ratio[:9], precision=3, separator=", "))
