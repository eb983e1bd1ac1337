#!/usr/bin/env python3
# Steady states of the nonlinear pipe-flow model for several flux exponents p.
#
# The stationary problem forces the flux mu(du/dx) to be constant, so every
# steady state is a straight line whose slope solves the scalar equation
#     2 mu(s) + alpha * L * s = alpha * (u_b - u_a).
# This script compares that closed form against the full nodal solve on the
# grid (they must agree to solver precision) and plots the profiles.
#
# Usage:  python3 demos/steady_profiles.py
# Output: demos/output/steady_profiles.png plus a table on stdout.

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dnflow import ConstitutiveModel, Grid, PowerBeta, steady_analytic, steady_discrete

ALPHA = 1.0
LENGTH = 1.0
DATA = (1.0, 2.0)
CELLS = 64
EXPONENTS = [1.2, 1.5, 1.8, 2.0]

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

grid = Grid(LENGTH, CELLS)
fig, ax = plt.subplots(figsize=(6.5, 4))

print(f"alpha={ALPHA}, L={LENGTH}, boundary data {DATA}")
print(f"{'p':>5} {'slope':>12} {'u(0)':>12} {'max |analytic - discrete|':>28}")
for p in EXPONENTS:
    model = ConstitutiveModel(PowerBeta(1.0, 2.0), p, 0.5, 2.0)
    hat = steady_analytic(model, ALPHA, LENGTH, *DATA, grid=grid)
    num = steady_discrete(grid, model, ALPHA, *DATA)
    gap = np.max(np.abs(hat.nodal - num.nodal))
    print(f"{p:5.2f} {hat.slope:12.8f} {hat.u_left:12.8f} {gap:28.3e}")
    ax.plot(grid.nodes, hat.nodal, label=f"p = {p:g}")

ax.set_xlabel("x")
ax.set_ylabel("steady state")
ax.set_title("Affine steady states; smaller p bends the Robin balance")
ax.legend()
fig.tight_layout()
path = out_dir / "steady_profiles.png"
fig.savefig(path, dpi=150)
print(f"\nwrote {path}")
