#!/usr/bin/env python3
# Self-convergence of the scheme under joint (h, tau) halving.
#
# The same gas relaxation problem is solved on three nested discretizations;
# coarse solutions are compared against the finest one restricted to the
# shared nodes and time points.  Errors must decrease monotonically.  The
# observed order is measured against a finite reference, which inflates it
# above the backward-Euler value of 1 (up to log2 3 for the last pair).
#
# Usage:  python3 demos/grid_time_refinement.py
# Output: demos/output/refinement.csv + a table on stdout.

from pathlib import Path

import numpy as np

from dnflow import ConstantSchedule, Grid, Scenario, gas_model, linear_model, run_convergence

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

for name, model in (("gas (p = 3/2)", gas_model()),
                    ("heat (p = 2, linear)", linear_model())):
    scenario = Scenario(Grid(1.0, 16), model, 1.0, 2.0, 2e-2,
                        np.ones(17), ConstantSchedule(1.0, 2.0))
    rep = run_convergence(scenario, levels=4, out_dir=out_dir,
                          name=f"refinement_{name.split()[0]}")
    print(name)
    print(f"  {'cells':>6} {'tau':>9} {'error':>12} {'order':>7}")
    for row in rep.table:
        order = "-" if row["order"] is None else f"{row['order']:.3f}"
        print(f"  {row['cells']:6d} {row['tau']:9.4g} {row['error']:12.4e} {order:>7}")
    print(f"  checks: {rep.checks}\n")
