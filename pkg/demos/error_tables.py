#!/usr/bin/env python3

# Endpoint errors and observed orders for the three smooth benchmark problems.
# Euler is first order; both RBF variants pick eps2 each step from a backward
# difference of f and come out second order.

import numpy as np

from rbf_euler import ShapePolicy, convergence_study, get_problem

RUNS = [
    ("ex1", [10, 20, 40, 80, 160, 320]),
    ("ex2", [10, 20, 40, 80, 160, 320]),
    ("ex3", [200, 400, 800, 1600, 3200, 6400]),
]
policy = ShapePolicy.finite_difference()

for pid, Ns in RUNS:
    p = get_problem(pid)
    print(f"\n{pid}: u({p.t_end:g}) error, t in [{p.t_start:g}, {p.t_end:g}]")
    print(f"{'N':>6} | {'euler':>22} | {'imq':>22} | {'iq':>22}")
    reports = [convergence_study(p, s, policy, Ns) for s in ("euler", "imq", "iq")]
    for i, N in enumerate(Ns):
        cells = []
        for rep in reports:
            order = "" if i == 0 else f"({rep.orders[i - 1]:.3f})"
            cells.append(f"{rep.errors[i]:.6e} {order:>8}")
        print(f"{N:>6} | " + " | ".join(cells))
    for rep in reports:
        q = np.polyfit(np.log(Ns), np.log(rep.errors), 1)[0]
        print(f"  {rep.scheme.value:>5}: error = O(N^{q:.2f}) by least squares")

# ex3 is only resolved once h is small compared to the width of the bump at
# t = 0; the early orders are far from the asymptotic ones.
