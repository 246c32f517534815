#!/usr/bin/env python3

# The solution of ex4 (u = e^t - 2) crosses zero at t = ln 2, where the
# finite-difference rule eps2 = -(f_n - f_{n-1}) / (h u_n) divides by a tiny
# number. Compare the unguarded rule with threshold guards |u_n| <= h^p that
# substitute sgn(...) * L for L = 0, 1/h and 1/sqrt(h).

import math

from rbf_euler import LRule, ShapePolicy, StepFlag, Threshold, fit_order, get_problem, global_error, integrate

p = get_problem("ex4")
Ns = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000]
guards = [
    ("no guard", None),
    ("L = 0", Threshold(1.0, LRule.ZERO)),
    ("L = 1/h", Threshold(1.0, LRule.INV_H)),
    ("L = 1/sqrt(h)", Threshold(1.0, LRule.INV_SQRT_H)),
]

for scheme in ("imq", "iq"):
    print(f"\n{scheme}: error at t = 1")
    print(f"{'N':>6} " + "".join(f"{name:>16}" for name, _ in guards))
    table = {name: [] for name, _ in guards}
    for N in Ns:
        row = []
        for name, guard in guards:
            e = global_error(integrate(p, scheme, ShapePolicy.finite_difference(guard), N), p)
            table[name].append(e)
            row.append(f"{e:16.3e}")
        print(f"{N:>6} " + "".join(row))
    big = [i for i, N in enumerate(Ns) if N >= 100]
    print("slope N>=100 " + "".join(f"{fit_order([table[n][i] for i in big], [Ns[i] for i in big]):16.2f}" for n, _ in guards))

# Where does the guard fire?
traj = integrate(p, "iq", ShapePolicy.finite_difference(Threshold(1.0, LRule.INV_SQRT_H)), 200)
fired = [(r.t, r.u, r.eps2) for r in traj.records if r.flag is StepFlag.GUARD]
print(f"\niq, N=200, L=1/sqrt(h): guard fired at {len(fired)} step(s), root at t = {math.log(2):.5f}")
for t, u, e in fired:
    print(f"  t = {t:.5f}  u_n = {u:+.3e}  eps2 = {e:+.4f}")

# The first step has no f_{n-1}; the bootstrap choice moves the whole error
# curve on ex1 by a constant factor without changing the order.
q = get_problem("ex1")
print("\nex1 imq, bootstrap choices")
for boot in ("forward", "zero", "exact"):
    errs = [global_error(integrate(q, "imq", ShapePolicy.finite_difference(bootstrap=boot), N), q) for N in (10, 20, 320)]
    print(f"  {boot:>8}: " + "  ".join(f"{e:.4e}" for e in errs))
