#!/usr/bin/env python3

# How the shape parameter controls the local error. On ex1 at t = 0.3 we take
# one step from the exact solution and measure tau = (u(t+h) - u_{n+1}) / h.
# eps2 = 0 is plain Euler (tau ~ h u''/2); the optimal eps2 cancels that term.

from rbf_euler import eps2_exact, eps2_fourth_order, eps2_third_order, get_problem, select_consistent_root
from rbf_euler import truncation_residual

p = get_problem("ex1")
t = 0.3
u, u1, u2, u3, u4 = (p.deriv(t, k) for k in range(5))

print(f"ex1 at t = {t}: u = {u:.6f}, u'' = {u2:.6f}")
print(f"{'h':>8} {'scheme':>6} {'eps2=0':>12} {'2nd order':>12} {'3rd order':>12}")
for h in (1e-1, 5e-2, 2.5e-2, 1.25e-2):
    for fam in ("imq", "iq"):
        e2 = eps2_exact(fam, u, u2)
        e3 = eps2_third_order(fam, u, u1, u2, u3, h)
        taus = [truncation_residual(p, fam, t, h, e).tau for e in (0.0, e2, e3)]
        print(f"{h:>8.4f} {fam:>6} " + " ".join(f"{x:12.3e}" for x in taus))

# Halving h divides the three columns by ~2, ~4 and ~8.

# Cancelling one more term gives a quadratic in eps2. One root tends to the
# second-order value; the other blows up like 1/h^2.
print("\nfourth-order roots at t = 0 (u = 1)")
d = [p.deriv(0.0, k) for k in range(5)]
for fam in ("imq", "iq"):
    for h in (1e-2, 1e-3, 1e-4):
        plus, minus = eps2_fourth_order(fam, *d, h)
        good = select_consistent_root((plus, minus), d[0])
        print(f"  {fam:>3} h={h:.0e}: consistent root {good:+.8f}, h^2 * other root {h * h * minus:.5f}")
