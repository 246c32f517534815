#!/usr/bin/env python3

# Linear stability on u' = lam u with z = lam h. The shape parameter is the
# optimal one for this equation (eps2 h^2 = -z^2 for IMQ, -z^2/2 for IQ), so
# the update is a genuine function R(z). Print each region as a character map
# and write the masks as CSV for external plotting.

import sys

import numpy as np

from rbf_euler import stability_scan

outdir = sys.argv[1] if len(sys.argv) > 1 else None

for scheme in ("euler", "imq", "iq"):
    g = stability_scan(scheme, re_range=(-4.0, 2.0), im_range=(-3.0, 3.0), nx=61, ny=31)
    cell = (6.0 / 60) * (6.0 / 30)
    axis = g.mask[:, 15]  # im = 0
    i0 = int(np.argmin(np.abs(g.re + 0.1)))
    left = i0
    while left > 0 and axis[left - 1]:
        left -= 1
    print(f"\n{scheme}: {int(g.mask.sum())} stable cells, area ~ {g.mask.sum() * cell:.2f}"
          f", stable on the negative real axis down to z = {g.re[left]:.1f}")
    for j in range(g.ny - 1, -1, -1):
        line = "".join("#" if g.mask[i, j] else ("+" if abs(g.re[i]) < 1e-9 or abs(g.im[j]) < 1e-9 else ".")
                       for i in range(g.nx))
        print("  " + line)
    if outdir:
        hi = stability_scan(scheme)
        path = f"{outdir}/stability_{scheme}.csv"
        with open(path, "w", newline="") as fh:
            hi.to_csv(fh)
        pts = np.concatenate(hi.boundary())
        print(f"  wrote {path}; boundary has {len(pts)} points")

# Euler's region is the disk |1 + z| <= 1. The RBF regions are smaller along
# the negative real axis (IMQ stops near z = -0.74, IQ near z = -0.92) and have
# extra islands at Re z > 0, where the shape parameter makes the step contract
# even though the exact solution grows.
