"""Shared oracles for the test suite."""

import mpmath as mp
import numpy as np

from rbf_euler.problems import get_problem
from rbf_euler.steppers import ShapePolicy, integrate

# Analytic df/du for the registered examples.
DFDU = {
    "ex1": lambda t, u: -2.0 * u,
    "ex2": lambda t, u: (t - 2.0 * t**4) / (t * t * u - t) ** 2,
    "ex3": lambda t, u: -8.0 * t**3 * u,
    "ex4": lambda t, u: np.ones_like(u),
}


def lipschitz_on_band(traj, samples=64, safety=1.01):
    """``max |df/du|`` over the band between the numerical and exact solutions."""
    p = get_problem(traj.problem_id)
    dfdu = DFDU[traj.problem_id]
    t = traj.t
    exact = np.array([p.exact(s) for s in t])
    lo, hi = np.minimum(traj.u, exact), np.maximum(traj.u, exact)
    w = np.linspace(0.0, 1.0, samples)
    band = lo[:, None] + (hi - lo)[:, None] * w[None, :]
    return safety * float(np.max(np.abs(dfdu(t[:, None], band))))


def run(pid, scheme, N, policy=None):
    p = get_problem(pid)
    return p, integrate(p, scheme, policy or ShapePolicy.finite_difference(), N)


def mp_two_point(family, u0, u1, h, eps2, dps=50):
    """Dense 2x2 interpolation solve in high precision (independent of the closed forms)."""
    with mp.workdps(dps):
        x = mp.mpf(eps2) * mp.mpf(h) ** 2
        off = 1 / mp.sqrt(1 + x) if family == "imq" else 1 / (1 + x)
        A = mp.matrix([[1, off], [off, 1]])
        lam = mp.lu_solve(A, mp.matrix([mp.mpf(u0), mp.mpf(u1)]))
        return float(lam[0]), float(lam[1])
