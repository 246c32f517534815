"""Error tables, truncation residuals, the global error bound and stability scans."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problems import DerivativeUnavailableError, IvpProblem
from .steppers import SchemeKind, ShapePolicy, Trajectory, eps2_exact, integrate, step

__all__ = [
    "ConvergenceReport",
    "TruncationSample",
    "BoundCheck",
    "StabilityGrid",
    "global_error",
    "max_grid_error",
    "convergence_orders",
    "convergence_study",
    "fit_order",
    "truncation_residual",
    "verify_error_bound",
    "amplification_factor",
    "stability_scan",
    "format_number",
]


def format_number(x: float) -> str:
    """Fixed 15-significant-digit scientific notation ('' for nan)."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.14e}"


def _require_exact(problem: IvpProblem):
    if problem.exact is None:
        raise DerivativeUnavailableError(f"{problem.id}: no exact solution")


def global_error(traj: Trajectory, problem: IvpProblem) -> float:
    """Absolute endpoint error ``|u_N - u(t_end)|``."""
    _require_exact(problem)
    return abs(traj.final - problem.exact(problem.t_end))


def max_grid_error(traj: Trajectory, problem: IvpProblem) -> float:
    """``max_n |u_n - u(t_n)|`` over the whole grid."""
    _require_exact(problem)
    return max(abs(r.u - problem.exact(r.t)) for r in traj.records)


def convergence_orders(errors, N_list) -> list:
    """Empirical orders ``ln(e_i/e_{i+1}) / ln(N_{i+1}/N_i)``."""
    e = [float(x) for x in errors]
    n = [float(x) for x in N_list]
    if len(e) != len(n) or len(e) < 2:
        raise ValueError("errors and N_list need equal length >= 2")
    if any(not x > 0 for x in e):
        raise ValueError("errors must be positive")
    if any(b <= a for a, b in zip(n, n[1:])):
        raise ValueError("N_list must be strictly increasing")
    return [math.log(e[i] / e[i + 1]) / math.log(n[i + 1] / n[i]) for i in range(len(e) - 1)]


def fit_order(errors, N_list) -> float:
    """Least-squares slope of ``ln(error)`` against ``ln(N)``."""
    slope, _ = np.polyfit(np.log(np.asarray(N_list, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)


@dataclass
class ConvergenceReport:
    scheme: SchemeKind
    policy: ShapePolicy
    N_list: list
    errors: list
    orders: list = field(default_factory=list)

    def rows(self):
        """``(N, error, order)`` tuples; the first order is ``None``."""
        return [(N, e, None if i == 0 else self.orders[i - 1])
                for i, (N, e) in enumerate(zip(self.N_list, self.errors))]


def convergence_study(problem: IvpProblem, scheme, policy: Optional[ShapePolicy], N_list) -> ConvergenceReport:
    scheme = SchemeKind.parse(scheme)
    errors = [global_error(integrate(problem, scheme, policy, N), problem) for N in N_list]
    return ConvergenceReport(scheme, policy, list(N_list), errors, convergence_orders(errors, N_list))


@dataclass(frozen=True)
class TruncationSample:
    t_n: float
    h: float
    eps2: float
    tau: float
    leading_term: float


def truncation_residual(problem: IvpProblem, scheme, t_n: float, h: float, eps2: float) -> TruncationSample:
    """One-step defect of ``scheme`` on the exact solution, divided by ``h``.

    ``leading_term`` is the predicted O(h) part: ``h (u''/2 + u eps2/2)`` for
    IMQ-type schemes, ``h (u''/2 + u eps2)`` for IQ-type and ``h u''/2`` for
    Euler. It is ``nan`` when ``u''`` is not available.
    """
    scheme = SchemeKind.parse(scheme)
    _require_exact(problem)
    u = problem.exact(t_n)
    f = problem.rhs(t_n, u)
    tau = (problem.exact(t_n + h) - step(scheme, u, f, h, eps2)) / h
    if problem.supports_deriv(2):
        u2 = problem.deriv(t_n, 2)
        if scheme in (SchemeKind.IMQ, SchemeKind.IMQ_MOD):
            lead = h * (u2 / 2.0 + u * eps2 / 2.0)
        elif scheme in (SchemeKind.IQ, SchemeKind.IQ_MOD):
            lead = h * (u2 / 2.0 + u * eps2)
        elif scheme is SchemeKind.EULER:
            lead = h * u2 / 2.0
        else:
            lead = math.nan
    else:
        lead = math.nan
    return TruncationSample(t_n, h, eps2, tau, lead)


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    max_error: float
    bound: float
    tau_inf: float

    @property
    def ratio(self) -> float:
        """``max_error / bound`` (0 when both vanish)."""
        if self.bound == 0:
            return 0.0 if self.max_error == 0 else math.inf
        return self.max_error / self.bound

    def __bool__(self):
        return self.holds


def verify_error_bound(traj: Trajectory, problem: IvpProblem, L_f: float) -> BoundCheck:
    """Check ``max_n E_n <= exp(L_f T) T ||tau||_inf`` on a finished run.

    ``tau_n`` uses the shape parameter the run actually used at step ``n``.
    """
    _require_exact(problem)
    if L_f < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    T = problem.t_end - problem.t_start
    recs = traj.records
    max_err = max(abs(problem.exact(r.t) - r.u) for r in recs)
    tau_inf = 0.0
    for r in recs[:-1]:
        s = truncation_residual(problem, traj.scheme, r.t, traj.h, r.eps2)
        tau_inf = max(tau_inf, abs(s.tau))
    bound = math.exp(L_f * T) * T * tau_inf
    return BoundCheck(max_err <= bound, max_err, bound, tau_inf)


# -- stability --------------------------------------------------------------

def _test_equation_eps2(scheme: SchemeKind, z):
    # exact optimal eps2 on u' = lam u (u'' = lam^2 u), scaled by h^2 = 1
    if scheme is SchemeKind.EULER:
        return np.zeros_like(z)
    return eps2_exact(scheme.family, 1.0, z * z)


def amplification_factor(scheme, z):
    """Closed-form ``R(z)`` on ``u' = lam u`` with ``z = lam h`` and the exact optimal eps2."""
    scheme = SchemeKind.parse(scheme)
    z = np.asarray(z, dtype=complex)
    if scheme is SchemeKind.EULER:
        return 1.0 + z
    if scheme is SchemeKind.IMQ:
        s = 1.0 - z * z
        with np.errstate(divide="ignore", invalid="ignore"):
            return (s * z + 1.0) / np.sqrt(s)
    if scheme is SchemeKind.IQ:
        s = 1.0 - z * z / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            return (z * s * (1.0 + s) + 2.0) / (2.0 * s)
    raise ValueError("stability scan supports Euler, IMQ and IQ")


@dataclass
class StabilityGrid:
    """Boolean stability mask over ``re_range x im_range``.

    ``mask[i, j]`` refers to ``z = re[i] + 1j * im[j]``; ``undefined`` marks
    cells where the amplification factor does not exist (they are unstable).
    """

    scheme: SchemeKind
    re_range: tuple
    im_range: tuple
    nx: int
    ny: int
    mask: np.ndarray
    undefined: np.ndarray

    @property
    def re(self) -> np.ndarray:
        return np.linspace(self.re_range[0], self.re_range[1], self.nx)

    @property
    def im(self) -> np.ndarray:
        return np.linspace(self.im_range[0], self.im_range[1], self.ny)

    def z(self) -> np.ndarray:
        return self.re[:, None] + 1j * self.im[None, :]

    def cell_of(self, z: complex) -> tuple:
        """Index of the grid point nearest to ``z``."""
        i = int(np.argmin(np.abs(self.re - z.real)))
        j = int(np.argmin(np.abs(self.im - z.imag)))
        return i, j

    def contains(self, z: complex) -> bool:
        return bool(self.mask[self.cell_of(z)])

    def boundary(self) -> list:
        """Marching-squares contours of the mask as arrays of complex points."""
        from skimage import measure

        if self.mask.all() or not self.mask.any():
            return []
        out = []
        dx = (self.re_range[1] - self.re_range[0]) / (self.nx - 1)
        dy = (self.im_range[1] - self.im_range[0]) / (self.ny - 1)
        for c in measure.find_contours(self.mask.astype(float), 0.5):
            out.append(self.re_range[0] + c[:, 0] * dx + 1j * (self.im_range[0] + c[:, 1] * dy))
        return out

    def to_csv(self, fh=None) -> Optional[str]:
        """Write ``re,im,stable`` rows (real axis outer). Returns text when ``fh`` is None."""
        target = io.StringIO() if fh is None else fh
        w = csv.writer(target, lineterminator="\n")
        w.writerow(["re", "im", "stable"])
        re, im = self.re, self.im
        for i in range(self.nx):
            for j in range(self.ny):
                w.writerow([format_number(re[i]), format_number(im[j]), int(self.mask[i, j])])
        return target.getvalue() if fh is None else None


def stability_scan(scheme, re_range=(-4.0, 2.0), im_range=(-3.0, 3.0), nx=200, ny=200, n_iter=50) -> StabilityGrid:
    """Scan ``z = lam h`` over a rectangle for the test equation ``u' = lam u``.

    Each cell is iterated ``n_iter`` times with :func:`step` in complex
    arithmetic (``h = 1``, ``u_0 = 1``, eps2 from the exact optimal rule);
    it is stable iff every iterate stays within the unit disk.
    """
    scheme = SchemeKind.parse(scheme)
    if scheme not in (SchemeKind.EULER, SchemeKind.IMQ, SchemeKind.IQ):
        raise ValueError("stability scan supports Euler, IMQ and IQ")
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be at least 2")
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    re = np.linspace(re_range[0], re_range[1], nx)
    im = np.linspace(im_range[0], im_range[1], ny)
    z = re[:, None] + 1j * im[None, :]
    eps2 = _test_equation_eps2(scheme, z)
    # branch points / poles where 1 + eps2 h^2 vanishes
    undefined = np.abs(1.0 + eps2) < 1e-12
    u = np.ones_like(z)
    stable = ~undefined
    tol = 1e-12
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(n_iter):
            u = step(scheme, u, z * u, 1.0, eps2)
            mag = np.abs(u)
            stable &= np.isfinite(mag) & (mag <= 1.0 + tol)
            u = np.where(stable, u, 0.0)
    return StabilityGrid(scheme, tuple(re_range), tuple(im_range), nx, ny, stable, undefined)
