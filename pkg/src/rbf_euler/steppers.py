"""One-step RBF Euler schemes, shape-parameter rules and the integration loop.

Every scheme advances ``u_n -> u_{n+1}`` from ``u_n``, ``f_n = f(t_n, u_n)``,
the step ``h`` and a per-step squared shape parameter ``eps2``. With
``eps2 = 0`` every scheme is the forward Euler step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .problems import IvpProblem
from .rbf import KernelFamily, RbfDomainError

__all__ = [
    "SchemeKind",
    "StepFlag",
    "LRule",
    "Threshold",
    "ShapePolicy",
    "StepRecord",
    "Trajectory",
    "IntegrationError",
    "step",
    "eps2_exact",
    "eps2_fd",
    "eps2_third_order",
    "eps2_fourth_order",
    "select_consistent_root",
    "integrate",
    "CLAMP_TOL",
]

CLAMP_TOL = 1e-12


class SchemeKind(str, enum.Enum):
    EULER = "euler"
    MQ = "mq"
    GAUSSIAN = "gaussian"
    IMQ = "imq"
    IMQ_MOD = "imqmod"
    IQ = "iq"
    IQ_MOD = "iqmod"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "").replace("_", "")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown scheme {value!r}")

    @property
    def family(self) -> Optional[KernelFamily]:
        """Kernel family that selects the shape-parameter rule (None for Euler)."""
        return _FAMILY[self]


_FAMILY = {
    SchemeKind.EULER: None,
    SchemeKind.MQ: KernelFamily.MQ,
    SchemeKind.GAUSSIAN: KernelFamily.GAUSSIAN,
    SchemeKind.IMQ: KernelFamily.IMQ,
    SchemeKind.IMQ_MOD: KernelFamily.IMQ,
    SchemeKind.IQ: KernelFamily.IQ,
    SchemeKind.IQ_MOD: KernelFamily.IQ,
}


class StepFlag(str, enum.Enum):
    NORMAL = "normal"
    BOOTSTRAP = "bootstrap"
    GUARD = "guard-triggered"
    CLAMPED = "clamped"


class LRule(str, enum.Enum):
    """Fallback magnitude ``L`` of the threshold guard, resolved from ``h``."""

    ZERO = "zero"
    INV_H = "inv-h"
    INV_SQRT_H = "inv-sqrt-h"

    def resolve(self, h: float) -> float:
        if self is LRule.ZERO:
            return 0.0
        if self is LRule.INV_H:
            return 1.0 / h
        return h ** -0.5


@dataclass(frozen=True)
class Threshold:
    """Guard: when ``|u_n| <= h**p`` use ``sgn(...) * L`` instead of the quotient."""

    p: float = 1.0
    L: Union[float, LRule] = 0.0

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("threshold exponent p must be nonnegative")
        if not isinstance(self.L, LRule) and not (0.0 <= self.L < math.inf):
            raise ValueError("threshold magnitude L must be finite and nonnegative")

    def magnitude(self, h: float) -> float:
        return self.L.resolve(h) if isinstance(self.L, LRule) else float(self.L)


@dataclass(frozen=True)
class ShapePolicy:
    """How ``eps2`` is chosen at each step.

    ``mode`` is one of ``"fixed"`` (constant ``eps2``), ``"exact"`` (C1 rule
    with the exact second derivative) or ``"fd"`` (backward difference of
    ``f``). ``guard`` is ``None`` (no condition) or a :class:`Threshold`.

    ``bootstrap`` picks ``eps2`` for the first finite-difference step, where
    ``f_{n-1}`` does not exist: ``"forward"`` differences ``f`` along one
    Euler predictor step, ``"zero"`` takes a plain Euler step, ``"exact"``
    uses the C1 rule (needs the exact second derivative).
    """

    mode: str = "fd"
    eps2: float = 0.0
    guard: Optional[Threshold] = None
    bootstrap: str = "forward"

    def __post_init__(self):
        if self.mode not in ("fixed", "exact", "fd"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.bootstrap not in ("forward", "zero", "exact"):
            raise ValueError(f"unknown bootstrap {self.bootstrap!r}")
        if not math.isfinite(self.eps2):
            raise ValueError("eps2 must be finite")

    @classmethod
    def fixed(cls, eps2: float) -> "ShapePolicy":
        return cls(mode="fixed", eps2=eps2)

    @classmethod
    def exact_c1(cls) -> "ShapePolicy":
        return cls(mode="exact")

    @classmethod
    def finite_difference(cls, guard: Optional[Threshold] = None, bootstrap: str = "forward") -> "ShapePolicy":
        return cls(mode="fd", guard=guard, bootstrap=bootstrap)

    def describe(self) -> str:
        if self.mode == "fixed":
            return f"fixed({self.eps2:g})"
        if self.mode == "exact":
            return "exact-c1"
        if self.guard is None:
            return "fd-nc"
        L = self.guard.L.value if isinstance(self.guard.L, LRule) else f"{self.guard.L:g}"
        return f"fd-threshold(p={self.guard.p:g},L={L})"


@dataclass(frozen=True)
class StepRecord:
    t: float
    u: float
    eps2: float
    flag: StepFlag = StepFlag.NORMAL


@dataclass
class Trajectory:
    """Grid values of one integration run.

    ``records[n].eps2`` is the shape parameter used to go from ``t_n`` to
    ``t_{n+1}``; the final record carries ``nan``.
    """

    problem_id: str
    scheme: SchemeKind
    policy: ShapePolicy
    N: int
    h: float
    records: list = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def u(self) -> np.ndarray:
        return np.array([r.u for r in self.records])

    @property
    def eps2(self) -> np.ndarray:
        return np.array([r.eps2 for r in self.records])

    @property
    def flags(self) -> list:
        return [r.flag for r in self.records]

    @property
    def final(self) -> float:
        return self.records[-1].u


class IntegrationError(RuntimeError):
    """Integration aborted: a non-finite value or an arithmetic failure."""

    def __init__(self, message, step_index, t):
        super().__init__(f"{message} at step {step_index} (t={t:.15g})")
        self.step_index = step_index
        self.t = t


def _is_complex(*xs):
    return any(isinstance(x, complex) or np.iscomplexobj(x) for x in xs)


def step(scheme, u_n, f_n, h, eps2):
    """Advance one step.

    Accepts real scalars, or complex scalars/arrays (principal square root),
    which is what the stability scan feeds in.

    Raises
    ------
    RbfDomainError
        Real IMQ radicand ``1 + eps2 h^2 <= 0`` or IQ denominator equal to 0.
    """
    scheme = SchemeKind.parse(scheme)
    hf = h * f_n
    if scheme is SchemeKind.EULER:
        return u_n + hf
    x = eps2 * h * h
    cplx = _is_complex(u_n, f_n, eps2)
    if scheme is SchemeKind.MQ:
        return (1.0 + x / 2.0) * (u_n + hf)
    if scheme is SchemeKind.GAUSSIAN:
        return u_n * (np.exp(-x) if cplx else math.exp(-x)) + hf
    s = 1.0 + x
    if scheme is SchemeKind.IMQ:
        if cplx:
            return (s * hf + u_n) / np.sqrt(s)
        if s <= 0.0:
            raise RbfDomainError(f"IMQ radicand 1 + eps2 h^2 = {s:g} is not positive")
        return (s * hf + u_n) / math.sqrt(s)
    if scheme is SchemeKind.IMQ_MOD:
        return (1.0 - x / 2.0) * (s * hf + u_n)
    if scheme is SchemeKind.IQ:
        if not cplx and s == 0.0:
            raise RbfDomainError("IQ denominator 1 + eps2 h^2 vanishes")
        return (h * s * (2.0 + x) * f_n + 2.0 * u_n) / (2.0 * s)
    # IQ_MOD
    return (1.0 - x) * (h * s * (2.0 + x) * f_n + 2.0 * u_n) / 2.0


def _family(family) -> KernelFamily:
    if isinstance(family, SchemeKind):
        fam = family.family
        if fam is None:
            raise ValueError("Euler has no shape parameter")
        return fam
    return KernelFamily.parse(family)


def _half(fam: KernelFamily) -> bool:
    # IQ and Gaussian divide by 2 h u_n, IMQ and MQ by h u_n
    return fam in (KernelFamily.IQ, KernelFamily.GAUSSIAN)


def eps2_exact(family, u_n, u2_n):
    """Optimal ``eps2`` for second order from the exact ``u''`` (C1 rule)."""
    fam = _family(family)
    if u_n == 0:
        return 0.0
    if fam is KernelFamily.MQ:
        return u2_n / u_n
    if _half(fam):
        return -u2_n / (2.0 * u_n)
    return -u2_n / u_n


def _sgn(x):
    return (x > 0) - (x < 0)


def eps2_fd(family, u_n, f_n, f_prev, h, guard=None):
    """Optimal ``eps2`` with ``u''`` replaced by ``(f_n - f_prev)/h``.

    Returns ``(eps2, flag)``. ``guard=None`` is the unguarded rule (an exact
    zero ``u_n`` still falls back to 0). A :class:`Threshold` guard returns
    ``sgn(df * h * u_n) * L`` (``2h`` for IQ/Gaussian) when ``|u_n| <= h**p``.
    """
    fam = _family(family)
    if not h > 0:
        raise ValueError("h must be positive")
    df = f_n - f_prev
    scale = 2.0 * h if _half(fam) else h
    if guard is not None:
        if abs(u_n) <= h ** guard.p:
            return _sgn(df * scale * u_n) * guard.magnitude(h), StepFlag.GUARD
    elif u_n == 0:
        return 0.0, StepFlag.GUARD
    q = df / (scale * u_n)
    return (q if fam is KernelFamily.MQ else -q), StepFlag.NORMAL


def eps2_third_order(family, u, u1, u2, u3, h):
    """``eps2`` cancelling the two leading truncation terms (IMQ or IQ)."""
    fam = _family(family)
    if fam is KernelFamily.IMQ:
        den = 3.0 * (u + h * u1)
        if den == 0:
            raise RbfDomainError("third-order denominator 3(u + h u') vanishes")
        return -(3.0 * u2 + h * u3) / den
    if fam is KernelFamily.IQ:
        den = u - h * u2 / 2.0
        if den == 0:
            raise RbfDomainError("third-order denominator u - h u''/2 vanishes")
        return -(u2 / 2.0 + h * u3 / 6.0) / den
    raise ValueError("third-order rule defined for IMQ and IQ only")


def eps2_fourth_order(family, u, u1, u2, u3, u4, h):
    """Both roots of the quadratic in ``eps2`` cancelling three truncation terms.

    Returns ``(root_plus, root_minus)``; ``root_plus`` takes the negative
    square root, so it is the consistent choice for ``u > 0``.
    """
    fam = _family(family)
    if not h > 0:
        raise ValueError("h must be positive")
    if u == 0:
        raise RbfDomainError("fourth-order rule needs u != 0")
    if fam is KernelFamily.IMQ:
        b = 6.0 * (u + h * u1)
        disc = 36.0 * (u + h * u1) ** 2 + 9.0 * h * h * u * (12.0 * u2 + 4.0 * h * u3 + h * h * u4)
        den = 9.0 * h * h * u
    elif fam is KernelFamily.IQ:
        b = u - h * u1 / 2.0
        disc = b * b + 4.0 * (h * h * u) * (u2 / 2.0 + h * u3 / 6.0 + h * h * u4 / 24.0)
        den = 2.0 * h * h * u
    else:
        raise ValueError("fourth-order rule defined for IMQ and IQ only")
    if disc < 0:
        raise RbfDomainError(f"negative discriminant {disc:g}: complex shape parameters")
    root = math.sqrt(disc)
    return (b - root) / den, (b + root) / den


def select_consistent_root(roots, u_n):
    """Pick the root whose ``h -> 0`` limit keeps the scheme consistent."""
    if u_n == 0:
        raise RbfDomainError("no consistency rule for u_n = 0")
    plus, minus = roots
    return plus if u_n > 0 else minus


def _clamp_needed(scheme, eps2, h):
    s = 1.0 + eps2 * h * h
    if scheme is SchemeKind.IMQ:
        return s <= CLAMP_TOL
    if scheme is SchemeKind.IQ:
        return abs(s) <= CLAMP_TOL
    return False


def _second_derivative(problem: IvpProblem, t: float) -> float:
    return problem.deriv(t, 2)


def integrate(problem: IvpProblem, scheme, policy: Optional[ShapePolicy], N: int) -> Trajectory:
    """Integrate ``problem`` on a uniform grid of ``N`` steps.

    Raises
    ------
    IntegrationError
        If the right-hand side or the new state is not finite.
    """
    scheme = SchemeKind.parse(scheme)
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    if policy is None:
        policy = ShapePolicy.finite_difference()
    fam = scheme.family
    if fam is not None:
        if policy.mode == "exact" or (policy.mode == "fd" and policy.bootstrap == "exact"):
            if not problem.supports_deriv(2):
                raise ValueError(f"{problem.id}: exact policy needs the exact second derivative")

    a, b = problem.t_start, problem.t_end
    h = (b - a) / N
    rhs = problem.rhs
    u = float(problem.u0)
    f_prev = None
    records = []
    for n in range(N):
        t = a + n * h
        try:
            f = rhs(t, u)
        except ArithmeticError as exc:
            raise IntegrationError(f"right-hand side failed ({exc})", n, t) from exc
        if not math.isfinite(f):
            raise IntegrationError("right-hand side is not finite", n, t)
        flag = StepFlag.NORMAL
        if fam is None:
            e = 0.0
        elif policy.mode == "fixed":
            e = policy.eps2
        elif policy.mode == "exact":
            e = eps2_exact(fam, u, _second_derivative(problem, t))
        elif f_prev is None:
            flag = StepFlag.BOOTSTRAP
            if policy.bootstrap == "zero":
                e = 0.0
            elif policy.bootstrap == "exact":
                e = eps2_exact(fam, u, _second_derivative(problem, t))
            else:
                try:
                    f_next = rhs(t + h, u + h * f)
                except ArithmeticError:
                    f_next = math.nan
                if u == 0 or not math.isfinite(f_next):
                    e = 0.0
                else:
                    e, _ = eps2_fd(fam, u, f_next, f, h, None)
        else:
            e, flag = eps2_fd(fam, u, f, f_prev, h, policy.guard)
        if _clamp_needed(scheme, e, h):
            e, flag = 0.0, StepFlag.CLAMPED
        records.append(StepRecord(t, u, e, flag))
        try:
            u_new = step(scheme, u, f, h, e)
        except (ArithmeticError, RbfDomainError) as exc:
            raise IntegrationError(f"step failed ({exc})", n + 1, t + h) from exc
        if not math.isfinite(u_new):
            raise IntegrationError("state is not finite", n + 1, t + h)
        u = u_new
        f_prev = f
    records.append(StepRecord(a + N * h, u, math.nan, StepFlag.NORMAL))
    return Trajectory(problem.id, scheme, policy, N, h, records)
