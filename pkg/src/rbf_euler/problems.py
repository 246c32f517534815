"""Registry of scalar initial value problems with closed-form solutions.

Four benchmark problems are registered at import time (``ex1`` .. ``ex4``).
Further problems can be added with :func:`register_problem`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

__all__ = [
    "IvpProblem",
    "ProblemNotFoundError",
    "DerivativeUnavailableError",
    "get_problem",
    "register_problem",
    "problem_ids",
]


class ProblemNotFoundError(KeyError):
    """Raised when a problem id is not in the registry."""


class DerivativeUnavailableError(LookupError):
    """Raised when an exact derivative of the requested order is not known."""


@dataclass(frozen=True)
class IvpProblem:
    """Scalar IVP ``u' = rhs(t, u)`` on ``(t_start, t_end]`` with ``u(t_start) = u0``.

    Attributes
    ----------
    id : str
        Short identifier.
    rhs : callable
        Right-hand side ``rhs(t, u) -> float``.
    t_start, t_end : float
        Interval endpoints.
    u0 : float
        Initial value.
    exact : callable, optional
        True solution ``exact(t)``.
    exact_deriv : callable, optional
        ``exact_deriv(t, k)`` returns the k-th derivative of the true solution.
        Should raise :class:`DerivativeUnavailableError` for unsupported ``k``.
    max_deriv : int
        Highest order ``exact_deriv`` supports (0 when absent).
    """

    id: str
    rhs: Callable[[float, float], float]
    t_start: float
    t_end: float
    u0: float
    exact: Optional[Callable[[float], float]] = None
    exact_deriv: Optional[Callable[[float, int], float]] = None
    max_deriv: int = 0

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]")
        if self.exact is not None:
            mismatch = abs(self.exact(self.t_start) - self.u0)
            if mismatch > 4 * math.ulp(max(abs(self.u0), 1e-300)) + 1e-300:
                raise ValueError(f"exact(t_start) differs from u0 by {mismatch:g}")
        if self.exact_deriv is None:
            object.__setattr__(self, "max_deriv", 0)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def deriv(self, t: float, k: int) -> float:
        """k-th derivative of the exact solution at ``t`` (k = 0 is the solution)."""
        if k == 0:
            if self.exact is None:
                raise DerivativeUnavailableError(f"{self.id}: no exact solution")
            return self.exact(t)
        if self.exact_deriv is None or k > self.max_deriv:
            raise DerivativeUnavailableError(f"{self.id}: derivative of order {k} unavailable")
        return self.exact_deriv(t, k)

    def supports_deriv(self, k: int) -> bool:
        if k == 0:
            return self.exact is not None
        return self.exact_deriv is not None and k <= self.max_deriv


_REGISTRY: dict[str, IvpProblem] = {}


def register_problem(problem: IvpProblem, *, overwrite: bool = False) -> IvpProblem:
    if problem.id in _REGISTRY and not overwrite:
        raise ValueError(f"problem {problem.id!r} already registered")
    _REGISTRY[problem.id] = problem
    return problem


def get_problem(id: str) -> IvpProblem:
    try:
        return _REGISTRY[id]
    except KeyError:
        raise ProblemNotFoundError(
            f"unknown problem {id!r}; known: {', '.join(sorted(_REGISTRY))}"
        ) from None


def problem_ids() -> list[str]:
    return sorted(_REGISTRY)


# ex1: u' = -u^2, u = 1/(1+t)

def _ex1_deriv(t, k):
    if not 1 <= k <= 4:
        raise DerivativeUnavailableError(f"ex1: derivative of order {k} unavailable")
    return (-1) ** k * math.factorial(k) / (1.0 + t) ** (k + 1)


# ex2: u' = (2t^2 - u)/(t^2 u - t), u = 1/t + sqrt(1/t^2 + 4t - 4)

def _ex2_exact(t):
    return 1.0 / t + math.sqrt(1.0 / t**2 + 4.0 * t - 4.0)


def _ex2_deriv(t, k):
    q = 1.0 / t**2 + 4.0 * t - 4.0
    s = math.sqrt(q)
    dq = -2.0 / t**3 + 4.0
    if k == 1:
        return -1.0 / t**2 + dq / (2.0 * s)
    if k == 2:
        d2q = 6.0 / t**4
        return 2.0 / t**3 + d2q / (2.0 * s) - dq**2 / (4.0 * s**3)
    raise DerivativeUnavailableError(f"ex2: derivative of order {k} unavailable")


# ex3: u' = -4 t^3 u^2, u = 1/(t^4 + 1)

def _ex3_deriv(t, k):
    t4 = t**4
    d = t4 + 1.0
    if k == 1:
        return -4.0 * t**3 / d**2
    if k == 2:
        return 4.0 * t**2 * (5.0 * t4 - 3.0) / d**3
    if k == 3:
        return -24.0 * t * (5.0 * t4**2 - 10.0 * t4 + 1.0) / d**4
    if k == 4:
        return 24.0 * (35.0 * t4**3 - 155.0 * t4**2 + 65.0 * t4 - 1.0) / d**5
    raise DerivativeUnavailableError(f"ex3: derivative of order {k} unavailable")


# ex4: u' = u + 2, u = e^t - 2

def _ex4_deriv(t, k):
    if not 1 <= k <= 4:
        raise DerivativeUnavailableError(f"ex4: derivative of order {k} unavailable")
    return math.exp(t)


register_problem(IvpProblem(
    id="ex1",
    rhs=lambda t, u: -u * u,
    t_start=0.0, t_end=1.0, u0=1.0,
    exact=lambda t: 1.0 / (1.0 + t),
    exact_deriv=_ex1_deriv, max_deriv=4,
))

register_problem(IvpProblem(
    id="ex2",
    rhs=lambda t, u: (2.0 * t * t - u) / (t * t * u - t),
    t_start=1.0, t_end=2.0, u0=2.0,
    exact=_ex2_exact,
    exact_deriv=_ex2_deriv, max_deriv=2,
))

register_problem(IvpProblem(
    id="ex3",
    rhs=lambda t, u: -4.0 * t**3 * u * u,
    t_start=-10.0, t_end=0.0, u0=1.0 / 10001.0,
    exact=lambda t: 1.0 / (t**4 + 1.0),
    exact_deriv=_ex3_deriv, max_deriv=4,
))

register_problem(IvpProblem(
    id="ex4",
    rhs=lambda t, u: u + 2.0,
    t_start=0.0, t_end=1.0, u0=-1.0,
    exact=lambda t: math.exp(t) - 2.0,
    exact_deriv=_ex4_deriv, max_deriv=4,
))
