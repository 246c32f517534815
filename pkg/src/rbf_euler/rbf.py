"""One-dimensional RBF kernels, interpolation and two-point derivative formulas.

Shape parameters enter every formula only through ``eps2 = epsilon**2``,
so negative values are legal parameters.
"""

from __future__ import annotations

import enum
import math

import numpy as np

__all__ = [
    "KernelFamily",
    "RbfDomainError",
    "InterpolationSolveError",
    "kernel_eval",
    "interpolation_matrix",
    "interpolate_general",
    "evaluate_interpolant",
    "two_point_weights",
    "left_derivative",
]

COND_LIMIT = 1e14


class KernelFamily(str, enum.Enum):
    IMQ = "imq"
    IQ = "iq"
    MQ = "mq"
    GAUSSIAN = "gaussian"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown kernel family {value!r}") from None


class RbfDomainError(ValueError):
    """A radicand or denominator left the admissible range."""


class InterpolationSolveError(np.linalg.LinAlgError):
    """The interpolation matrix is singular or too ill-conditioned."""


def _kernel(family, r, eps2):
    s = 1.0 + eps2 * r * r
    if family is KernelFamily.GAUSSIAN:
        return np.exp(-eps2 * r * r)
    if family is KernelFamily.IQ:
        if np.any(s == 0.0):
            raise RbfDomainError("IQ kernel denominator 1 + eps2 r^2 vanishes")
        return 1.0 / s
    if np.any(s <= 0.0):
        raise RbfDomainError("radicand 1 + eps2 r^2 must be positive")
    return 1.0 / np.sqrt(s) if family is KernelFamily.IMQ else np.sqrt(s)


def kernel_eval(family, r, eps2):
    """Evaluate ``phi(r; eps2)`` for the given family.

    IMQ ``1/sqrt(1+eps2 r^2)``, IQ ``1/(1+eps2 r^2)``, MQ ``sqrt(1+eps2 r^2)``,
    Gaussian ``exp(-eps2 r^2)``. Works on scalars or arrays.
    """
    out = _kernel(KernelFamily.parse(family), np.asarray(r, dtype=float), np.asarray(eps2, dtype=float))
    return float(out) if out.ndim == 0 else out


def interpolation_matrix(nodes, eps2_list, family, dtype=float):
    """Matrix ``A[i, k] = phi(|x_i - x_k|, eps2_k)``."""
    x = np.asarray(nodes, dtype=float).astype(dtype)
    eps2 = np.broadcast_to(np.asarray(eps2_list, dtype=float).astype(dtype), x.shape)
    r = np.abs(x[:, None] - x[None, :])
    return _kernel(KernelFamily.parse(family), r, eps2[None, :])


def interpolate_general(nodes, values, eps2_list, family):
    """Expansion coefficients of ``r(x) = sum_k lam_k phi(|x - x_k|, eps2_k)``.

    Parameters
    ----------
    nodes, values : array_like
        Distinct nodes ``x_k`` and data ``u_k`` (at most 64 of each).
    eps2_list : float or array_like
        Per-node squared shape parameter (a scalar is broadcast).
    family : KernelFamily or str

    Returns
    -------
    ndarray
        Coefficients ``lam``.

    Raises
    ------
    InterpolationSolveError
        If the condition number of the matrix exceeds ``1e14``.
    """
    x = np.atleast_1d(np.asarray(nodes, dtype=float))
    u = np.atleast_1d(np.asarray(values, dtype=float))
    if x.shape != u.shape:
        raise ValueError("nodes and values must have the same length")
    if x.size > 64:
        raise ValueError("dense solve limited to 64 nodes")
    if np.unique(x).size != x.size:
        raise ValueError("nodes must be distinct")
    A_ext = interpolation_matrix(x, eps2_list, family, dtype=np.longdouble)
    A = A_ext.astype(float)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise InterpolationSolveError(f"interpolation matrix condition {cond:.3e} exceeds {COND_LIMIT:g}")
    # mixed-precision iterative refinement: residuals against the extended matrix
    u_ext = u.astype(np.longdouble)
    lam = np.linalg.solve(A, u).astype(np.longdouble)
    for _ in range(3):
        resid = u_ext - A_ext @ lam
        lam = lam + np.linalg.solve(A, resid.astype(float))
    return lam.astype(float)


def evaluate_interpolant(x, nodes, coeffs, eps2_list, family):
    """Evaluate the RBF interpolant at ``x``."""
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    xk = np.asarray(nodes, dtype=float)
    eps2 = np.broadcast_to(np.asarray(eps2_list, dtype=float), xk.shape)
    phi = kernel_eval(family, np.abs(xq[:, None] - xk[None, :]), eps2[None, :])
    out = np.asarray(phi).reshape(xq.size, xk.size) @ np.asarray(coeffs, dtype=float)
    return float(out[0]) if np.ndim(x) == 0 else out


def _check_two_point(family, h, eps2):
    family = KernelFamily.parse(family)
    if family not in (KernelFamily.IMQ, KernelFamily.IQ):
        raise ValueError("two-point formulas are defined for IMQ and IQ only")
    if not h > 0:
        raise ValueError("h must be positive")
    s = 1.0 + eps2 * h * h
    if s <= 0.0:
        raise RbfDomainError(f"1 + eps2 h^2 = {s:g} must be positive")
    return family, s


def two_point_weights(family, u0, u1, h, eps2):
    """Coefficients ``(lam0, lam1)`` of the two-node interpolant on ``{0, h}``."""
    family, s = _check_two_point(family, h, eps2)
    x = eps2 * h * h
    # Algebraically identical to the textbook closed forms, but with the
    # divergent (u0 - u1)/x part split off so nothing cancels as x -> 0.
    d = u0 - u1
    if x == 0.0:
        div0 = 0.0 if d == 0.0 else math.copysign(math.inf, d)
    else:
        div0 = d / x
    div1 = -div0
    if family is KernelFamily.IMQ:
        rs = math.sqrt(s)
        g = 1.0 / (rs * (1.0 + rs))  # (1 - 1/sqrt(1+x)) / x
        return s * (div0 + u1 * g), s * (div1 + u0 * g)
    c = s / (2.0 + x)
    return c * (div0 + u0), c * (div1 + u1)


def left_derivative(family, u0, u1, h, eps2):
    """Derivative at the left node of the two-node interpolant.

    Reduces to the forward difference ``(u1 - u0)/h`` as ``eps2 -> 0``.
    """
    family, s = _check_two_point(family, h, eps2)
    if family is KernelFamily.IMQ:
        return (u1 * math.sqrt(s) - u0) / (s * h)
    return 2.0 * (u1 * s - u0) / (s * (2.0 + eps2 * h * h) * h)
