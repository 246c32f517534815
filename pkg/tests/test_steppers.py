import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbf_euler.problems import IvpProblem, get_problem
from rbf_euler.rbf import RbfDomainError
from rbf_euler.steppers import (
    IntegrationError,
    LRule,
    SchemeKind,
    ShapePolicy,
    StepFlag,
    Threshold,
    eps2_exact,
    eps2_fd,
    eps2_fourth_order,
    eps2_third_order,
    integrate,
    select_consistent_root,
    step,
)

mp.mp.dps = 40

ALL_SCHEMES = list(SchemeKind)
# ex1 exact derivatives at t = 0: u = 1/(1+t)
EX1_T0 = dict(u=1.0, u1=-1.0, u2=2.0, u3=-6.0, u4=24.0)


def _mp_step(scheme, u, f, h, eps2):
    """Update formulas evaluated in 40-digit arithmetic."""
    u, f, h, e = (mp.mpf(v) for v in (u, f, h, eps2))
    x = e * h * h
    s = 1 + x
    return float({
        SchemeKind.EULER: lambda: u + h * f,
        SchemeKind.MQ: lambda: (1 + x / 2) * (u + h * f),
        SchemeKind.GAUSSIAN: lambda: u * mp.exp(-x) + h * f,
        SchemeKind.IMQ: lambda: (s * h * f + u) / mp.sqrt(s),
        SchemeKind.IMQ_MOD: lambda: (1 - x / 2) * (s * h * f + u),
        SchemeKind.IQ: lambda: (h * s * (2 + x) * f + 2 * u) / (2 * s),
        SchemeKind.IQ_MOD: lambda: (1 - x) * (h * s * (2 + x) * f + 2 * u) / 2,
    }[scheme]())


def _const_problem(c=0.7):
    return IvpProblem("const", lambda t, u: 0.0, 0.0, 1.0, c, exact=lambda t: c)


class TestStep:
    def test_euler(self):
        assert step("euler", 1.0, -1.0, 0.1, 123.0) == pytest.approx(0.9, abs=1e-15)

    def test_imq_zero_shape_is_euler(self):
        assert step("imq", 1.0, -1.0, 0.1, 0.0) == step("euler", 1.0, -1.0, 0.1, 0.0)

    def test_imq_negative_shape(self):
        got = step("imq", 1.0, -1.0, 0.1, -2.0)
        ref = (1 - mp.mpf("0.098")) / mp.sqrt(mp.mpf("0.98"))
        assert got == pytest.approx(float(ref), rel=1e-14)
        assert got == pytest.approx(0.91115759518609, abs=1e-13)

    @pytest.mark.parametrize("scheme", ALL_SCHEMES)
    def test_matches_high_precision(self, scheme):
        rng = np.random.default_rng(7)
        for _ in range(50):
            u, f = rng.uniform(-2, 2, 2)
            h = rng.uniform(1e-3, 0.5)
            eps2 = rng.uniform(-0.5, 0.5) / (h * h)
            assert step(scheme, u, f, h, eps2) == pytest.approx(_mp_step(scheme, u, f, h, eps2), rel=1e-12, abs=1e-14)

    def test_domain_errors(self):
        with pytest.raises(RbfDomainError):
            step("imq", 1.0, 1.0, 0.5, -4.0)
        with pytest.raises(RbfDomainError):
            step("iq", 1.0, 1.0, 0.5, -4.0)

    def test_complex_input(self):
        z = np.array([-0.1 + 0.2j, 0.3j])
        out = step("imq", np.ones(2, complex), z, 1.0, -z * z)
        np.testing.assert_allclose(out, ((1 - z * z) * z + 1) / np.sqrt(1 - z * z))

    @settings(max_examples=1000, deadline=None)
    @given(
        u=st.floats(-1e6, 1e6),
        f=st.floats(-1e6, 1e6),
        h=st.floats(1e-6, 1.0),
        scheme=st.sampled_from(ALL_SCHEMES),
    )
    def test_zero_shape_reduces_to_euler(self, u, f, h, scheme):
        got = step(scheme, u, f, h, 0.0)
        ref = step(SchemeKind.EULER, u, f, h, 0.0)
        assert abs(got - ref) <= 2 * np.spacing(abs(ref)) if ref != 0 else got == 0

    @settings(max_examples=300, deadline=None)
    @given(
        u=st.floats(-10, 10, allow_subnormal=False),
        f=st.floats(-10, 10, allow_subnormal=False),
        h=st.floats(1e-3, 1.0),
        x=st.floats(-0.5, 0.5),
    )
    def test_modified_imq_close_to_imq(self, u, f, h, x):
        eps2 = x / (h * h)
        diff = abs(step("imq", u, f, h, eps2) - step("imqmod", u, f, h, eps2))
        assert diff <= 1.5 * h**4 * (abs(u) + h * abs(f)) * eps2**2 + 1e-13 * (abs(u) + abs(f))

    def test_modified_imq_gap_is_fourth_order(self):
        u, f, eps2 = 1.0, -1.0, -2.0
        gaps = [abs(step("imq", u, f, h, eps2) - step("imqmod", u, f, h, eps2)) for h in (0.1, 0.05)]
        assert gaps[0] / gaps[1] == pytest.approx(16.0, rel=0.05)


class TestShapeRules:
    def test_exact(self):
        assert eps2_exact("imq", 0.0, 5.0) == 0.0
        assert eps2_exact("imq", 1.0, 2.0) == -2.0
        assert eps2_exact("iq", 1.0, 2.0) == -1.0
        assert eps2_exact("mq", 1.0, 2.0) == 2.0
        assert eps2_exact("gaussian", 1.0, 2.0) == -1.0

    def test_fd_examples(self):
        assert eps2_fd("imq", 1.0, 0.5, 0.5, 0.1) == (0.0, StepFlag.NORMAL)
        assert eps2_fd("imq", 0.05, 1.0, 0.9, 0.1, Threshold(1, 0.0)) == (0.0, StepFlag.GUARD)
        e, flag = eps2_fd("iq", 1.0, 1.2, 1.0, 0.1)
        assert e == pytest.approx(-1.0, rel=1e-14) and flag is StepFlag.NORMAL

    def test_fd_signs_by_family(self):
        assert eps2_fd("mq", 2.0, 1.0, 0.0, 0.5)[0] == pytest.approx(1.0)
        assert eps2_fd("imq", 2.0, 1.0, 0.0, 0.5)[0] == pytest.approx(-1.0)
        assert eps2_fd("gaussian", 2.0, 1.0, 0.0, 0.5)[0] == pytest.approx(-0.5)

    def test_threshold_guard_value_is_signed_L(self):
        h = 0.01
        for L, mag in ((LRule.ZERO, 0.0), (LRule.INV_H, 100.0), (LRule.INV_SQRT_H, 10.0), (3.0, 3.0)):
            e, flag = eps2_fd("imq", 0.005, 2.0, 1.0, h, Threshold(1, L))
            assert flag is StepFlag.GUARD and e == pytest.approx(mag)
            e, _ = eps2_fd("iq", -0.005, 2.0, 1.0, h, Threshold(1, L))
            assert e == pytest.approx(-mag) if mag else e == 0.0
        # sgn(0) = 0
        assert eps2_fd("imq", 0.0, 1.0, 1.0, h, Threshold(1, LRule.INV_H)) == (0.0, StepFlag.GUARD)

    def test_threshold_outside_band_uses_quotient(self):
        assert eps2_fd("imq", 0.5, 1.0, 0.9, 0.1, Threshold(1, 7.0))[1] is StepFlag.NORMAL

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            Threshold(-1.0, 0.0)
        with pytest.raises(ValueError):
            Threshold(1.0, -1.0)
        with pytest.raises(ValueError):
            Threshold(1.0, math.inf)

    @settings(max_examples=500, deadline=None)
    @given(
        u=st.one_of(st.just(0.0), st.floats(-1e3, 1e3)),
        f=st.floats(-1e3, 1e3),
        fp=st.floats(-1e3, 1e3),
        h=st.floats(1e-4, 1.0),
        p=st.floats(0.0, 3.0),
        L=st.one_of(st.sampled_from(list(LRule)), st.floats(0.0, 1e3)),
        family=st.sampled_from(["imq", "iq", "mq", "gaussian"]),
    )
    def test_guard_totality(self, u, f, fp, h, p, L, family):
        guard = Threshold(p, L)
        e, flag = eps2_fd(family, u, f, fp, h, guard)
        assert math.isfinite(e)
        if abs(u) <= h**p:
            assert flag is StepFlag.GUARD and abs(e) == (guard.magnitude(h) if e else 0.0)
        if u == 0.0:
            assert eps2_fd(family, u, f, fp, h, None) == (0.0, StepFlag.GUARD)

    def test_third_order(self):
        d = EX1_T0
        assert eps2_third_order("imq", d["u"], d["u1"], d["u2"], d["u3"], 0.0) == -2.0
        assert eps2_third_order("imq", d["u"], d["u1"], d["u2"], d["u3"], 0.1) == pytest.approx(-2.0, rel=1e-14)
        assert eps2_third_order("iq", d["u"], d["u1"], d["u2"], d["u3"], 0.0) == -1.0
        with pytest.raises(RbfDomainError):
            eps2_third_order("imq", 1.0, -10.0, 0.0, 0.0, 0.1)

    def test_fourth_order_limits(self):
        d = EX1_T0
        h = 1e-3
        plus, minus = eps2_fourth_order("imq", *d.values(), h)
        assert plus == pytest.approx(-2.0, abs=1e-2)
        assert h * h * minus == pytest.approx(4.0 / 3.0, abs=1e-2)
        _, minus = eps2_fourth_order("iq", *d.values(), h)
        assert h * h * minus == pytest.approx(1.0, abs=1e-2)

    @pytest.mark.parametrize("family,target", [("imq", -2.0), ("iq", -1.0)])
    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_consistent_root_converges(self, family, target, sign):
        # scaling u by -1 scales every derivative too; eps2 is unchanged
        d = [sign * v for v in EX1_T0.values()]
        errs = []
        for h in (1e-2, 1e-3, 1e-4):
            root = select_consistent_root(eps2_fourth_order(family, *d, h), d[0])
            errs.append(abs(root - target))
            assert errs[-1] <= 2.0 * h
        assert errs[0] > errs[1] > errs[2]

    def test_root_selection(self):
        assert select_consistent_root((-2.0, 1e6), 1.0) == -2.0
        assert select_consistent_root((1e6, -2.0), -1.0) == -2.0
        assert select_consistent_root((3.0, 4.0), 0.5) != select_consistent_root((3.0, 4.0), -0.5)
        with pytest.raises(RbfDomainError):
            select_consistent_root((1.0, 2.0), 0.0)

    def test_fourth_order_errors(self):
        with pytest.raises(RbfDomainError):
            eps2_fourth_order("imq", 0.0, 1.0, 1.0, 1.0, 1.0, 0.1)
        with pytest.raises(RbfDomainError):
            eps2_fourth_order("iq", 1.0, 0.0, -1e4, 0.0, 0.0, 0.1)


class TestIntegrate:
    def test_euler_golden(self):
        p = get_problem("ex1")
        traj = integrate(p, "euler", None, 10)
        assert abs(traj.final - p.exact(1.0)) == pytest.approx(0.018287121529848, abs=1e-12)

    def test_imq_fd_close_to_tabulated(self):
        p = get_problem("ex1")
        err = abs(integrate(p, "imq", ShapePolicy.finite_difference(), 20).final - p.exact(1.0))
        assert err == pytest.approx(0.001093900148224, rel=0.25)

    @pytest.mark.parametrize("scheme", ALL_SCHEMES)
    def test_zero_rhs_is_constant(self, scheme):
        traj = integrate(_const_problem(), scheme, ShapePolicy.finite_difference(), 5)
        assert np.all(traj.u == 0.7)
        assert np.all(traj.eps2[:-1] == 0.0)

    @pytest.mark.parametrize("pid,N", [("ex1", 320), ("ex3", 6400), ("ex4", 10000)])
    def test_grid(self, pid, N):
        p = get_problem(pid)
        traj = integrate(p, "iq", ShapePolicy.finite_difference(), N)
        h = (p.t_end - p.t_start) / N
        assert len(traj.records) == N + 1 and traj.h == h
        assert traj.t[0] == p.t_start
        assert abs(traj.t[-1] - p.t_end) <= 1e-12
        ulp = np.spacing(max(abs(p.t_end), abs(p.t_start)))
        assert np.max(np.abs(traj.t - (p.t_start + np.arange(N + 1) * h))) <= 4 * ulp

    def test_bootstrap_flag_only_first_step(self):
        p = get_problem("ex1")
        for boot in ("forward", "zero", "exact"):
            flags = integrate(p, "imq", ShapePolicy.finite_difference(bootstrap=boot), 10).flags
            assert flags[0] is StepFlag.BOOTSTRAP
            assert StepFlag.BOOTSTRAP not in flags[1:]
        assert StepFlag.BOOTSTRAP not in integrate(p, "imq", ShapePolicy.exact_c1(), 10).flags

    def test_zero_bootstrap_first_step_is_euler(self):
        p = get_problem("ex1")
        traj = integrate(p, "iq", ShapePolicy.finite_difference(bootstrap="zero"), 10)
        assert traj.eps2[0] == 0.0
        assert traj.u[1] == step("euler", 1.0, -1.0, 0.1, 0.0)

    def test_exact_policy_uses_exact_second_derivative(self):
        p = get_problem("ex1")
        traj = integrate(p, "imq", ShapePolicy.exact_c1(), 10)
        assert traj.eps2[0] == -2.0
        for r in traj.records[:-1]:
            assert r.eps2 == pytest.approx(-p.deriv(r.t, 2) / r.u)

    def test_clamp(self):
        p = get_problem("ex1")
        h = 0.1
        for scheme in ("imq", "iq"):
            traj = integrate(p, scheme, ShapePolicy.fixed(-1.0 / h**2), 10)
            assert all(f is StepFlag.CLAMPED for f in traj.flags[:-1])
            np.testing.assert_array_equal(traj.u, integrate(p, "euler", None, 10).u)

    def test_exact_policy_needs_derivatives(self):
        p = IvpProblem("noexact", lambda t, u: -u, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            integrate(p, "imq", ShapePolicy.exact_c1(), 10)
        # Euler ignores the policy
        assert integrate(p, "euler", ShapePolicy.exact_c1(), 10).N == 10

    def test_non_finite_rhs_aborts_with_position(self):
        p = IvpProblem("bad", lambda t, u: math.nan if t > 0.45 else 1.0, 0.0, 1.0, 0.0)
        with pytest.raises(IntegrationError) as info:
            integrate(p, "imq", None, 10)
        assert info.value.step_index == 5 and info.value.t == pytest.approx(0.5)

    def test_arithmetic_failures_abort_with_position(self):
        p = get_problem("ex1")
        with pytest.raises(IntegrationError) as info:
            integrate(p, "gaussian", ShapePolicy.fixed(-1e6), 10)
        assert info.value.step_index == 1
        bad = IvpProblem("div", lambda t, u: 1.0 / (t - 0.5), 0.0, 1.0, 0.0)
        with pytest.raises(IntegrationError) as info:
            integrate(bad, "euler", None, 10)
        assert info.value.step_index == 5

    def test_invalid_N(self):
        with pytest.raises(ValueError):
            integrate(get_problem("ex1"), "imq", None, 0)

    def test_scheme_parse(self):
        assert SchemeKind.parse("IMQmod") is SchemeKind.IMQ_MOD
        with pytest.raises(ValueError):
            SchemeKind.parse("rk4")
