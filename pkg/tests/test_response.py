import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omitkit.errors import SingularityError
from omitkit.params import ReducedParams
from omitkit.oracle import sideband_linear_solve
from omitkit.response import (SidebandInputs, dip_location, dispersion_slope, epsilon_T,
                              epsilon_T_linearized, ideal_beta, im_epsilon_T_closed,
                              nonlinear_term, probe_response, sideband_c_plus,
                              sideband_residuals, sideband_solution, x_to_y, y_to_x)
from omitkit.transparency import slope_max_and_product

ratios = st.floats(0.1, 10.0)
qs = st.floats(1e2, 1e6)


def at_ideal(r, Q=1e4):
    p = ReducedParams.from_ratio(r, Q=Q)
    return p.with_beta(ideal_beta(p))


class TestNonlinearTerm:
    def test_zero_drive(self):
        assert nonlinear_term(ReducedParams(1.0, 1e-4, 1.0)) == 0

    def test_hand_value(self):
        assert nonlinear_term(ReducedParams(2.0, 1e-4, 1.0, beta=8.0)) == pytest.approx(-2 - 2j, rel=1e-15)

    @given(ratios, st.floats(0.0, 100.0))
    def test_modulus(self, r, beta):
        p = ReducedParams.from_ratio(r, beta=beta)
        assert abs(nonlinear_term(p)) * math.sqrt(p.sideband_denominator) == pytest.approx(beta, rel=1e-14, abs=1e-300)


class TestEpsilonT:
    def test_bare_cavity(self):
        p = ReducedParams(1.3, 1e-4, 1.0)
        x = np.linspace(-2, 2, 11)
        assert epsilon_T(0.0, p) == 2
        np.testing.assert_allclose(epsilon_T(x, p), 2 * p.kappa / (p.kappa - 1j * x), rtol=1e-15)

    def test_probe_response_parts(self):
        p = at_ideal(1.0)
        x = np.linspace(-5, 5, 21) * p.gamma
        r = probe_response(x, p)
        np.testing.assert_array_equal(r.absorption, epsilon_T(x, p).real)
        np.testing.assert_array_equal(r.dispersion, epsilon_T(x, p).imag)
        assert np.all(probe_response(x, p, linearized=True).epsT == epsilon_T_linearized(x, p))

    @pytest.mark.parametrize("r", [0.2, 1.0, 2.0, 5.0])
    def test_ideal_dip_vanishes(self, r):
        p = at_ideal(r)
        assert abs(epsilon_T(dip_location(p), p)) <= 1e-12

    @settings(max_examples=200, deadline=None)
    @given(ratios, qs)
    def test_pole_cancellation(self, r, Q):
        p = at_ideal(r, Q)
        e = complex(epsilon_T(dip_location(p), p))
        assert abs(e.real) <= 1e-12 and abs(e.imag) <= 1e-12

    def test_resolved_sideband_dip(self):
        p = at_ideal(0.2)
        s = np.linspace(-300, 300, 6001)
        re = epsilon_T(s * p.gamma, p).real
        assert s[np.argmin(re)] == pytest.approx(-5.0, abs=0.1)
        inside = s[re < 1.0]
        assert inside.max() - inside.min() == pytest.approx(100.0, rel=0.02)


class TestLinearized:
    @given(ratios, st.floats(0.0, 1e3))
    def test_value_at_zero(self, r, f):
        p = ReducedParams.from_ratio(r)
        p = p.with_beta(f * ideal_beta(p))
        expected = 2 * p.gamma * p.kappa / (2 * p.beta + p.gamma * p.kappa)
        assert epsilon_T_linearized(0.0, p).real == pytest.approx(expected, rel=1e-14)

    def test_matches_full_without_drive(self):
        p = ReducedParams(0.7, 1e-3, 1.0)
        x = np.linspace(-1, 1, 101)
        np.testing.assert_array_equal(epsilon_T_linearized(x, p), epsilon_T(x, p))

    def test_large_drive_tends_to_zero_from_above(self):
        p = ReducedParams.from_ratio(1.0)
        vals = [epsilon_T_linearized(0.0, p.with_beta(b)).real for b in np.geomspace(1e-2, 1e6, 50)]
        assert min(vals) > 0 and vals[-1] < 1e-9 and np.all(np.diff(vals) < 0)

    @settings(max_examples=30, deadline=None)
    @given(ratios, st.floats(0.0, 1e4))
    def test_never_negative(self, r, f):
        p = ReducedParams.from_ratio(r)
        p = p.with_beta(f * ideal_beta(p))
        x = np.linspace(-3, 3, 3001) * max(p.kappa, 1e3 * p.gamma)
        assert epsilon_T_linearized(x, p).real.min() >= 0


class TestSidebandSolution:
    def inputs(self, r=1.0, Q=1e2, Delta=1.0):
        p = at_ideal(r, Q)
        return p, SidebandInputs.from_reduced(p, Delta)

    def test_undriven_is_bare_cavity(self):
        p = ReducedParams.from_ratio(1.0, Q=1e2)
        inp = SidebandInputs(p.kappa, p.gamma, p.omega_m, 1.0, 1.0, 1.0, 0.0)
        delta = 1.003
        sol = sideband_solution(delta, 1.0, inp)
        assert sol.cPlus == pytest.approx(1 / complex(1.0, 1.0 - delta), rel=1e-15)
        assert sol.qPlus == 0 and sol.cMinus == 0

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.2, 5.0), st.floats(1e2, 1e5), st.floats(-5, 5), st.floats(0.8, 1.2), st.floats(0.0, 3.0))
    def test_identities(self, r, Q, xs, Delta, f):
        p = ReducedParams.from_ratio(r, Q=Q)
        p = p.with_beta(f * ideal_beta(p))
        inp = SidebandInputs.from_reduced(p, Delta)
        delta = p.omega_m + xs * p.gamma
        sol = sideband_solution(delta, Delta, inp)
        assert sol.qPlus == sol.qMinus.conjugate()
        assert max(sideband_residuals(sol, inp).values()) < 1e-10
        # c0 c-* = M/(1-M) c0* c+
        lhs = sol.c0 * sol.cMinus.conjugate()
        rhs = sol.M / (1 - sol.M) * sol.c0.conjugate() * sol.cPlus
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)
        assert sol.cPlus == pytest.approx(sideband_c_plus(delta, Delta, p.kappa, p.gamma, p.omega_m, p.beta), rel=1e-13)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.2, 5.0), st.floats(1e2, 1e5), st.floats(-5, 5), st.floats(0.0, 3.0))
    def test_linear_solve_agrees(self, r, Q, xs, f):
        p = ReducedParams.from_ratio(r, Q=Q)
        p = p.with_beta(f * ideal_beta(p))
        inp = SidebandInputs.from_reduced(p, p.omega_m)
        delta = p.omega_m + xs * p.gamma
        sol = sideband_solution(delta, p.omega_m, inp)
        v = sideband_linear_solve(delta, p.omega_m, inp)
        assert abs(v[0] - sol.cPlus) <= 1e-12 * abs(sol.cPlus) + 1e-300
        assert abs(v[2] - sol.qPlus) <= 1e-9 * abs(sol.qPlus) + 1e-15

    def test_near_resonance_form(self):
        # full closed form vs the simplified response near the sideband
        p = at_ideal(1.0, Q=1e4)
        xs = np.linspace(-5, 5, 101) * p.gamma
        full = np.array([2 * p.kappa * sideband_c_plus(p.omega_m + x, p.omega_m, p.kappa, p.gamma,
                                                       p.omega_m, p.beta) for x in xs])
        approx = epsilon_T(xs, p)
        assert np.linalg.norm(full - approx) <= 1e-2 * np.linalg.norm(full)

    def test_singular(self):
        inp = SidebandInputs(1.0, 0.0, 1.0, 0.1, 1.0, 1.0, 1.0)
        with pytest.raises(SingularityError, match="omega_m"):
            sideband_solution(1.0, 1.0, inp)

    def test_physical_inputs(self):
        from tests.test_params import lab_params
        phys = lab_params()
        inp = SidebandInputs.from_physical(phys)
        sol = sideband_solution(phys.omegaM * (1 + 1e-6), phys.omegaM, inp)
        assert max(sideband_residuals(sol, inp).values()) < 1e-10


class TestDispersionClosedForms:
    @pytest.mark.parametrize("r", [0.2, 1.0, 2.0, 5.0])
    def test_matches_im_epsilon(self, r):
        p = at_ideal(r)
        y = np.linspace(-20, 20, 401) * p.gamma
        np.testing.assert_allclose(im_epsilon_T_closed(y, p), epsilon_T(y_to_x(y, p), p).imag,
                                   rtol=1e-10, atol=1e-13)

    def test_limits(self):
        p = at_ideal(1.0)
        assert im_epsilon_T_closed(0.0, p) == 0.0
        assert abs(im_epsilon_T_closed(1e8 * p.gamma, p)) < 1e-3
        assert abs(im_epsilon_T_closed(-1e8 * p.gamma, p)) < 1e-3

    def test_frame_converters(self):
        p = at_ideal(2.0)
        x = np.array([-1.0, 0.5]) * p.gamma
        np.testing.assert_allclose(y_to_x(x_to_y(x, p), p), x, rtol=1e-15)
        assert x_to_y(dip_location(p), p) == 0

    def test_slope_at_dip(self):
        p = at_ideal(0.2)
        assert dispersion_slope(0.0, p) == pytest.approx(-4 / (101 * p.gamma), rel=1e-10)
        for r in (0.5, 1.0, 2.0, 7.0):
            q = at_ideal(r)
            assert dispersion_slope(0.0, q) == pytest.approx(slope_max_and_product(q)[0], rel=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.2, 5.0), st.floats(-4, 4))
    def test_finite_difference(self, r, ys):
        p = at_ideal(r)
        k = dispersion_slope(ys * p.gamma, p)
        # relative error is ill-conditioned where the slope passes through zero
        if abs(k) < 1e-2 * abs(slope_max_and_product(p)[0]):
            return
        h = 1e-4 * p.gamma
        y = ys * p.gamma
        fd = (im_epsilon_T_closed(y + h, p) - im_epsilon_T_closed(y - h, p)) / (2 * h)
        assert fd == pytest.approx(k, rel=1e-6)
