import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omitkit.errors import ConvergenceError, DomainError, RangeError
from omitkit.params import (HBAR, Detuning, PhysicalParams, ReducedParams, beta_from_intracavity,
                            field_amplitude, photon_number_cubic_roots, reduce,
                            solve_photon_number, steady_state_zeroth)


def lab_params(**kw):
    base = dict(omega0=1.77e15, omegaC=1.77e15 - 2 * math.pi * 1e7, omegaP=1.77e15,
                L=1e-3, m=1e-11, kappa=2 * math.pi * 1e6, gamma=2 * math.pi * 1e3,
                omegaM=2 * math.pi * 1e7, powerC=1e-3)
    base.update(kw)
    return PhysicalParams(**base)


class TestFieldAmplitude:
    def test_zero_power(self):
        assert field_amplitude(0.0, 1.0, 1.0) == 0.0

    def test_sqrt_scaling(self):
        a, b = field_amplitude(1e-3, 2e15, 1e7), field_amplitude(2e-3, 2e15, 1e7)
        assert b / a == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_hand_value(self):
        # sqrt(2 * 2pi*1e7 * 1e-3 / (1.0546e-34 * 1.77e15)), evaluated by hand
        v = field_amplitude(1e-3, 1.77e15, 2 * math.pi * 1e7, 1.0546e-34)
        assert v == pytest.approx(8.2049e11, rel=1e-4)

    @pytest.mark.parametrize("args", [(-1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, -1.0),
                                      (math.nan, 1.0, 1.0), (1.0, math.inf, 1.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            field_amplitude(*args)

    @given(st.floats(0, 1e3), st.floats(1e-3, 1e3))
    def test_monotone_in_power(self, p, dp):
        assert field_amplitude(p + dp, 1e15, 1e7) > field_amplitude(p, 1e15, 1e7)


class TestReducedParams:
    def test_defaults(self):
        p = ReducedParams.from_ratio(1.0)
        assert p.Q == pytest.approx(1e4)
        assert p.weak_damping
        assert p.sideband_denominator == 5.0

    def test_gamma_zero_allowed(self):
        assert ReducedParams(1.0, 0.0, 1.0).Q == math.inf

    @pytest.mark.parametrize("kw", [dict(kappa=0, gamma=1, omega_m=1), dict(kappa=1, gamma=-1, omega_m=1),
                                    dict(kappa=1, gamma=1, omega_m=1, beta=-1)])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            ReducedParams(**kw)

    def test_weak_damping_flag(self):
        assert not ReducedParams(1.0, 0.1, 1.0).weak_damping


class TestDetuning:
    def test_frames(self):
        d = Detuning.from_delta(1.25, 1.0, x_o=0.05)
        assert d.x == 0.25 and d.y == pytest.approx(0.2)
        assert Detuning.from_y(0.2, 0.05).x == pytest.approx(0.25)

    def test_y_needs_xo(self):
        with pytest.raises(DomainError):
            Detuning(0.1).y

    def test_near_resonant(self):
        assert Detuning(1e-3).near_resonant(1.0)
        assert not Detuning(0.5).near_resonant(1.0)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            Detuning(math.nan)


class TestReduce:
    def test_no_drive(self):
        assert reduce(lab_params(powerC=0.0)).beta == 0.0

    def test_quadratic_in_eps_c(self):
        # 4x power doubles eps_c
        b1 = reduce(lab_params(powerC=1e-3)).beta
        b4 = reduce(lab_params(powerC=4e-3)).beta
        assert b4 == pytest.approx(4 * b1, rel=1e-15)

    def test_routes_agree(self):
        p = lab_params()
        n = p.eps_c ** 2 / (p.kappa ** 2 + p.omegaM ** 2)
        route = beta_from_intracavity(p.chi0, n, p.m, p.omegaM, p.hbar)
        assert reduce(p).beta == pytest.approx(route, rel=1e-12)

    def test_rates_copied(self):
        p = lab_params()
        r = reduce(p)
        assert (r.kappa, r.gamma, r.omega_m) == (p.kappa, p.gamma, p.omegaM)

    def test_overflow(self):
        with pytest.raises(RangeError, match="chi0"):
            reduce(lab_params(omega0=1e300, L=1e-300))

    def test_invalid_physical(self):
        with pytest.raises(DomainError):
            lab_params(m=0.0)


class TestBetaFromIntracavity:
    def test_trivial(self):
        assert beta_from_intracavity(1.0, 0.0, 1.0, 1.0, 1.0) == 0.0
        assert beta_from_intracavity(1.0, 2.0, 1.0, 1.0, 1.0) == 2 * beta_from_intracavity(1.0, 1.0, 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("m, w", [(0.0, 1.0), (1.0, 0.0)])
    def test_zero_mass_or_frequency(self, m, w):
        with pytest.raises(DomainError):
            beta_from_intracavity(1.0, 1.0, m, w, 1.0)


class TestSteadyState:
    def test_decoupled(self):
        # chi0 -> 0 via a huge cavity length
        p = lab_params(L=1e300)
        z = steady_state_zeroth(p)
        assert z.q0 == pytest.approx(0.0, abs=1e-250)
        assert z.Delta == pytest.approx(p.detuning0, rel=1e-15)
        assert z.c0 == pytest.approx(p.eps_c / complex(p.kappa, p.detuning0), rel=1e-12)

    def test_no_drive(self):
        z = steady_state_zeroth(lab_params(powerC=0.0))
        assert z.c0 == 0 and z.q0 == 0

    def test_residual(self):
        p = lab_params()
        z = steady_state_zeroth(p)
        assert z.residual < 1e-10
        assert abs(z.q0 - p.chi0 * abs(z.c0) ** 2 / (p.m * p.omegaM ** 2)) <= 1e-10 * abs(z.q0)
        assert z.Delta == pytest.approx(p.detuning0 - z.q0 * p.chi0 / HBAR, rel=1e-12)

    def test_matches_cubic(self):
        p = lab_params()
        shift = p.chi0 ** 2 / (p.m * p.omegaM ** 2 * p.hbar)
        roots = photon_number_cubic_roots(p.eps_c, p.kappa, p.detuning0, shift)
        assert len(roots) == 1   # weak drive: single branch
        z = steady_state_zeroth(p)
        assert abs(z.c0) ** 2 == pytest.approx(roots[0], rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 10.0), st.floats(-3.0, 3.0), st.floats(0.0, 0.05))
    def test_fixed_point_is_cubic_root(self, kappa, det0, shift):
        n, _ = solve_photon_number(1.0, kappa, det0, shift)
        roots = photon_number_cubic_roots(1.0, kappa, det0, shift)
        assert np.min(np.abs(roots - n)) <= 1e-9 * n

    def test_bistable_does_not_converge(self):
        with pytest.raises(ConvergenceError):
            solve_photon_number(10.0, 0.1, 5.0, 1.0, max_iter=500)
