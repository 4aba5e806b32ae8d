import math

import numpy as np
import pytest

from hypeig.radial import (OracleDomain, RadialBasis, SpectralParameter,
                           TruncationPrecondition, hypergeometric_reference,
                           min_admissible_n, normalize, solve_radial,
                           truncation_bound)

BOLZA_ELL = 2 * math.acosh(3 + 2 * math.sqrt(2))


class TestClosedForms:
    def test_k0_lam0_even_is_constant(self):
        b = RadialBasis(ell=BOLZA_ELL, lam=0.0, n_four=0, r_max=2.1)
        r = np.linspace(0.0, 2.0, 9)
        v, d = b.eval(r)
        assert np.allclose(v[:, 0, 0], 1.0, atol=1e-15)
        assert np.allclose(d[:, 0, 0], 0.0, atol=1e-15)

    def test_k0_lam0_odd_is_arctan(self):
        # gd(rho) = arctan(sinh rho), i.e. arctan(r) in the r coordinate
        b = RadialBasis(ell=BOLZA_ELL, lam=0.0, n_four=0, r_max=2.1)
        r = np.linspace(0.0, 2.0, 9)
        v, d = b.eval(r)
        assert np.allclose(v[:, 0, 1], np.arctan(r), atol=2e-15)
        assert np.allclose(d[:, 0, 1], 1.0 / (1.0 + r * r), atol=2e-15)

    def test_oracle_initial_data(self):
        sp = SpectralParameter(12.0)
        even, odd = hypergeometric_reference(sp, 4, BOLZA_ELL, 0.0)
        assert even == pytest.approx(1.0, abs=1e-20)
        assert odd == pytest.approx(0.0, abs=1e-20)

    def test_oracle_k0_lam0_gudermann(self):
        sp = SpectralParameter(0.0)
        for rho in (0.4, 1.1):
            even, odd = hypergeometric_reference(sp, 0, 2 * math.pi, rho)
            assert even == pytest.approx(1.0, abs=1e-14)
            assert odd == pytest.approx(math.atan(math.sinh(rho)), abs=1e-14)


class TestOracleAgreement:
    @pytest.mark.parametrize("k,lam", [(0, 3.84), (1, 0.7), (3, 30.0), (8, 30.0),
                                       (13, 50.0), (20, 50.0)])
    def test_taylor_matches_2f1(self, k, lam):
        sp = SpectralParameter(lam)
        b = RadialBasis(ell=BOLZA_ELL, lam=lam, n_four=max(k, 1),
                        r_max=math.sinh(1.5) + 0.01)
        for rho in (0.25, 0.8, 1.5):
            even, odd = hypergeometric_reference(sp, k, BOLZA_ELL, rho)
            v, _ = b.eval(np.array([math.sinh(rho)]))
            scale = max(1.0, abs(even), abs(odd))
            assert abs(v[0, k, 0] - even) < 1e-12 * scale
            assert abs(v[0, k, 1] - odd) < 1e-12 * scale

    def test_wronskian_constant_in_angle_coordinate(self):
        # Psi_e Psi_o' - Psi_o Psi_e' is constant in phi; Psi' = (1+r^2) dP/dr
        lam, k = 21.0, 5
        b = RadialBasis(ell=3.0, lam=lam, n_four=k, r_max=2.0)
        r = np.linspace(0.0, 1.9, 12)
        v, d = b.eval(r)
        wr = (1.0 + r * r) * (v[:, k, 0] * d[:, k, 1] - v[:, k, 1] * d[:, k, 0])
        assert np.allclose(wr, wr[0], rtol=1e-12)

    def test_oracle_declines_out_of_range(self):
        sp = SpectralParameter(10.0)
        with pytest.raises(OracleDomain):
            from hypeig.radial import _series_2f1
            _series_2f1(1.0, 2.0, 0.5, 1.5)


class TestValidatedBounds:
    def test_eta_bounds_real_error_against_extended_precision(self):
        lam, ell = 18.0, 3.05714
        b64 = RadialBasis(ell=ell, lam=lam, n_four=6, r_max=2.0, validated=True)
        b128 = RadialBasis(ell=ell, lam=lam, n_four=6, r_max=2.0,
                           dtype=np.longdouble, step_cap=0.13)
        r = np.linspace(0.1, 1.9, 23)
        v64, d64 = b64.eval(r)
        v128, d128 = b128.eval(r.astype(np.longdouble))
        ev, ed = b64.eta_at(r)
        assert np.all(np.abs(v64 - v128.astype(np.float64)) <= ev + 1e-18)
        assert np.all(np.abs(d64 - d128.astype(np.float64)) <= ed + 1e-18)

    def test_solve_radial_reports_achieved_bound(self):
        even, odd = solve_radial(30.0, 3, BOLZA_ELL, 2.1, tol=1e-30, validated=True)
        assert not even.tolerance_met
        assert even.eta_ode > 1e-30

    def test_normalized_constant(self):
        even, _ = solve_radial(0.0, 0, 2 * math.pi, 2.0, validated=False)
        n = normalize(even, (0.25, 1.25))
        v, _ = n.eval(np.array([0.7]))
        assert v[0] == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-13)

    def test_normalization_homogeneity(self):
        even, _ = solve_radial(7.0, 2, 3.0, 2.0, validated=False)
        n1 = normalize(even, (0.0, 0.8))
        scaled = normalize(
            type(even)(ell=even.ell, k=even.k, parity=even.parity, lam=even.lam,
                       breaks=even.breaks, coeffs=7.0 * even.coeffs,
                       eta_ode=even.eta_ode, tolerance_met=True), (0.0, 0.8))
        r = np.array([0.3, 0.6])
        assert np.allclose(n1.eval(r)[0], scaled.eval(r)[0], rtol=1e-13)


class TestTruncationBounds:
    def test_minimal_admissible_order_bolza(self):
        assert min_admissible_n(30.0, BOLZA_ELL, 1.5) == 11
        tb = truncation_bound(30.0, BOLZA_ELL, 1.5, 11)
        assert tb.beta_c1 > 0

    def test_precondition_reported(self):
        with pytest.raises(TruncationPrecondition) as exc:
            truncation_bound(30.0, BOLZA_ELL, 1.5, 10)
        assert exc.value.n_min == 11

    def test_exponential_decay(self):
        vals = [truncation_bound(30.0, BOLZA_ELL, 1.5, n).beta_c1
                for n in range(20, 45, 4)]
        assert all(b > a for a, b in zip(vals[1:], vals[:-1]))
        ratios = [vals[i + 1] / vals[i] for i in range(len(vals) - 1)]
        assert max(ratios) < 0.5  # log-linear, bounded away from 1

    def test_lam_zero_limit_formula(self):
        ell, hw = 3.0, 1.0
        tb = truncation_bound(0.0, ell, hw, 5)
        phi0 = 2 * math.atan(math.tanh(hw / 2))
        direct = 4 * sum(1.0 / math.cosh(2 * math.pi * k / ell * (math.pi / 2 - phi0))
                         for k in range(6, 4000)
                         if 2 * math.pi * k / ell * (math.pi / 2 - phi0) < 60.0)
        assert tb.a1 == pytest.approx(direct, rel=1e-6)

    def test_monotone_decreasing_a_sums(self):
        t1 = truncation_bound(25.0, 3.0, 1.2, 14)
        t2 = truncation_bound(25.0, 3.0, 1.2, 15)
        assert t2.a1 < t1.a1 and t2.a2 < t1.a2 and t2.a3 < t1.a3


class TestMonotonicityProperties:
    def test_energy_monotone_and_growth_bounds(self):
        import sys, pathlib
        sys.path.insert(0, str(pathlib.Path(__file__).parent))
        from _properties import check_energy_and_growth, random_cases
        count = 0
        for k, lam, ell in random_cases(250):
            assert check_energy_and_growth(k, lam, ell)
            count += 1
        assert count == 250
