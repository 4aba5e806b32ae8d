import math

import mpmath as mp
import numpy as np
import pytest

from hypeig import trace
from hypeig.trace import (EigEntry, LengthSpectrumEntry, completeness_check,
                          exp_integral_e2, heat_trace, identity_term,
                          incomplete_gamma, spectral_heat_trace, zeta_value)

AREA2 = 4 * math.pi


class TestSpecialFunctions:
    def test_gamma_1_y_closed_form(self):
        for y in (0.2, 1.0, 7.0, 30.0):
            v, e = incomplete_gamma(1.0, y)
            assert v == pytest.approx(math.exp(-y), rel=1e-13)

    def test_gamma_0_1_frozen_value(self):
        # high-precision continued-fraction oracle value, frozen
        v, e = incomplete_gamma(0.0, 1.0)
        assert v == pytest.approx(0.21938393439552026, abs=1e-12)

    def test_e2_identity_with_gamma(self):
        # E2(x) = x Gamma(-1, x) across the working range
        with mp.workdps(30):
            for x in np.geomspace(0.01, 50.0, 25):
                v, e = exp_integral_e2(float(x))
                ref = float(mp.mpf(x) * mp.gammainc(-1, mp.mpf(x)))
                assert v == pytest.approx(ref, rel=1e-12, abs=1e-25)

    def test_gamma_against_mpmath_sweep(self):
        with mp.workdps(30):
            for a in (-1.5, -0.5, 0.5, 2.0):
                for y in (0.3, 2.0, 9.0, 25.0):
                    v, err = incomplete_gamma(a, y)
                    ref = float(mp.gammainc(a, y))
                    assert abs(v - ref) <= max(err, 1e-13 * abs(ref) + 1e-30)


class TestHeatTraceSides:
    def test_identity_coefficient_a0(self):
        # int sech^2(pi r) dr = 1/pi, so a_0 = area / (4 pi) = 1 in genus 2
        a = trace._a_coeffs(0, AREA2)
        assert a[0] == pytest.approx(1.0, abs=1e-12)

    def test_spectral_trace_long_time_limit(self):
        entries = [EigEntry(3.84, 3.84, 3), EigEntry(5.35, 5.35, 4)]
        v, _ = spectral_heat_trace(40.0, entries)
        assert v == pytest.approx(1.0, abs=1e-12)

    def test_geometric_remainder_decreases_in_cutoff(self):
        r1 = trace.geodesic_remainder(0.4, 3.0, 3.05, 3.05, AREA2)
        r2 = trace.geodesic_remainder(0.4, 6.0, 3.05, 3.05, AREA2)
        assert 0 < r2 < r1


@pytest.mark.slow
class TestBolzaHeatIdentity:
    def test_two_sides_agree_and_calibrate_multiplicity_convention(
            self, bolza_dec, bolza_eigs_low, bolza_lengths):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        for t in (0.35, 0.5):
            spec, slack = spectral_heat_trace(t, entries)
            spec_tail = trace.heat_remainder(62.0, t, 3.057141, AREA2)
            geo, geo_err = heat_trace(t, AREA2, bolza_lengths, 9.0, 3.057141)
            assert abs(spec - geo) <= spec_tail + geo_err + slack + 5e-9
            # dropping the geodesic term entirely must break the identity
            bare = identity_term(t, AREA2)
            assert abs(spec - bare) > 50 * (spec_tail + geo_err + slack + 1e-9)


class TestCompleteness:
    def test_detects_deleted_low_eigenvalue(self, bolza_eigs_low, bolza_lengths):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        rep = completeness_check(entries, bolza_lengths, (0.3, 0.5),
                                 AREA2, 3.057141, lam_complete=24.0)
        assert rep.ok
        # delete the lowest entry
        broken = entries[1:]
        rep2 = completeness_check(broken, bolza_lengths, (0.3, 0.5),
                                  AREA2, 3.057141, lam_complete=24.0)
        assert not rep2.ok

    def test_empty_lengths_small_t_degrades_to_inconclusive(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        rep = completeness_check(entries, [], (0.8,), AREA2, 3.057141,
                                 lam_complete=40.0)
        assert not rep.conclusive


class TestZetaMachinery:
    def test_zeta_2_matches_direct_sum(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        res = zeta_value(2.0, 0.05, entries, [], AREA2, 3.057141)
        direct = sum(m * l ** -2.0 for l, m in bolza_eigs_low)
        # integral-bounded tail of the direct sum
        from hypeig.rigor import counting_bounds
        lam_top = bolza_eigs_low[-1][0]
        lo = lam_top
        tail_hi = 0.0
        while lo < 1e6:
            hi = lo * 1.3
            n1, n2 = counting_bounds(math.sqrt(lo), 3.057, AREA2)[0], \
                counting_bounds(math.sqrt(hi), 3.057, AREA2)[1]
            tail_hi += max(n2 - n1, 0.0) * lo ** -2.0
            lo = hi
        assert res.value == pytest.approx(direct + tail_hi / 2.0,
                                          abs=res.total_error + tail_hi)

    def test_t2_pole_rejected(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        with pytest.raises(ValueError):
            zeta_value(1.0, 0.05, entries, [], AREA2, 3.057141)

    def test_tail_bound_dominates_truncation(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        full = zeta_value(1.7, 0.05, entries, [], AREA2, 3.057141)
        short = zeta_value(1.7, 0.05, entries[:-3], [], AREA2, 3.057141)
        assert abs(full.value - short.value) <= short.eig_tail + full.eig_tail

    def test_t4_bound_shrinks_with_eps(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        r1 = zeta_value(-0.5, 0.08, entries, [], AREA2, 3.057141)
        r2 = zeta_value(-0.5, 0.04, entries, [], AREA2, 3.057141)
        assert r2.length_tail < r1.length_tail

    def test_pole_structure_smooth_near_zero(self, bolza_eigs_low):
        entries = [EigEntry(l, l, m) for l, m in bolza_eigs_low]
        vals = []
        for ang in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            s = 0.01 * complex(math.cos(ang), math.sin(ang))
            res = zeta_value(s, 0.05, entries, [], AREA2, 3.057141, n_terms=3)
            vals.append(complex(res.value, res.meta["value_imag"]))
        vals = np.array(vals)
        assert np.max(np.abs(vals - vals.mean())) < 1e-3
