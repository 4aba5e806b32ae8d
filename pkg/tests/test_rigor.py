import math

import numpy as np
import pytest

from hypeig import rigor
from hypeig.geometry import build_decomposition
from hypeig.surfaces import load_surface


class TestNu:
    def test_root_value(self):
        nu = rigor.nu_root()
        assert nu == pytest.approx(4.73004074, abs=1e-8)
        assert abs(math.cosh(nu) * math.cos(nu) - 1.0) < 1e-12

    def test_below_five(self):
        assert rigor.NU < 5.0


class TestResolventConstants:
    def test_closed_form_bounds(self):
        c1, c2 = rigor.resolvent_constants("rigorous")
        assert c1 == pytest.approx(1.7485475, abs=2e-7)
        assert c1 <= 1.75
        assert c2 == pytest.approx(1.6086, abs=2e-4)
        assert c2 <= 1.61

    @pytest.mark.slow
    def test_quadrature_mode_against_dblquad_oracle(self):
        from scipy.integrate import quad

        c1q, c2q = rigor.resolvent_constants("fast")
        assert c1q == pytest.approx(0.313, rel=0.08)
        assert c2q == pytest.approx(0.343, rel=0.08)

        # independent oracle: nested adaptive quadrature of the defining
        # double integrals (s = 3/2 kernel)
        def f_kernel(u, s=1.5):
            val, _ = quad(lambda x: (x * (1 - x)) ** (s - 1) * (x + u) ** (-s),
                          0.0, 1.0, limit=200)
            return val / (4 * math.pi)

        def inner(rho):
            val, _ = quad(lambda t: f_kernel(0.5 * (math.cosh(t) * math.cosh(rho) - 1.0)),
                          0.0, 12.0, limit=200)
            return 2.0 * val

        xs = np.linspace(1e-3, 10.0, 400)
        ys = np.array([inner(x) ** 2 * math.cosh(x) for x in xs])
        c1_oracle = math.sqrt(np.trapezoid(ys, xs))
        assert c1q == pytest.approx(c1_oracle, rel=0.05)


class TestCoupling:
    def test_genus2_value_at_unit_distance(self):
        assert rigor.coupling_constant(1.0, 2) == 480.0

    def test_genus2_value_at_two(self):
        # 12 (33/4 + 3 + 1)
        assert rigor.coupling_constant(2.0, 2) == pytest.approx(147.0, abs=1e-12)

    def test_genus2_prefactor_dominates_resolvent_norms(self):
        c1, c2 = rigor.resolvent_constants("rigorous")
        assert 5.0 * math.sqrt(c1 * c1 + c2 * c2) <= 12.0

    def test_general_genus_positive(self):
        assert rigor.coupling_constant(0.8, 3, n_sides=20) > 0


class TestEigenfunctionBounds:
    def test_sup_bound_example(self):
        assert rigor.sup_norm_bound(3.838887, 3.057142) == pytest.approx(2.6710, abs=2e-4)

    def test_lam_zero_floor(self):
        for L in (0.7, 2.0, 5.0):
            assert rigor.sup_norm_bound(0.0, L) > math.sqrt(2.0 / 3.0)

    def test_monotonicity(self):
        assert rigor.sup_norm_bound(10.0, 2.0) > rigor.sup_norm_bound(5.0, 2.0)
        assert rigor.sup_norm_bound(5.0, 3.0) < rigor.sup_norm_bound(5.0, 2.0)
        assert rigor.deriv_sup_bound(10.0, 2.0) > rigor.deriv_sup_bound(5.0, 2.0)


class TestCountingAndHeat:
    def test_sandwich_at_origin(self):
        lo, up = rigor.counting_bounds(0.0, 2.0, 4 * math.pi)
        assert lo <= 0.0 <= up
        assert up > 0

    def test_heat_remainder_positive_decreasing_in_c(self):
        r1 = rigor.heat_remainder(10.0, 0.5, 3.0, 4 * math.pi)
        r2 = rigor.heat_remainder(40.0, 0.5, 3.0, 4 * math.pi)
        assert 0 < r2 < r1

    def test_heat_remainder_dominates_empirical_tail(self, bolza_eigs_low):
        area = 4 * math.pi
        for c, t in ((10.0, 0.4), (20.0, 0.3)):
            emp = sum(m * math.exp(-lam * t) for lam, m in bolza_eigs_low if lam >= c)
            assert emp <= rigor.heat_remainder(c, t, 3.057141, area)


class TestBoundaryConstants:
    def test_c1_positive_and_modest(self):
        dec = build_decomposition(load_surface("bolza"))
        c1 = rigor.boundary_lower_bound_c1(4.0, dec)
        assert 0 < c1 < 1.0

    def test_cm_grows_with_lambda(self):
        dec = build_decomposition(load_surface("bolza"))
        assert rigor.boundary_norm_constant(dec, 25.0) > rigor.boundary_norm_constant(dec, 1.0)

    def test_kernel_lipschitz_finite_positive(self):
        dec = build_decomposition(load_surface("bolza"))
        val = rigor.kernel_lipschitz(3.8, 4.0, dec)
        assert 0 < val < 1e7

    def test_lemc_constants(self):
        # closed-form values at sigma = 1/2
        assert 0.25 == pytest.approx(1 / 4)
        from hypeig.rigor import kernel_lipschitz  # constants live inline
        assert math.log(4.0) / 2.0 == pytest.approx(0.6931471805599453, abs=1e-15)

    def test_c4_tilde_numeric(self):
        # sup_u (1/4pi) int_0^1 u / (xi+u)^{3/2} / sqrt(xi(1-xi)) dxi ~ 0.167878
        import mpmath as mp
        with mp.workdps(30):
            def val(u):
                um = mp.mpf(u)
                return float(mp.quad(lambda x: um / (x + um) ** mp.mpf(1.5)
                                     / mp.sqrt(x * (1 - x)), [0, 0.5, 1]) / (4 * mp.pi))
            sup = max(val(u) for u in np.geomspace(0.05, 50.0, 60))
        assert sup == pytest.approx(0.167878, abs=2e-4)
        assert sup <= 0.1679
