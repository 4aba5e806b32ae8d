import math

import numpy as np
import pytest

from hypeig.geometry import (Curve, FenchelNielsen, GraphError,
                             build_decomposition, make_grids,
                             min_nonadjacent_side_distance, perp_distance)
from hypeig.hypmath import acosh_root, parse_length_expr
from hypeig.surfaces import PRESETS, fn_from_dict, load_surface


def hexagon_perp(la, lb, lc):
    # independent right-angled hexagon oracle via the logarithm form
    num = math.cosh(lc / 2.0) + math.cosh(la / 2.0) * math.cosh(lb / 2.0)
    den = math.sinh(la / 2.0) * math.sinh(lb / 2.0)
    x = num / den
    return math.log(x + math.sqrt(x * x - 1.0))


def equilateral(ell, twist=0.0):
    return fn_from_dict({
        "genus": 2,
        "curves": [{"length": ell, "twist": twist}] * 3,
        "pants": [[[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]],
    })


class TestFenchelNielsen:
    def test_bolza_curve_lengths_match_log_form(self):
        fn = load_surface("bolza")
        assert fn.curves[0].length == pytest.approx(2 * acosh_root(3 + 2 * math.sqrt(2)), abs=1e-12)
        assert fn.curves[1].length == pytest.approx(2 * acosh_root(1 + math.sqrt(2)), abs=1e-12)
        assert abs(fn.curves[0].length - 4.896904) < 1e-6
        assert abs(fn.curves[1].length - 3.057142) < 1e-6

    def test_expression_strings_evaluate(self):
        assert parse_length_expr("2*acosh(1+sqrt(2))") == pytest.approx(3.05714183896, abs=1e-10)
        assert parse_length_expr(1.25) == 1.25

    def test_rejects_bad_valence(self):
        with pytest.raises(GraphError):
            fn_from_dict({
                "genus": 2,
                "curves": [{"length": 2.0, "twist": 0.0}] * 3,
                "pants": [[[0, 0], [1, 0]], [[0, 1], [1, 1], [2, 0], [2, 1]]],
            })

    def test_rejects_dangling_end(self):
        with pytest.raises(GraphError):
            FenchelNielsen(
                genus=2,
                curves=(Curve(2.0, 0.0),) * 3,
                pants=(((0, 0), (1, 0), (2, 0)), ((0, 1), (1, 1), (2, 0))),
            ).validate()

    def test_rejects_nonpositive_length(self):
        with pytest.raises(GraphError):
            equilateral(-1.0)

    def test_rejects_out_of_range_length(self):
        with pytest.raises(GraphError):
            equilateral(1e-9)


class TestDecomposition:
    def test_bolza_piece_and_curve_counts(self):
        dec = build_decomposition(load_surface("bolza"))
        assert dec.n_pieces == 2
        assert sum(1 for s in dec.segments if s.curve is not None) == 3
        assert sum(1 for s in dec.segments if s.curve is None) == 2

    @pytest.mark.parametrize("name", ["bolza", "d6z2", "rocha-pollicott-1",
                                      "gutzwiller", "genus3-double"])
    def test_gauss_bonnet_area(self, name):
        dec = build_decomposition(load_surface(name))
        assert dec.area == pytest.approx(4 * math.pi * (dec.genus - 1), abs=1e-12)

    def test_equilateral_cut_length_is_acosh2(self):
        ell = 2 * math.acosh(2.0)
        dec = build_decomposition(equilateral(ell))
        seams = [s.length for s in dec.segments if s.curve is None]
        assert seams[0] == pytest.approx(math.acosh(2.0), abs=1e-12)
        assert seams[0] == pytest.approx(1.316958, abs=1e-6)

    def test_seam_lengths_match_hexagon_oracle(self):
        for name in ("bolza", "rocha-pollicott-1", "aurich-steiner"):
            fn = load_surface(name)
            dec = build_decomposition(fn)
            for seg in dec.segments:
                if seg.curve is not None:
                    continue
                pants = dec.pieces[seg.side_a.piece].pants
                lens = [fn.curves[cid].length for cid, _ in fn.pants[pants]]
                core = dec.pieces[seg.side_a.piece].ell
                rest = list(lens)
                rest.remove(core)
                expect = hexagon_perp(rest[0], rest[1], core)
                assert seg.length == pytest.approx(expect, abs=1e-12)

    def test_pairing_involution_without_fixed_points(self):
        dec = build_decomposition(load_surface("aurich-steiner"))
        for seg in dec.segments:
            u = np.linspace(0.0, seg.length, 7)
            u2 = seg.partner_u(seg.partner_u(u))
            circ = np.mod(u2 - u + seg.length / 2.0, seg.length) - seg.length / 2.0
            assert np.allclose(circ, 0.0, atol=1e-12)
            assert seg.side_a is not seg.side_b

    def test_core_choice_minimizes_enclosure(self):
        dec = build_decomposition(load_surface("rocha-pollicott-1"))
        # the long curve (5.05) gives the flattest enclosing cylinder
        assert all(p.ell == pytest.approx(5.05) for p in dec.pieces)

    def test_piece_inside_enclosing_cylinder(self):
        dec = build_decomposition(load_surface("bolza"))
        for p in dec.pieces:
            assert 0 < p.rho_inv < p.rho_max
            assert p.halfwidth(0.25) > p.rho_max


class TestMinSideDistance:
    def test_never_exceeds_systole(self):
        for name in ("bolza", "d6z2", "rocha-pollicott-2"):
            dec = build_decomposition(load_surface(name))
            assert min_nonadjacent_side_distance(dec) <= dec.systole_lower + 1e-15
            assert min_nonadjacent_side_distance(dec) > 0

    def test_doubling_lengths_increases_distance_when_systole_bound(self):
        # systole-dominated regime of the equilateral family
        d1 = build_decomposition(equilateral(1.0))
        d2 = build_decomposition(equilateral(2.0))
        assert min_nonadjacent_side_distance(d2) > min_nonadjacent_side_distance(d1)


class TestGrids:
    def test_simpson_grid_examples(self):
        fn = equilateral(2 * math.acosh(2.0))
        dec = build_decomposition(fn)
        grids = make_grids(dec, 0.35)
        # direct check on the formula via a segment of length 1.0
        for grid, seg in zip(grids, dec.segments):
            assert grid.n % 2 == 1 and grid.n >= 3
            assert grid.delta <= 0.35 + 1e-15
            assert grid.delta == pytest.approx(seg.length / (grid.n - 1))
            w = grid.weights
            assert w[0] == 1 and w[-1] == 1
            assert set(w[1:-1:2]) == {4.0}
            assert grid.n == 3 or set(w[2:-1:2]) == {2.0}
            # composite rule exact on constants
            assert np.sum(w) * grid.delta / 3.0 == pytest.approx(seg.length, rel=1e-14)

    def test_point_counts_from_target(self):
        # length 1.0 with target 0.35 -> n=5, delta=0.25; target 1.0 -> n=3
        for target, n_expect, d_expect in ((0.35, 5, 0.25), (1.0, 3, 0.5)):
            n_sub = max(2, math.ceil(1.0 / target))
            if n_sub % 2 == 1:
                n_sub += 1
            assert n_sub + 1 == n_expect
            assert 1.0 / n_sub == pytest.approx(d_expect)

    def test_mirrored_grids(self):
        dec = build_decomposition(load_surface("bolza"))
        grids = make_grids(dec, 0.3)
        for grid in grids:
            seg = dec.segments[grid.segment]
            pu = seg.partner_u(grid.points_u)
            assert len(pu) == grid.n
            back = seg.partner_u(pu)
            assert np.allclose(np.mod(back - grid.points_u, seg.length), 0.0, atol=1e-12) or \
                np.allclose(np.mod(back - grid.points_u + seg.length / 2, seg.length),
                            seg.length / 2, atol=1e-12)
