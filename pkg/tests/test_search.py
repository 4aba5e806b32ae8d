import math

import numpy as np
import pytest

from hypeig.geometry import build_decomposition, make_grids
from hypeig.search import (EigenvalueEnclosure, ScanConfig, auto_order, certify,
                           exclude, multiplicity_at, refine_minimum, scan)
from hypeig.surfaces import load_surface

GOLDEN_LAM1 = 3.8388872588421995


@pytest.fixture(scope="module")
def bolza():
    return build_decomposition(load_surface("bolza"))


class TestEnclosureArithmetic:
    def test_interval_formula(self):
        # radius ((1+lam) tau + eta) / (1 - tau): lam=1, tau=1/2, eta=0 -> [-1, 3]
        lam, tau, eta = 1.0, 0.5, 0.0
        radius = ((1.0 + lam) * tau + eta) / (1.0 - tau)
        assert (lam - radius, lam + radius) == (-1.0, 3.0)


class TestRefinement:
    def test_locates_golden_eigenvalue(self, bolza):
        grids = make_grids(bolza, 0.0125)
        lam = refine_minimum(bolza, grids, 3.83, 3.85, 30, use_f128=False)
        assert lam == pytest.approx(GOLDEN_LAM1, abs=5e-10)

    def test_multiplicity_detection(self, bolza):
        grids = make_grids(bolza, 0.02)
        mult, res = multiplicity_at(bolza, grids, GOLDEN_LAM1, 24)
        assert mult == 3
        mult1, _ = multiplicity_at(bolza, grids, 3.6, 24)
        assert mult1 == 1


@pytest.mark.slow
class TestCertification:
    def test_certified_enclosure_contains_golden(self, bolza):
        enc = certify(bolza, GOLDEN_LAM1, 40, 0.005, count=1)
        assert enc.lam_lo < GOLDEN_LAM1 < enc.lam_hi
        assert enc.width <= 2e-6
        assert enc.residual <= 1e-10
        assert enc.tau < 1e-5
        assert enc.quasi_mode < 1e-6

    def test_stability_under_refinement(self, bolza):
        # re-certifying at the midpoint with a higher order still succeeds
        enc = certify(bolza, GOLDEN_LAM1, 36, 0.008, count=1)
        mid = 0.5 * (enc.lam_lo + enc.lam_hi)
        enc2 = certify(bolza, mid, 44, 0.008, count=1)
        assert enc2.lam_lo <= GOLDEN_LAM1 <= enc2.lam_hi
        assert enc2.lam_lo < enc.lam_hi and enc.lam_lo < enc2.lam_hi

    def test_exclusion_midgap_positive_radius(self, bolza):
        ex = exclude(bolza, 4.6, 40, 0.01)
        assert ex.sigma_lower > 0
        assert ex.lam_hi > 4.6 > ex.lam_lo
        assert not (ex.lam_lo <= GOLDEN_LAM1 <= ex.lam_hi)

    def test_exclusion_zero_radius_on_floor(self, bolza):
        # sigma lower bound of 0 cannot exclude anything
        ex = exclude(bolza, 0.24, 40, 0.01)
        assert ex.lam_hi == ex.lam_lo


class TestScanWindow:
    def test_empty_window_has_no_enclosures(self, bolza):
        cfg = ScanConfig(lam_min=0.2, lam_max=1.0, n_four=18, delta=0.03,
                         coarse=0.08)
        cert = scan(bolza, cfg)
        assert cert.enclosures == []

    def test_window_orders(self, bolza):
        assert auto_order(bolza, 4.0) >= 5
        with pytest.raises(ValueError):
            scan(bolza, ScanConfig(lam_min=-1.0, lam_max=2.0))

    def test_certificate_roundtrip(self, bolza, tmp_path):
        import json
        cfg = ScanConfig(lam_min=3.7, lam_max=3.95, n_four=20, delta=0.025,
                         coarse=0.05)
        cert = scan(bolza, cfg)
        assert len(cert.enclosures) == 1
        doc = cert.to_dict()
        path = tmp_path / "cert.json"
        path.write_text(json.dumps(doc))
        doc2 = json.loads(path.read_text())
        assert doc2 == doc
        e = cert.enclosures[0]
        assert e.lam_point == pytest.approx(GOLDEN_LAM1, abs=1e-7)
        assert e.multiplicity == 3

    def test_deterministic_rerun(self, bolza):
        import json
        cfg = ScanConfig(lam_min=3.75, lam_max=3.9, n_four=16, delta=0.04,
                         coarse=0.075)
        docs = []
        for _ in range(2):
            cert = scan(bolza, cfg)
            docs.append(json.dumps(cert.to_dict(), sort_keys=True))
        assert docs[0] == docs[1]
