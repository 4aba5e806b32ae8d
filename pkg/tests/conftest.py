import json
import math
import os
from pathlib import Path

import pytest

CACHE_DIR = Path(os.environ.get("HYPEIG_TEST_CACHE",
                                Path.home() / ".cache" / "hypeig-tests"))

# the first distinct Bolza eigenvalues with multiplicities, computed once by
# the scan fixture below and reused across tests via the on-disk cache
BOLZA_LOW_KEY = "bolza_low_62.json"


def cache_get(key):
    path = CACHE_DIR / key
    if path.exists():
        return json.loads(path.read_text())
    return None


def cache_put(key, obj):
    CACHE_DIR.mkdir(parents=True, exist_ok=True)
    (CACHE_DIR / key).write_text(json.dumps(obj))


@pytest.fixture(scope="session")
def bolza_dec():
    from hypeig.geometry import build_decomposition
    from hypeig.surfaces import load_surface
    return build_decomposition(load_surface("bolza"))


@pytest.fixture(scope="session")
def bolza_eigs_low(bolza_dec):
    """Distinct Bolza eigenvalues with multiplicities up to lambda = 62,
    refined in extended precision (about 1e-13)."""
    cached = cache_get(BOLZA_LOW_KEY)
    if cached is not None:
        return [(float(a), int(b)) for a, b in cached]
    from hypeig.search import ScanConfig, scan
    from hypeig.surfaces import PRESETS
    cfg = ScanConfig(lam_min=0.5, lam_max=62.0, delta=0.02, coarse=0.04,
                     mode="fast", threads=2, surface_doc=PRESETS["bolza"])
    cfg.high_precision()
    cert = scan(bolza_dec, cfg)
    rows = [(e.lam_point, e.multiplicity) for e in cert.enclosures]
    cache_put(BOLZA_LOW_KEY, rows)
    return rows


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running checks")
    config.addinivalue_line("markers", "acceptance: full acceptance criteria")


@pytest.fixture(scope="session")
def bolza_lengths():
    from hypeig.surfaces import data_file
    from hypeig.trace import load_length_spectrum
    return load_length_spectrum(data_file("bolza_lengths.txt"))
