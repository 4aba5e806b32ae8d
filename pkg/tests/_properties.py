"""Shared randomized property checks used by unit and acceptance tests."""

import math

import numpy as np

from hypeig.radial import RadialBasis


def random_cases(n, seed=20260808):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k = int(rng.integers(0, 21))
        lam = float(rng.uniform(0.05, 50.0))
        ell = float(rng.uniform(1.5, 6.0))
        yield k, lam, ell


def check_energy_and_growth(k, lam, ell):
    """Discrete versions of the energy-monotonicity and growth comparison
    bounds for the angle form of the radial equation."""
    q = 2 * math.pi * k / ell
    b = RadialBasis(ell=ell, lam=lam, n_four=max(k, 1), r_max=1.6)
    r = np.linspace(0.0, 1.5, 61)
    phi = np.arctan(r)
    v, d = b.eval(r)
    val = v[:, k, 0]
    dp = (1.0 + r * r) * d[:, k, 0]
    pot = q * q - lam / np.cos(phi) ** 2
    mask = np.abs(pot) > 1e-6
    energy = val ** 2 - dp ** 2 / np.where(mask, pot, 1.0)
    run = np.nonzero(mask[:-1] & mask[1:] & (np.sign(pot[:-1]) == np.sign(pot[1:])))[0]
    diffs = energy[run + 1] - energy[run]
    if not np.all(diffs <= 1e-9 * np.maximum(1.0, np.abs(energy[run]))):
        return False
    pos = pot >= 0
    if pos[0] and val[0] >= 0 and dp[0] >= 0 and np.all(pos[:10]):
        c = np.concatenate([[0.0], np.cumsum(
            np.sqrt(np.abs(pot[1:10])) * np.diff(phi[:10]))])
        lower = val[0] * np.cosh(c)
        if pot[0] > 0:
            lower = lower + dp[0] / math.sqrt(pot[0]) * np.sinh(c)
        if not np.all(val[:10] >= lower * (1.0 - 1e-10) - 1e-12):
            return False
    return True
