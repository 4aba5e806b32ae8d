"""Scanning a spectral window, locating eigenvalues, and certifying them.

Fast mode drives everything in double precision: the smallest generalized
singular value of (B, C) is sampled on a grid, local minima are bracketed
and refined by fitting the two straight branches of the V-shaped dip, and
multiplicities are read off the number of collapsed singular values of the
equilibrated jump matrix.

Rigorous mode re-assembles the matrices with validated radial data at the
located points and certifies an interval around each eigenvalue from the
residual of the numeric singular vector (quasi-mode route: the piecewise
polynomial basis is the test function, so its defect against the eigenvalue
equation enters as an extra L2 term).  Exclusion radii around
eigenvalue-free points come from the certified lower bound of the smallest
generalized singular value and the Lipschitz dependence of cylinder
eigenfunctions on the spectral parameter.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rigor
from .assembly import (MatrixSet, assemble, build_piece_bases, equilibrate,
                       generalized_sigmas, smallest_generalized_singular,
                       smallest_singular)
from .defect import (gram_quadratic_lower, quasi_mode_norm_certified,
                     residual_norm_certified, simpson_defect)
from .geometry import SurfaceDecomposition, make_grids
from .intervals import IA, interval_matvec, interval_norm2_upper
from .radial import TruncationPrecondition, min_admissible_n, truncation_bound


@dataclass(frozen=True)
class EigenvalueEnclosure:
    lam_lo: float
    lam_hi: float
    multiplicity: int
    residual: float  # certified upper bound on ||B0 v||
    tau: float
    quasi_mode: float  # certified bound on the quasi-mode defect eta
    lam_point: float

    @property
    def width(self) -> float:
        return self.lam_hi - self.lam_lo

    def to_dict(self) -> dict:
        return {
            "lambda_lo": self.lam_lo,
            "lambda_hi": self.lam_hi,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "tau": self.tau,
            "quasi_mode": self.quasi_mode,
        }


@dataclass(frozen=True)
class Exclusion:
    lam_lo: float
    lam_hi: float
    lam_point: float
    sigma_lower: float

    def to_dict(self) -> dict:
        return {"lambda_lo": self.lam_lo, "lambda_hi": self.lam_hi,
                "lambda_point": self.lam_point, "sigma_lower": self.sigma_lower}


@dataclass
class SpectrumCertificate:
    window: tuple[float, float]
    enclosures: list[EigenvalueEnclosure]
    exclusions: list[Exclusion]
    gaps: list[tuple[float, float]]
    scan_points: np.ndarray
    scan_sigmas: np.ndarray
    mode: str
    n_four: int
    delta: float

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "mode": self.mode,
            "order": self.n_four,
            "delta": self.delta,
            "enclosures": [e.to_dict() for e in self.enclosures],
            "exclusions": [e.to_dict() for e in self.exclusions],
            "gaps": [list(g) for g in self.gaps],
        }


def auto_order(dec: SurfaceDecomposition, lam: float, extra: int = 12) -> int:
    n = 0
    for p in dec.pieces:
        n = max(n, min_admissible_n(lam, p.ell, p.rho_max))
    return n + extra


# -- worker-pool sigma evaluations ------------------------------------------

_WORK = {}


def _pool_init(surface_doc, delta, n_four):
    from .surfaces import fn_from_dict
    from .geometry import build_decomposition
    os.environ.setdefault("OMP_NUM_THREADS", "1")
    dec = build_decomposition(fn_from_dict(surface_doc))
    _WORK["dec"] = dec
    _WORK["grids"] = make_grids(dec, delta)
    _WORK["n_four"] = n_four


def _pool_eval(lam):
    return lam, sigma_bc_fast(_WORK["dec"], _WORK["grids"], lam, _WORK["n_four"])


def _refine_bracket(dec, grids, lo, hi, n_four, refine_delta, refine_extra, use_f128):
    lam0 = refine_minimum(dec, grids, lo, hi, n_four, use_f128=False)
    grids_hi = make_grids(dec, refine_delta)
    n_hi = max(n_four, auto_order(dec, lam0, extra=refine_extra))
    lam_star = refine_minimum(dec, grids_hi, lam0 - 2e-4, lam0 + 2e-4, n_hi,
                              use_f128=use_f128)
    mult, res = multiplicity_at(dec, grids_hi, lam_star, n_hi)
    return lam_star, mult, res


def _pool_refine(args):
    lo, hi, n_four, refine_delta, refine_extra, use_f128 = args
    return _refine_bracket(_WORK["dec"], _WORK["grids"], lo, hi, n_four,
                           refine_delta, refine_extra, use_f128)


def sigma_bc(dec: SurfaceDecomposition, grids, lam: float, n_four: int,
             dtype=np.float64, step_cap: float = 0.22) -> float:
    ms = assemble(dec, grids, lam, n_four, dtype=dtype, step_cap=step_cap)
    s = generalized_sigmas(ms.b, ms.c)
    return float(s[-1])


def sigma_bc_fast(dec: SurfaceDecomposition, grids, lam: float, n_four: int) -> float:
    """Coarse-scan variant: smallest singular value from the Gram matrix,
    accurate only down to about sqrt(eps) of scale, which locating minima
    does not mind."""
    ms = assemble(dec, grids, lam, n_four)
    bs, cs, _ = equilibrate(ms.b, ms.c)
    q, r = np.linalg.qr(cs)
    x = np.linalg.solve(r.T, bs.T).T
    w = np.linalg.eigvalsh(x.T @ x)
    return float(math.sqrt(max(w[0], 1e-36)))


def b0_sigmas(dec: SurfaceDecomposition, grids, lam: float, n_four: int,
              dtype=np.float64, step_cap: float = 0.22):
    ms = assemble(dec, grids, lam, n_four, dtype=dtype, step_cap=step_cap)
    bs, cs, _ = equilibrate(ms.b0, ms.c)
    return np.linalg.svd(bs, compute_uv=False)


# -- minimum refinement -------------------------------------------------------

def _v_fit(xs, ys):
    """Intersection of the two outer secant lines of a V-shaped sample."""
    i = int(np.argmin(ys))
    if i < 2 or i > len(xs) - 3:
        return xs[i]
    (x1, y1), (x2, y2) = (xs[0], ys[0]), (xs[i - 1], ys[i - 1])
    (x3, y3), (x4, y4) = (xs[i + 1], ys[i + 1]), (xs[-1], ys[-1])
    sl = (y2 - y1) / (x2 - x1)
    sr = (y4 - y3) / (x4 - x3)
    if sl >= 0 or sr <= 0:
        return xs[i]
    return (y3 - y1 + sl * x1 - sr * x3) / (sl - sr)


def _vfit_rounds(f, center, h, rounds, h_floor):
    for _ in range(rounds):
        for _walk in range(12):
            xs = np.array([center - h, center - h / 2.5, center,
                           center + h / 2.5, center + h])
            ys = np.array([f(x) for x in xs])
            i = int(np.argmin(ys))
            if i == 0:
                center -= 2.0 * h
            elif i == len(xs) - 1:
                center += 2.0 * h
            else:
                break
        new = _v_fit(xs, ys)
        if not (xs[1] <= new <= xs[-2]):
            new = xs[i]
        center = float(new)
        if h <= h_floor:
            break
        h = max(h / 12.0, h_floor)
    return center


def refine_minimum(dec, grids, lam_lo: float, lam_hi: float, n_four: int,
                   f: None = None, use_f128: bool = True):
    """Locate the minimum of sigma_1(B, C) inside a bracket to high accuracy:
    golden-section bracketing, then secant fits of the two V branches, then
    the same fits on extended-precision evaluations."""
    if f is None:
        f = lambda x, dt=np.float64, cap=0.22: sigma_bc(dec, grids, x, n_four,
                                                        dtype=dt, step_cap=cap)
    a, b = lam_lo, lam_hi
    if b - a > 1e-3:
        gr = 0.5 * (math.sqrt(5.0) - 1.0)
        x1 = b - gr * (b - a)
        x2 = a + gr * (b - a)
        f1, f2 = f(x1), f(x2)
        for _ in range(60):
            if b - a < 1e-6:
                break
            if f1 <= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - gr * (b - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + gr * (b - a)
                f2 = f(x2)
    center = 0.5 * (a + b)
    center = _vfit_rounds(f, center, max(0.35 * (b - a), 1e-6), 4, 1e-10)
    if use_f128 and np.finfo(np.longdouble).eps < 1e-18:
        f128 = lambda x: f(x, np.longdouble, 0.13)
        center = _vfit_rounds(f128, center, 1e-8, 3, 2e-12)
    return center


def multiplicity_at(dec, grids, lam: float, n_four: int) -> tuple[int, float]:
    """Count collapsed generalized singular values at a located minimum."""
    ms = assemble(dec, grids, lam, n_four)
    s = np.sort(generalized_sigmas(ms.b, ms.c))
    floor = max(float(s[0]), 1e-16)
    k = 1
    while k < min(len(s), 12) and s[k] < max(200.0 * floor, 1e-10):
        k += 1
    if k < len(s) and s[k] < 50.0 * s[k - 1]:
        # no clean gap; do not overclaim
        k = 1
    return k, floor


# -- certification -------------------------------------------------------------

class CertificationFailure(RuntimeError):
    pass


def _optimized_vectors(ms: MatrixSet, count: int, extra: int = 6) -> list[np.ndarray]:
    """Unit vectors minimizing ||B0 v|| within the span of the smallest
    equilibrated singular directions, re-optimized in natural coordinates."""
    bs, cs, dscale = equilibrate(ms.b0, ms.c)
    u, s, vt = np.linalg.svd(bs, full_matrices=False)
    q = min(count + extra, vt.shape[0])
    m2 = (vt[-q:] * dscale).T.astype(np.longdouble)  # (n, q)
    qmat = m2.copy()
    rmat = np.zeros((q, q), dtype=np.longdouble)
    for j in range(q):
        for i in range(j):
            rmat[i, j] = qmat[:, i] @ qmat[:, j]
            qmat[:, j] = qmat[:, j] - rmat[i, j] * qmat[:, i]
        rmat[j, j] = np.sqrt(qmat[:, j] @ qmat[:, j])
        qmat[:, j] = qmat[:, j] / rmat[j, j]
    m1 = ms.b0.astype(np.longdouble) @ m2
    x = np.linalg.solve(rmat.T.astype(np.float64), m1.astype(np.float64).T).T
    u2, s2, v2 = np.linalg.svd(x, full_matrices=False)
    out = []
    for j in range(count):
        y = v2[-1 - j]
        c = np.linalg.solve(rmat.astype(np.float64), y)
        v = (m2.astype(np.float64)) @ c
        out.append(v / math.sqrt(float(v @ v)))
    return out


def certify(dec: SurfaceDecomposition, lam: float, n_four: int, delta: float,
            count: int = 1, constants: rigor.ConstantsReport | None = None,
            tol: float = 1e-10) -> EigenvalueEnclosure:
    """Certified eigenvalue enclosure around lam from the residual of the
    numeric singular vector(s); the piecewise-polynomial basis itself is the
    quasi-mode, so its equation defect enters as the extra L2 term."""
    grids = make_grids(dec, delta)
    ms = assemble(dec, grids, lam, n_four, dtype=np.longdouble, step_cap=0.13)
    if constants is None:
        constants = rigor.constants_for(dec, lam)
    coupling = constants.coupling
    vecs = _optimized_vectors(ms, count)
    taus, etas, residuals = [], [], []
    for v in vecs:
        res = residual_norm_certified(ms, v)
        defect = simpson_defect(ms, v)
        norm_lb = gram_quadratic_lower(ms, v)
        if norm_lb <= 0:
            raise CertificationFailure("could not certify a positive quasi-mode norm")
        f_norm = math.sqrt(res * res + defect)
        taus.append(coupling * f_norm / norm_lb)
        etas.append(quasi_mode_norm_certified(ms, v) / norm_lb)
        residuals.append(res)
    if count > 1:
        tau = math.sqrt(count) * max(taus)
        eta = math.sqrt(count) * max(etas)
    else:
        tau, eta = taus[0], etas[0]
    if tau >= 1.0:
        raise CertificationFailure(
            f"tau = {tau:.3e} >= 1; grid too coarse or order too small")
    radius = ((1.0 + lam) * tau + eta) / (1.0 - tau)
    return EigenvalueEnclosure(
        lam_lo=lam - radius, lam_hi=lam + radius, multiplicity=count,
        residual=max(residuals), tau=tau, quasi_mode=eta, lam_point=lam)


# -- exclusion ------------------------------------------------------------------

def exclude(dec: SurfaceDecomposition, lam_point: float, n_four: int, delta: float,
            constants_lo=None) -> Exclusion:
    """Certified eigenvalue-free radius around lam_point (zero when the
    certified singular value is below the truncation floor)."""
    if lam_point <= 0.2501:
        return Exclusion(lam_point, lam_point, lam_point, 0.0)
    grids = make_grids(dec, delta)
    ms = assemble(dec, grids, lam_point, n_four, validated=True)
    rep = smallest_generalized_singular(ms)
    sigma_lb = rep.lower
    if sigma_lb <= 0:
        return Exclusion(lam_point, lam_point, lam_point, sigma_lb)
    r_prime = math.sqrt(lam_point - 0.25)
    radius_s = 0.0
    for _ in range(3):
        lam_hi = 0.25 + (r_prime + radius_s) ** 2 + 1e-12
        c1 = rigor.boundary_lower_bound_c1(lam_hi, dec)
        beta = 0.0
        try:
            for p in dec.pieces:
                tb = truncation_bound(lam_hi, p.ell, p.rho_max, n_four)
                beta = max(beta, tb.beta_c1)
        except TruncationPrecondition:
            return Exclusion(lam_point, lam_point, lam_point, sigma_lb)
        phi_sup = rigor.sup_norm_bound(lam_hi, dec.systole_lower)
        phi_c1 = rigor.c1_norm_bound(lam_hi, dec.systole_lower)
        ctil = rigor.kernel_lipschitz(lam_point, lam_hi, dec)
        floor = (2.0 * math.sqrt(2.0) / c1) * beta * phi_sup
        if sigma_lb <= floor:
            return Exclusion(lam_point, lam_point, lam_point, sigma_lb)
        radius_s = (sigma_lb * c1 / (2.0 * math.sqrt(2.0)) - beta * phi_sup) / (ctil * phi_c1)
    lam_lo = 0.25 + max(r_prime - radius_s, 0.0) ** 2
    lam_hi = 0.25 + (r_prime + radius_s) ** 2
    return Exclusion(lam_lo, lam_hi, lam_point, sigma_lb)


# -- the scan -------------------------------------------------------------------

@dataclass
class ScanConfig:
    lam_min: float
    lam_max: float
    n_four: int | None = None
    delta: float = 0.02
    coarse: float = 0.05
    mode: str = "fast"
    threads: int = 1
    refine_f128: bool = False
    refine_delta: float = 0.0125
    refine_extra: int = 16
    exclusion_budget: int = 0
    surface_doc: dict | None = None

    def high_precision(self):
        """Settings for trace-formula-grade eigenvalues (about 1e-13)."""
        self.refine_f128 = True
        self.refine_delta = 0.005
        self.refine_extra = 36
        return self


def scan(dec: SurfaceDecomposition, cfg: ScanConfig) -> SpectrumCertificate:
    a, b = cfg.lam_min, cfg.lam_max
    if not 0.0 < a < b:
        raise ValueError("window must satisfy 0 < min < max")
    n_four = cfg.n_four or auto_order(dec, b)
    grids = make_grids(dec, cfg.delta)
    lams = np.arange(a, b + cfg.coarse, cfg.coarse)
    if cfg.threads > 1 and cfg.surface_doc is not None and len(lams) > 16:
        with ProcessPoolExecutor(max_workers=cfg.threads, initializer=_pool_init,
                                 initargs=(cfg.surface_doc, cfg.delta, n_four)) as ex:
            results = list(ex.map(_pool_eval, lams, chunksize=8))
        sig = np.array([r[1] for r in sorted(results)])
    else:
        sig = np.array([sigma_bc_fast(dec, grids, x, n_four) for x in lams])
    # local minima of the profile
    minima = []
    for i in range(1, len(lams) - 1):
        if sig[i] <= sig[i - 1] and sig[i] <= sig[i + 1] and sig[i] < 0.5 * min(sig[0], sig[-1]) + 0.5:
            if sig[i] < 0.25 * (sig[i - 1] + sig[i + 1]):
                minima.append(i)
    enclosures = []
    grids_hi = make_grids(dec, cfg.refine_delta)
    brackets = [(lams[max(i - 1, 0)], lams[min(i + 1, len(lams) - 1)]) for i in minima]
    if cfg.threads > 1 and cfg.surface_doc is not None and len(brackets) > 2:
        with ProcessPoolExecutor(max_workers=cfg.threads, initializer=_pool_init,
                                 initargs=(cfg.surface_doc, cfg.delta, n_four)) as ex:
            args = [(lo, hi, n_four, cfg.refine_delta, cfg.refine_extra,
                     cfg.refine_f128) for lo, hi in brackets]
            refined = list(ex.map(_pool_refine, args))
    else:
        refined = [_refine_bracket(dec, grids, lo, hi, n_four, cfg.refine_delta,
                                   cfg.refine_extra, cfg.refine_f128)
                   for lo, hi in brackets]
    for lam_star, mult, res in refined:
        if not (a <= lam_star <= b):
            continue
        if cfg.mode == "rigorous":
            try:
                enc = certify(dec, lam_star, n_four, cfg.delta, count=mult)
            except CertificationFailure:
                enc = certify(dec, lam_star, n_four, cfg.delta, count=1)
                enc = EigenvalueEnclosure(
                    lam_lo=enc.lam_lo, lam_hi=enc.lam_hi, multiplicity=mult,
                    residual=enc.residual, tau=enc.tau, quasi_mode=enc.quasi_mode,
                    lam_point=enc.lam_point)
            enclosures.append(enc)
        else:
            width = max(1e-11, 10.0 * res)
            enclosures.append(EigenvalueEnclosure(
                lam_lo=lam_star - width, lam_hi=lam_star + width,
                multiplicity=mult, residual=res, tau=math.nan,
                quasi_mode=math.nan, lam_point=lam_star))
    enclosures.sort(key=lambda e: e.lam_point)
    merged = []
    for e in enclosures:
        if merged and e.lam_lo <= merged[-1].lam_hi:
            prev = merged.pop()
            merged.append(EigenvalueEnclosure(
                lam_lo=min(prev.lam_lo, e.lam_lo), lam_hi=max(prev.lam_hi, e.lam_hi),
                multiplicity=max(prev.multiplicity, e.multiplicity),
                residual=max(prev.residual, e.residual),
                tau=max(prev.tau, e.tau), quasi_mode=max(prev.quasi_mode, e.quasi_mode),
                lam_point=prev.lam_point))
        else:
            merged.append(e)
    exclusions = []
    gaps = [(a, b)]
    if cfg.mode == "rigorous" and cfg.exclusion_budget > 0:
        exclusions, gaps = _exclusion_sweep(dec, cfg, merged, n_four)
    return SpectrumCertificate(window=(a, b), enclosures=merged, exclusions=exclusions,
                               gaps=gaps, scan_points=lams, scan_sigmas=sig,
                               mode=cfg.mode, n_four=n_four, delta=cfg.delta)


def _exclusion_sweep(dec, cfg, enclosures, n_four):
    """March exclusion balls across the window, skipping enclosures; stop when
    the budget runs out and report the remainder as gaps."""
    a, b = cfg.lam_min, cfg.lam_max
    segs = []
    cur = a
    for e in enclosures:
        if e.lam_lo > cur:
            segs.append((cur, e.lam_lo))
        cur = max(cur, e.lam_hi)
    if cur < b:
        segs.append((cur, b))
    exclusions = []
    gaps = []
    budget = cfg.exclusion_budget
    for lo, hi in segs:
        x = lo
        while x < hi and budget > 0:
            ex = exclude(dec, x, n_four, cfg.delta)
            budget -= 1
            if ex.lam_hi <= x:
                gaps.append((x, hi))
                break
            exclusions.append(ex)
            x = ex.lam_hi
        else:
            if x < hi:
                gaps.append((x, hi))
    return exclusions, gaps
