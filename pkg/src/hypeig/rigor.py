"""Analytic constants feeding the certification and exclusion steps.

Everything here returns plain floats that are one-sided bounds (upper
bounds, except the boundary-data constant c1 which is a lower bound).
Rigorous-mode values come from closed forms or from crude but safe
estimates; fast mode may add tighter non-certified numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import SurfaceDecomposition

EULER_GAMMA = 0.5772156649015328606


# -- the fourth-derivative clamped-beam root nu --------------------------------

def nu_root(tol: float = 1e-14) -> float:
    """Smallest positive root of cosh(x) cos(x) = 1, by bisection."""
    f = lambda x: math.cosh(x) * math.cos(x) - 1.0
    lo, hi = 4.0, 5.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


NU = 4.730040744862704


# -- resolvent constants for the half-plane ------------------------------------

def resolvent_constants(mode: str = "rigorous") -> tuple[float, float]:
    """(C1, C2): norm constants of the half-plane resolvent applied to
    single-layer and dipole-layer data on a geodesic.

    Rigorous mode evaluates the closed-form bounds (<= 1.75 and <= 1.61);
    fast mode returns the tighter quadrature values, which are not certified.
    """
    if mode == "fast":
        return resolvent_constants_quadrature()
    ac3 = math.acosh(3.0)
    alpha1 = 3.0 * math.pi + 6.0 * math.atan(1.0 / (2.0 * math.sqrt(2.0))) - 12.0 * math.sqrt(2.0)
    alpha2 = (math.sqrt(2.0)
              + math.log(math.tanh(0.25 * math.log(3.0 + 2.0 * math.sqrt(2.0))))
              + 8.0 * (ac3 * math.log(1.0 + 4.0 / ac3 ** 2)
                       + 4.0 * math.atan(ac3 / 2.0)) / math.pi)
    c1 = 0.125 * math.sqrt((3.0 - 2.0 * math.sqrt(2.0)) * alpha1 ** 2
                           + math.sqrt(2.0) * alpha2 ** 2)
    c2 = (math.sqrt(3.0) / 16.0) * math.sqrt(
        (27.0 - 16.0 * math.sqrt(2.0))
        * (5.0 * math.sqrt(2.0) - 6.0 * math.pi + 12.0 * math.atan(math.sqrt(2.0))) ** 2
        + 48.0 * (2.0 * math.sqrt(2.0) + ac3))
    return c1, c2


def _kernel_f(u: np.ndarray, s: float) -> np.ndarray:
    """F_s(u) for real s > 0 by Gauss-Jacobi quadrature of the defining integral."""
    n = 80
    j = np.arange(1, n + 1)
    # Gauss-Chebyshev (second kind) nodes handle the (xi(1-xi))^{1/2} weight
    x = np.cos(j * np.pi / (n + 1))
    wgt = np.pi / (n + 1) * np.sin(j * np.pi / (n + 1)) ** 2
    xi = 0.5 * (x + 1.0)
    vals = (0.25 * (1.0 - x ** 2)) ** (s - 1.5) * (xi[None, :] + u[:, None]) ** (-s)
    return (vals * wgt[None, :]).sum(axis=1) * 0.5 / (4.0 * math.pi)


def resolvent_constants_quadrature() -> tuple[float, float]:
    """Direct numerical evaluation of the two defining double integrals."""
    s = 1.5
    rho = np.linspace(1e-4, 12.0, 1600)
    t = np.linspace(1e-4, 14.0, 1800)
    dr = rho[1] - rho[0]
    dt = t[1] - t[0]
    u = 0.5 * (np.cosh(t)[None, :] * np.cosh(rho)[:, None] - 1.0)
    f = _kernel_f(u.ravel(), s).reshape(u.shape)
    inner = 2.0 * f.sum(axis=1) * dt
    c1 = math.sqrt(float((inner ** 2 * np.cosh(rho) * 2.0).sum() * dr) / 2.0)
    # C2 kernel: |F'_s(u)| via the differentiated integrand
    n = 80
    jj = np.arange(1, n + 1)
    x = np.cos(jj * np.pi / (n + 1))
    wgt = np.pi / (n + 1) * np.sin(jj * np.pi / (n + 1)) ** 2
    xi = 0.5 * (x + 1.0)
    uu = u.ravel()
    vals = s * (0.25 * (1.0 - x ** 2)) ** (s - 1.5) * (xi[None, :] + uu[:, None]) ** (-s - 1.0)
    fp = (vals * wgt[None, :]).sum(axis=1) * 0.5 / (4.0 * math.pi)
    fp = fp.reshape(u.shape)
    inner2 = 2.0 * fp.sum(axis=1) * dt
    c2sq = ((inner2 ** 2) * (np.sinh(rho) / 2.0) ** 2 * np.cosh(rho) * 2.0).sum() * dr
    return c1, math.sqrt(float(c2sq) / 2.0)


# -- coupling constant ----------------------------------------------------------

def coupling_constant(side_distance: float, genus: int, n_sides: int | None = None) -> float:
    """Constant C mapping boundary-jump L2 norms to an H^-2 bound on the
    distributional defect; cubic-spline cutoffs of width L give
    gradient and laplacian norms 3/L and 33/L^2 + 3/L."""
    if side_distance <= 0:
        raise ValueError("side distance must be positive")
    lmin = side_distance
    poly = 33.0 / lmin ** 2 + 6.0 / lmin + 1.0
    if genus == 2:
        return 12.0 * poly
    c1, c2 = resolvent_constants("rigorous")
    if n_sides is None:
        n_sides = 10 * (genus - 1)  # five sides per cut-open pants
    n_cover = 2 * n_sides + 1
    return math.sqrt(c1 * c1 + c2 * c2) * math.sqrt(n_cover) * poly


# -- eigenfunction bounds --------------------------------------------------------

def sup_norm_bound(lam: float, sys_len: float) -> float:
    """L-infinity bound for an L2-normalized eigenfunction."""
    L = sys_len
    return math.sqrt(11.0 / (2.0 * L) * (math.sqrt(max(lam, 0.0)) + 5.0 / L) + 2.0 / 3.0)


def deriv_sup_bound(lam: float, sys_len: float) -> float:
    """Gradient sup bound for an L2-normalized eigenfunction."""
    L = sys_len
    r = math.sqrt(max(lam, 0.0))
    return math.sqrt(6.0 / L * (r + 8.0 / L) ** 3 + 1.0 / 190.0)


def c1_norm_bound(lam: float, sys_len: float) -> float:
    """Bound for the cylinder C1 norm (sup of value and both frame derivatives)."""
    s = sup_norm_bound(lam, sys_len)
    d = deriv_sup_bound(lam, sys_len)
    return math.sqrt(s * s + 2.0 * d * d)


# -- counting function and heat-trace remainder ----------------------------------

def counting_bounds(r: float, d: float, area: float) -> tuple[float, float]:
    """Two-sided bounds for the eigenvalue counting function N(r)
    (eigenvalues lam <= r^2, counted with lambda_0 = 0 included)."""
    nu = NU
    up = area / (4.0 * math.pi) * (
        r * r + (4.0 * nu ** 2 + 2.0 * nu * math.pi) / (math.pi * d) * (r + nu / d) + 1.0 / 3.0)
    lo = area / (4.0 * math.pi) * (
        r * r - 4.0 * nu ** 2 / (math.pi * d) * (r + nu / d) - 1.0 / 3.0)
    return lo, up


def heat_remainder(c: float, t: float, d: float, area: float) -> float:
    """Upper bound for sum over lam_j >= c of exp(-lam_j t), integrated form."""
    nu = NU
    a_u = (4.0 * nu ** 2 + 2.0 * nu * math.pi) / (math.pi * d)
    b_u = (4.0 * nu ** 3 + 2.0 * nu ** 2 * math.pi) / (math.pi * d * d) + 1.0 / 3.0
    a_l = 4.0 * nu ** 2 / (math.pi * d)
    b_l = 4.0 * nu ** 3 / (math.pi * d * d) + 1.0 / 3.0
    val = math.exp(-c * t) * (b_u + b_l + (a_u + a_l) * math.sqrt(max(c, 0.0)) + 1.0 / t)
    val += a_u * math.sqrt(math.pi / (4.0 * t)) * math.erfc(math.sqrt(max(c * t, 0.0)))
    return area / (4.0 * math.pi) * val


# -- cylinder resolvent bounds (Schur tests) --------------------------------------
#
# All kernel estimates below are for sigma = Re(s) = 1/2.  Near the diagonal
# the free resolvent kernel obeys
#     |F(u)|  <= (1/4pi) log((1+u)/u) + 1,
#     |F'(u)| <= 2/(4 pi u) + 1,
# and in the far field |F| <= u^{-1/2}/4, |F'| <= |s| u^{-3/2}/4.  The dipole
# kernel carries the Poisson factor |du/dn'| = sinh(rho)/2 with rho the
# distance to the segment's geodesic, which keeps its tangential integrals
# uniformly bounded.  Group translates add geometric tails in exp(-n ell / 2).

_J_LOG = math.pi ** 2 / 2.0  # integral of -2 log tanh(w/2) over (0, inf)


def _s_abs(lam: float) -> float:
    return abs(complex(0.5, math.sqrt(max(lam - 0.25, 0.0))))


def _group_tail(ell: float, halfwidth: float, dipole: bool) -> float:
    """Far-field sum over deck translates |n| >= 2.  The |n| <= 1 copies can
    come arbitrarily close to the piece and are absorbed into the near-field
    bounds with a factor 3.  For |n| >= 2 the separation gives
    cosh d_n >= cosh((n-1) ell) / cosh^2(halfwidth).  Single-layer terms sum
    u_n^{-1/2}; dipole terms sum sqrt(1+u_n)/u_n, which folds in the gradient
    factor sinh(d_n)/2 = sqrt(u_n (1+u_n))."""
    total = 0.0
    ch2 = math.cosh(halfwidth) ** 2
    for n in range(2, 2000):
        chd = math.cosh((n - 1) * ell) / ch2
        if chd <= 1.5:
            total += 4.0  # not separated; crude cap on the kernel bound
            continue
        u = 0.5 * (chd - 1.0)
        term = 2.0 * (math.sqrt(1.0 + u) / u if dipole else u ** -0.5)
        total += term
        if term < 1e-18 * max(total, 1.0):
            break
    return total


def _piece_boundary_length(dec: SurfaceDecomposition, piece: int) -> float:
    total = 0.0
    for seg in dec.segments:
        if seg.side_a.piece == piece:
            total += seg.length
        if seg.side_b.piece == piece:
            total += seg.length
    return total


def _piece_side_count(dec: SurfaceDecomposition, piece: int) -> int:
    n = 0
    for seg in dec.segments:
        n += (seg.side_a.piece == piece) + (seg.side_b.piece == piece)
    return n


def _int_log_disc(d0: float) -> float:
    """Overestimate of int_0^{d0} -2 log tanh(w/2) sinh(w) dw."""
    w = np.linspace(1e-9, d0, 4000)
    f = -2.0 * np.log(np.tanh(w / 2.0)) * np.sinh(w)
    return float(np.trapezoid(f, w)) * 1.05 + 1e-3


def boundary_norm_constant(dec: SurfaceDecomposition, lam: float) -> float:
    """Upper bound C_M for || psi ||_{L2(piece)} in terms of the L2 norm of its
    boundary Cauchy data, for solutions of (Delta - lam) psi = 0 on the piece,
    via Schur tests on the cylinder resolvent kernel at sigma = 1/2."""
    s_abs = _s_abs(lam)
    d_star = 1.0
    u_star = math.sinh(d_star / 2.0) ** 2
    worst = 0.0
    for piece in dec.pieces:
        ell = piece.ell
        blen = _piece_boundary_length(dec, piece.index)
        n_seg = _piece_side_count(dec, piece.index)
        area = piece.area
        diam = 2.0 * piece.rho_max + ell / 2.0 * math.cosh(piece.rho_max)
        tail_single = 3.0 * _group_tail(ell, piece.rho_max, dipole=False)
        tail_dipole = 3.0 * _group_tail(ell, piece.rho_max, dipole=True)
        near_mult = 3.0  # translates n = -1, 0, 1 can all be near-singular
        # single layer, B-type: sup_x of the boundary integral of |k|
        b1 = near_mult * n_seg * (2.0 * _J_LOG / (4.0 * math.pi)
                                  + 1.0 * min(blen, 2.0 * d_star)
                                  + 0.5 / math.sinh(d_star / 2.0))
        b1 += 0.25 * tail_single * blen
        # single layer, A-type: sup_{x'} of the area integral of |k|
        a1 = near_mult * (0.5 * _int_log_disc(d_star) + 1.0 * area
                          + math.pi * (math.cosh(diam / 2.0) - math.cosh(d_star / 2.0)))
        a1 += 0.25 * tail_single * area
        # dipole layer, B-type: Poisson closed form + decaying far field
        b2 = near_mult * n_seg * (1.0 + 1.0 * math.sinh(d_star) * d_star
                                  + s_abs / (2.0 * math.sinh(d_star / 2.0)))
        b2 += s_abs * 0.25 * tail_dipole * blen
        # dipole layer, A-type: near disc + e^{d/2}-integrable far field
        near2 = 2.0 * (math.sinh(d_star) / 2.0 + d_star / 2.0)  # int C2 cosh^2(w/2)
        near2 += math.pi * 1.0 * (math.sinh(2.0 * d_star) / 4.0 - d_star / 2.0)
        far2 = (math.pi * s_abs / 2.0) * _int_far_dipole(d_star, diam)
        a2 = near_mult * (near2 + far2) + s_abs * 0.25 * tail_dipole * area
        cm = math.sqrt(math.sqrt(a1 * b1) ** 2 + math.sqrt(a2 * b2) ** 2)
        worst = max(worst, cm)
    return worst


def _int_far_dipole(d0: float, diam: float) -> float:
    """Overestimate of int_{d0}^{diam} cosh^2(w/2)/sinh(w/2) dw."""
    w = np.linspace(d0, max(diam, d0 + 1e-6), 4000)
    f = np.cosh(w / 2.0) ** 2 / np.sinh(w / 2.0)
    return float(np.trapezoid(f, w)) * 1.05 + 1e-6


def boundary_lower_bound_c1(lam: float, dec: SurfaceDecomposition) -> float:
    """Lower bound c1 for the L2 norm of the boundary Cauchy data of an
    L2-normalized eigenfunction, with the crude 50 percent safety factor."""
    cm = boundary_norm_constant(dec, lam)
    return 1.0 / (math.sqrt(2.0) * cm) * 0.5


def kernel_lipschitz(lam: float, lam2: float, dec: SurfaceDecomposition,
                     margin: float = 0.5) -> float:
    """Bound C for the C1 norm of psi_s - psi_{s'}, per unit |s - s'|, when a
    cylinder eigenfunction is reconstructed from Cauchy data on the boundary
    of an enclosing cylinder at distance >= margin from the piece.

    The returned constant already includes the sqrt of the length of the
    enclosing cylinder boundary, so that
        || psi_s - psi_{s'} ||_C1 <= |s-s'| * C * sup-norm of the Cauchy data.
    """
    c1t, c2t = 0.25, math.log(4.0) / 2.0
    c3t, c4t = math.pi / 4.0, 0.1679
    s_abs = max(_s_abs(lam), _s_abs(lam2))
    worst = 0.0
    for piece in dec.pieces:
        ell = piece.ell
        big_l = piece.rho_max + margin
        u_d = math.sinh(margin / 2.0) ** 2
        blen = 2.0 * ell * math.cosh(big_l)
        # sup over u >= u_d of the three s-derivative kernel bounds, with the
        # gradient factors sinh(d)/2 and cosh(d)/2 folded in; each product
        # decays in d, so the supremum sits at the margin
        g0 = (c1t * math.log(1.0 + u_d) + c2t) / math.sqrt(u_d)
        g0 = min(g0, c3t + (c1t * math.log(1.0 + u_d) + c2t) / math.sqrt(u_d))
        sinh_fac = math.sinh(margin) / 2.0 / u_d ** 1.5
        g1 = (c2t + s_abs * (c1t * math.log(1.0 + u_d) + c2t)) * sinh_fac
        g1 = min(g1, (c4t + c3t * s_abs) / u_d * math.sinh(margin) / 2.0)
        quad_fac = (math.sinh(margin) / 2.0) ** 2 / u_d ** 2 + math.cosh(margin) / 2.0 / u_d ** 1.5
        g2 = ((2.0 * s_abs + 1.0) * c1t + s_abs * (s_abs + 1.0)
              * (c1t * math.log(1.0 + u_d) + c2t)) * quad_fac
        tail = 3.0 * _group_tail(ell, big_l, dipole=True) * (c1t + c2t) * (1.0 + s_abs) ** 2
        val = math.sqrt((g0 + g1) ** 2 + (g1 + g2) ** 2) + tail
        worst = max(worst, val * math.sqrt(blen))
    return worst


@dataclass(frozen=True)
class ConstantsReport:
    lam: float
    coupling: float
    c1_res: float
    c2_res: float
    c1_boundary: float
    c_m: float
    sup_bound: float
    c1_bound: float
    sys_len: float
    side_distance: float
    nu: float = NU
    mode: str = "rigorous"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lam", "coupling", "c1_res", "c2_res", "c1_boundary", "c_m",
                 "sup_bound", "c1_bound", "sys_len", "side_distance", "nu", "mode")}


def _cache_key(dec: SurfaceDecomposition, lam: float, mode: str) -> str:
    import hashlib
    payload = repr(([(c.length, c.twist) for c in dec.fn.curves], dec.fn.pants,
                    round(lam, 12), mode))
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def constants_for(dec: SurfaceDecomposition, lam: float, mode: str = "rigorous") -> ConstantsReport:
    import json
    import os
    from pathlib import Path
    cache_dir = os.environ.get("HYPEIG_CACHE")
    cache_path = None
    if cache_dir:
        cache_path = Path(cache_dir) / f"constants-{_cache_key(dec, lam, mode)}.json"
        if cache_path.exists():
            return ConstantsReport(**json.loads(cache_path.read_text()))
    report = _constants_for(dec, lam, mode)
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(json.dumps(report.to_dict()))
    return report


def _constants_for(dec: SurfaceDecomposition, lam: float, mode: str = "rigorous") -> ConstantsReport:
    c1r, c2r = resolvent_constants("rigorous")
    cm = boundary_norm_constant(dec, lam)
    return ConstantsReport(
        lam=lam,
        coupling=coupling_constant(dec.min_side_distance, dec.genus,
                                   sum(_piece_side_count(dec, p.index) for p in dec.pieces)
                                   if dec.genus != 2 else None),
        c1_res=c1r,
        c2_res=c2r,
        c1_boundary=1.0 / (math.sqrt(2.0) * cm) * 0.5,
        c_m=cm,
        sup_bound=sup_norm_bound(lam, dec.systole_lower),
        c1_bound=c1_norm_bound(lam, dec.systole_lower),
        sys_len=dec.systole_lower,
        side_distance=dec.min_side_distance,
        mode=mode,
    )
