"""Certified residual data for spline quasi-modes.

Everything here works in 80-bit extended precision with explicit roundoff
accounting: alongside every Taylor-jet coefficient we carry the sum of the
absolute values of all terms that entered it, so `K_OPS * eps * magnitude`
is a rigorous bound for the accumulated floating-point error.  This keeps
the cancellation between Fourier modes (the boundary jump of a good
quasi-mode sits ten orders of magnitude below the individual terms), which
a componentwise interval treatment would destroy.

Provides:
  * residual_norm_certified: upper bound for ||B0 v||
  * simpson_defect: quartic Simpson error bound for the jump functionals
  * quasi_mode_norm_certified: ||(Delta - lam) Psi(v)||_{L2} for splines
  * gram_quadratic_lower: lower bound for ||Psi(v)||_{L2}
"""

from __future__ import annotations

import math

import numpy as np

from .radial import TAYLOR_ORDER

LD = np.longdouble
EPS = float(np.finfo(LD).eps)
K_OPS = 64.0  # blanket operation-count factor for roundoff slop

JET_ORDER = 12
FILL_STEP = 0.004


class FJet:
    """Taylor jet over longdouble arrays with magnitude tracking."""

    __slots__ = ("c", "m")

    def __init__(self, c, m):
        self.c = c  # (order+1, ...) longdouble Taylor coefficients
        self.m = m  # same shape; sums of |term| paths

    @property
    def order(self):
        return self.c.shape[0] - 1

    def __add__(self, other):
        if isinstance(other, FJet):
            return FJet(self.c + other.c, self.m + other.m)
        out = self.c.copy()
        out[0] = out[0] + other
        mm = self.m.copy()
        mm[0] = mm[0] + abs(other)
        return FJet(out, mm)

    def __mul__(self, other):
        if not isinstance(other, FJet):
            return FJet(self.c * other, self.m * abs(other))
        n = self.order
        out = np.zeros(np.broadcast_shapes(self.c.shape, other.c.shape), dtype=LD)
        mag = np.zeros_like(out)
        for k in range(n + 1):
            acc = self.c[0] * other.c[k]
            mac = self.m[0] * other.m[k]
            for j in range(1, k + 1):
                acc = acc + self.c[j] * other.c[k - j]
                mac = mac + self.m[j] * other.m[k - j]
            out[k] = acc
            mag[k] = mac
        return FJet(out, mag)

    __rmul__ = __mul__

    def __sub__(self, other):
        if isinstance(other, FJet):
            return FJet(self.c - other.c, self.m + other.m)
        return self + (-other)

    def reciprocal(self):
        n = self.order
        out = np.zeros_like(self.c)
        mag = np.zeros_like(self.m)
        out[0] = 1.0 / self.c[0]
        mag[0] = np.abs(out[0])
        for k in range(1, n + 1):
            acc = self.c[1] * out[k - 1]
            mac = self.m[1] * mag[k - 1]
            for j in range(2, k + 1):
                acc = acc + self.c[j] * out[k - j]
                mac = mac + self.m[j] * mag[k - j]
            out[k] = -acc / self.c[0]
            mag[k] = mac / np.abs(self.c[0])
        return FJet(out, mag)


def fjet_const(x, order):
    x = np.asarray(x, dtype=LD)
    c = np.zeros((order + 1,) + x.shape, dtype=LD)
    c[0] = x
    return FJet(c, np.abs(c))


def _affine_fjet(c0, c1, order):
    c0 = np.asarray(c0, dtype=LD)
    c = np.zeros((order + 1,) + c0.shape, dtype=LD)
    c[0] = c0
    c[1] = c1
    return FJet(c, np.abs(c))


def fjet_coshsinh(g: FJet):
    n = g.order
    ch = np.zeros_like(g.c)
    sh = np.zeros_like(g.c)
    chm = np.zeros_like(g.m)
    shm = np.zeros_like(g.m)
    ch[0], sh[0] = np.cosh(g.c[0]), np.sinh(g.c[0])
    chm[0], shm[0] = np.abs(ch[0]), np.abs(sh[0])
    for k in range(1, n + 1):
        acc_c = g.c[1] * sh[k - 1]
        acc_s = g.c[1] * ch[k - 1]
        mc = g.m[1] * shm[k - 1]
        ms = g.m[1] * chm[k - 1]
        for j in range(2, k + 1):
            acc_c = acc_c + j * g.c[j] * sh[k - j]
            acc_s = acc_s + j * g.c[j] * ch[k - j]
            mc = mc + j * g.m[j] * shm[k - j]
            ms = ms + j * g.m[j] * chm[k - j]
        ch[k], sh[k] = acc_c / k, acc_s / k
        chm[k], shm[k] = mc / k, ms / k
    return FJet(ch, chm), FJet(sh, shm)


def fjet_sincos(g: FJet):
    n = g.order
    sn = np.zeros_like(g.c)
    cs = np.zeros_like(g.c)
    snm = np.zeros_like(g.m)
    csm = np.zeros_like(g.m)
    sn[0], cs[0] = np.sin(g.c[0]), np.cos(g.c[0])
    snm[0], csm[0] = np.abs(sn[0]) + EPS, np.abs(cs[0]) + EPS
    for k in range(1, n + 1):
        acc_s = g.c[1] * cs[k - 1]
        acc_c = g.c[1] * sn[k - 1]
        ms = g.m[1] * csm[k - 1]
        mc = g.m[1] * snm[k - 1]
        for j in range(2, k + 1):
            acc_s = acc_s + j * g.c[j] * cs[k - j]
            acc_c = acc_c + j * g.c[j] * sn[k - j]
            ms = ms + j * g.m[j] * csm[k - j]
            mc = mc + j * g.m[j] * snm[k - j]
        sn[k], cs[k] = acc_s / k, -acc_c / k
        snm[k], csm[k] = ms / k, mc / k
    return FJet(sn, snm), FJet(cs, csm)


def fjet_polyval(coeffs, g: FJet) -> FJet:
    """Polynomial at a jet; coeffs (..., deg+1) lowest-first broadcast
    against the jet coefficients."""
    deg = coeffs.shape[-1] - 1
    shape = np.broadcast_shapes(coeffs[..., 0].shape, g.c[0].shape)
    out = fjet_const(np.broadcast_to(coeffs[..., deg], shape).astype(LD), g.order)
    for d in range(deg - 1, -1, -1):
        out = out * g
        out.c[0] = out.c[0] + coeffs[..., d]
        out.m[0] = out.m[0] + np.abs(coeffs[..., d])
    return out


# -- Psi(v) jets along one segment --------------------------------------------

def _side_fjets(ms, side, u_pts, slope, order):
    basis = next(b for b in ms.bases if b.piece == side.piece)
    rb = basis.radial
    u = np.asarray(u_pts, dtype=LD)
    if side.kind == "core":
        t_jet = _affine_fjet(np.asarray(side.t_off, dtype=LD) - u, -slope, order)
        r_jet = fjet_const(np.zeros_like(u), order)
        dr_dsig = fjet_const(np.zeros_like(u), order)
        cosh_d = 1.0
        core = True
    else:
        if side.kind == "wrap":
            half = side.wrap_len / 2.0
            u_eff = np.mod(u + half, LD(side.wrap_len)) - half
        else:
            u_eff = u
        sig = np.asarray(side.sigma0, dtype=LD) + LD(side.direction) * u_eff
        sjet = _affine_fjet(sig, side.direction * slope, order)
        ch_j, sh_j = fjet_coshsinh(sjet)
        sd = LD(math.sinh(side.line.dist))
        cd = LD(math.cosh(side.line.dist))
        r_jet = ch_j * sd
        dr_dsig = sh_j * sd
        one_p_r2 = r_jet * r_jet + LD(1.0)
        dt = one_p_r2.reciprocal() * (LD(side.direction * slope) * cd)
        t0 = np.asarray(side.line.t_foot, dtype=LD) + np.arctanh(np.tanh(sig) / cd)
        cj = np.zeros_like(dt.c)
        mj = np.zeros_like(dt.m)
        cj[0], mj[0] = t0, np.abs(t0)
        for k in range(1, order + 1):
            cj[k] = dt.c[k - 1] / k
            mj[k] = dt.m[k - 1] / k
        t_jet = FJet(cj, mj)
        cosh_d = float(cd)
        core = False
    rv, rd = _radial_fjets(rb, r_jet)
    tmat = basis.transform.astype(LD)
    rv_t = FJet(np.einsum("opkj,kji->opki", rv.c, tmat),
                np.einsum("opkj,kji->opki", rv.m, np.abs(tmat)))
    rd_t = FJet(np.einsum("opkj,kji->opki", rd.c, tmat),
                np.einsum("opkj,kji->opki", rd.m, np.abs(tmat)))
    return rv_t, rd_t, t_jet, r_jet, dr_dsig, cosh_d, core


def _radial_fjets(rb, r_jet: FJet):
    """Value and d/dr jets of all stored radial splines at a scalar r-jet;
    output coefficient arrays have shape (order+1, npts, nk, 2)."""
    r0 = np.asarray(r_jet.c[0], dtype=np.float64)
    bins = np.clip(np.searchsorted(rb.breaks, r0, side="right") - 1, 0,
                   len(rb.breaks) - 2)
    order = r_jet.order
    npts = r0.shape[0]
    nk = rb.n_four + 1
    coeffs = rb.coeffs.astype(LD)
    dcoeffs = coeffs[:, :, :, 1:] * np.arange(1, TAYLOR_ORDER + 1, dtype=LD)
    cval = np.zeros((order + 1, npts, nk, 2), dtype=LD)
    mval = np.zeros_like(cval)
    cder = np.zeros_like(cval)
    mder = np.zeros_like(cval)
    for b in np.unique(bins):
        idx = np.nonzero(bins == b)[0]
        xc = r_jet.c[:, idx, None, None].copy()
        xm = r_jet.m[:, idx, None, None].copy()
        xc[0] = xc[0] - LD(rb.breaks[b])
        xm[0] = np.abs(xc[0])
        x = FJet(xc, xm)
        pv = fjet_polyval(np.moveaxis(coeffs[:, :, b, :], -1, -1), x)
        pd = fjet_polyval(np.moveaxis(dcoeffs[:, :, b, :], -1, -1), x)
        cval[:, idx], mval[:, idx] = pv.c, pv.m
        cder[:, idx], mder[:, idx] = pd.c, pd.m
    return FJet(cval, mval), FJet(cder, mder)


def _weights_from_vector(ms, piece, v):
    pc = ms.piece_cols
    basis = next(b for b in ms.bases if b.piece == piece)
    nk = basis.radial.n_four + 1
    block = np.asarray(v, dtype=np.float64)[piece * pc: (piece + 1) * pc]
    w_cos = np.zeros((nk, 2))
    w_sin = np.zeros((nk, 2))
    w_cos[0, 0], w_cos[0, 1] = block[0], block[1]
    for k in range(1, nk):
        base = 2 + (k - 1) * 4
        w_cos[k, 0], w_cos[k, 1] = block[base], block[base + 1]
        w_sin[k, 0], w_sin[k, 1] = block[base + 2], block[base + 3]
    return w_cos.astype(LD), w_sin.astype(LD)


def _contract(radial: FJet, trig_cos: FJet, trig_sin: FJet, w_cos, w_sin) -> FJet:
    """Sum over (k, j) of w * radial_kj * trig_k, as jets in u."""
    total = None
    for j in (0, 1):
        rj = FJet(radial.c[..., j], radial.m[..., j])
        tc = rj * trig_cos
        ts = rj * trig_sin
        part = FJet(np.einsum("opk,k->op", tc.c, w_cos[:, j])
                    + np.einsum("opk,k->op", ts.c, w_sin[:, j]),
                    np.einsum("opk,k->op", tc.m, np.abs(w_cos[:, j]))
                    + np.einsum("opk,k->op", ts.m, np.abs(w_sin[:, j])))
        total = part if total is None else total + part
    return total


def _psi_fjets(ms, side, u_pts, slope, v, order):
    rv, rd, t_jet, r_jet, dr_dsig, cosh_d, core = _side_fjets(ms, side, u_pts, slope, order)
    basis = next(b for b in ms.bases if b.piece == side.piece)
    qs = basis.radial.qs.astype(LD)
    w_cos, w_sin = _weights_from_vector(ms, side.piece, v)
    phase = FJet(t_jet.c[:, :, None] * qs[None, None, :],
                 t_jet.m[:, :, None] * np.abs(qs)[None, None, :])
    sin_j, cos_j = fjet_sincos(phase)
    val = _contract(rv, cos_j, sin_j, w_cos, w_sin)
    if core:
        nor = _contract(rd, cos_j, sin_j, w_cos, w_sin) * (-1.0)
    else:
        term1 = _contract(rd, cos_j, sin_j, w_cos, w_sin) * cosh_d
        dcos = FJet(sin_j.c * (-qs)[None, None, :], sin_j.m * np.abs(qs)[None, None, :])
        dsin = FJet(cos_j.c * qs[None, None, :], cos_j.m * np.abs(qs)[None, None, :])
        term2 = _contract(rv, dcos, dsin, w_cos, w_sin)
        one_p_r2 = r_jet * r_jet + LD(1.0)
        nor = term1 + (term2 * one_p_r2.reciprocal() * dr_dsig) * (-1.0)
    return val, nor


def _jump_jets(ms, seg, u_pts, v, order):
    val_a, nor_a = _psi_fjets(ms, seg.side_a, u_pts, 1.0, v, order)
    if seg.partner_sign > 0:
        u_b, slope_b = u_pts, 1.0
    else:
        u_b = np.mod(LD(seg.partner_offset) - np.asarray(u_pts, dtype=LD), LD(seg.length))
        slope_b = -1.0
    val_b, nor_b = _psi_fjets(ms, seg.side_b, u_b, slope_b, v, order)
    return val_a - val_b, nor_a + nor_b


def _sup_derivative(jet: FJet, m: int, half_step: float) -> float:
    """Sup over |u - u_i| <= half_step of |g^(m)|, via the point jets with a
    magnitude closure for the Taylor tail (requires tail ratio < 1/2)."""
    order = jet.order
    total = np.zeros(jet.c.shape[1:], dtype=LD)
    for j in range(0, order - m + 1):
        dfact = math.factorial(m + j) // math.factorial(j)
        err = K_OPS * EPS * jet.m[m + j]
        total = total + (np.abs(jet.c[m + j]) + err) * LD(dfact * half_step ** j)
    jt = order - m
    top = jet.m[order] * LD((math.factorial(order) // math.factorial(jt)) * half_step ** jt)
    jp = order - m - 1
    prev = jet.m[order - 1] * LD((math.factorial(order - 1) // math.factorial(jp))
                                 * half_step ** jp)
    ratio = float(np.max(top / np.maximum(prev, LD(1e-300))))
    if ratio > 0.5:
        raise RuntimeError("defect fill step too coarse for the magnitude closure")
    total = total + 2.0 * top
    return float(np.max(total))


def _segment_points(seg):
    n_pts = max(3, int(math.ceil(seg.length / FILL_STEP)) + 1)
    upts = np.linspace(0.0, seg.length, n_pts)
    half = 0.5 * seg.length / (n_pts - 1)
    return upts, half


def simpson_defect(ms, v: np.ndarray) -> float:
    """Upper bound for | ||B0 v||^2 - F(Psi(v))^2 |: quartic composite
    Simpson error of the squared jump functionals."""
    total = 0.0
    for grid in ms.grids:
        seg = ms.dec.segments[grid.segment]
        upts, half = _segment_points(seg)
        jv, jn = _jump_jets(ms, seg, upts, v, JET_ORDER)
        sup = 0.0
        for jet in (jv, jn):
            d = [_sup_derivative(jet, m, half) for m in range(5)]
            sup += 2.0 * (d[0] * d[4] + 4.0 * d[1] * d[3] + 3.0 * d[2] * d[2])
        total += grid.delta ** 4 * seg.length / 180.0 * sup
    return total


def jump_sup_bounds(ms, v: np.ndarray):
    """Per-segment sup bounds of (value jump, normal jump)."""
    out = []
    for grid in ms.grids:
        seg = ms.dec.segments[grid.segment]
        upts, half = _segment_points(seg)
        jv, jn = _jump_jets(ms, seg, upts, v, JET_ORDER)
        out.append((_sup_derivative(jv, 0, half), _sup_derivative(jn, 0, half)))
    return out


def residual_norm_certified(ms, v: np.ndarray) -> float:
    """Rigorous upper bound for ||B0 v||, extended precision plus slop."""
    b0 = ms.b0.astype(LD)
    vv = np.asarray(v, dtype=LD)
    y = b0 @ vv
    mag = np.abs(b0) @ np.abs(vv)
    n = b0.shape[1]
    bound = np.abs(y) + (n + 4) * EPS * mag
    return float(np.sqrt(np.sum(bound.astype(np.float64) ** 2))) * (1.0 + 1e-12)


def quasi_mode_norm_certified(ms, v: np.ndarray) -> float:
    """Upper bound for ||(Delta - lam) Psi(v)||_{L2(M)}.

    The combined defect polynomial of each Fourier pair is bounded per
    spline step; combining before taking norms keeps the cancellation
    between the two radial columns."""
    total = LD(0.0)
    for pb in ms.bases:
        rb = pb.radial
        piece = ms.dec.pieces[pb.piece]
        w_cos, w_sin = _weights_from_vector(ms, pb.piece, v)
        tmat = pb.transform.astype(LD)
        wc = np.einsum("kji,ki->kj", tmat, w_cos)
        ws = np.einsum("kji,ki->kj", tmat, w_sin)
        wc_m = np.einsum("kji,ki->kj", np.abs(tmat), np.abs(w_cos))
        ws_m = np.einsum("kji,ki->kj", np.abs(tmat), np.abs(w_sin))
        nk = rb.n_four + 1
        c_t = np.full(nk, piece.ell / 2.0, dtype=LD)
        c_t[0] = piece.ell
        r_hi = piece.r_max
        lam = LD(rb.lam)
        q2 = (rb.qs.astype(LD)) ** 2
        coeffs = rb.coeffs.astype(LD)
        for step in range(len(rb.breaks) - 1):
            a = rb.breaks[step]
            if a >= r_hi:
                break
            h = LD(min(rb.breaks[step + 1], r_hi) - a)
            for w, wm in ((wc, wc_m), (ws, ws_m)):
                comb = np.einsum("kjn,kj->kn", coeffs[:, :, step, :], w)
                comb_m = np.einsum("kjn,kj->kn", np.abs(coeffs[:, :, step, :]), wm)
                d, dm = _defect_poly(comb, comb_m, LD(rb.breaks[step]), lam, q2)
                hp = h ** np.arange(d.shape[1], dtype=LD)
                sup = np.sum((np.abs(d) + K_OPS * EPS * dm) * hp[None, :], axis=1)
                total = total + np.sum(sup * sup * h * c_t)
    return float(np.sqrt(np.maximum(total, LD(0.0)))) * (1.0 + 1e-10)


def _defect_poly(comb, comb_m, r0, lam, q2):
    """Coefficients of A P'' + B P' + C P for combined polynomials (per k)."""
    P = TAYLOR_ORDER
    p = 1.0 + r0 * r0
    A = (p * p, 4.0 * r0 * p, 2.0 * p + 4.0 * r0 * r0, 4.0 * r0, LD(1.0))
    B = (2.0 * r0 * p, 2.0 * (2.0 * r0 * r0 + p), 6.0 * r0, LD(2.0))
    C = (lam * p - q2, 2.0 * lam * r0, lam)
    nk = comb.shape[0]
    d = np.zeros((nk, P + 3), dtype=LD)
    dm = np.zeros_like(d)
    for n in range(P + 3):
        acc = np.zeros(nk, dtype=LD)
        mac = np.zeros_like(acc)
        for j, Aj in enumerate(A):
            mdx = n - j + 2
            if 2 <= mdx <= P:
                f = mdx * (mdx - 1.0)
                acc = acc + Aj * f * comb[:, mdx]
                mac = mac + abs(Aj) * f * comb_m[:, mdx]
        for j, Bj in enumerate(B):
            mdx = n - j + 1
            if 1 <= mdx <= P:
                acc = acc + Bj * mdx * comb[:, mdx]
                mac = mac + abs(Bj) * mdx * comb_m[:, mdx]
        for j in range(3):
            mdx = n - j
            if 0 <= mdx <= P:
                acc = acc + C[j] * comb[:, mdx]
                mac = mac + np.abs(C[j]) * comb_m[:, mdx]
        d[:, n] = acc
        dm[:, n] = mac
    return d, dm


def gram_quadratic_lower(ms, v: np.ndarray) -> float:
    """Certified lower bound for ||Psi(v)||_{L2(M)} from exact integration of
    the combined radial polynomials over the invariant sub-cylinders."""
    total = LD(0.0)
    slop = LD(0.0)
    for pb in ms.bases:
        rb = pb.radial
        piece = ms.dec.pieces[pb.piece]
        w_cos, w_sin = _weights_from_vector(ms, pb.piece, v)
        tmat = pb.transform.astype(LD)
        wc = np.einsum("kji,ki->kj", tmat, w_cos)
        ws = np.einsum("kji,ki->kj", tmat, w_sin)
        nk = rb.n_four + 1
        c_t = np.full(nk, piece.ell / 2.0, dtype=LD)
        c_t[0] = piece.ell
        coeffs = rb.coeffs.astype(LD)
        for step in range(len(rb.breaks) - 1):
            a = rb.breaks[step]
            if a >= piece.r_inv:
                break
            h = LD(min(rb.breaks[step + 1], piece.r_inv) - a)
            for w in (wc, ws):
                comb = np.einsum("kjn,kj->kn", coeffs[:, :, step, :], w)
                comb_m = np.einsum("kjn,kj->kn", np.abs(coeffs[:, :, step, :]), np.abs(w))
                deg = comb.shape[1]
                conv = np.zeros((nk, 2 * deg - 1), dtype=LD)
                conv_m = np.zeros_like(conv)
                for i in range(deg):
                    conv[:, i: i + deg] += comb[:, i: i + 1] * comb
                    conv_m[:, i: i + deg] += comb_m[:, i: i + 1] * comb_m
                powers = h ** np.arange(1, 2 * deg, dtype=LD) / np.arange(1, 2 * deg, dtype=LD)
                total = total + np.sum((conv @ powers) * c_t)
                slop = slop + np.sum((conv_m @ powers) * c_t) * K_OPS * EPS
    lo = float(total - slop)
    return math.sqrt(max(lo, 0.0))
