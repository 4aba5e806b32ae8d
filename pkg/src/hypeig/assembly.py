"""Collocation matrices and certified (generalized) singular values.

Columns are indexed per cylinder piece by (Fourier index k, trig type,
radial combination); the two radial solutions for each k are recombined so
that the resulting functions are orthonormal on the invariant sub-cylinder
[0, rho_inv] x S^1 of their piece, which makes ||Psi(v)||_{L2} >= ||v||.

Row blocks per cutting segment, with composite-Simpson weight factors
sqrt(delta b_i / 3):
    B0:  value jump, normal-derivative jump            (2 n rows)
    B:   B0 plus tangential-derivative jump            (3 n rows)
    C:   boundary data of both sides                   (4 n rows)

Certified bounds follow the numeric-decomposition-plus-interval-residual
route: an approximate SVD U S V^T is checked a posteriori with rigorous
Hilbert-Schmidt norms, giving two-sided bounds on singular values without
trusting the eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import CollocationGrid, SurfaceDecomposition
from .intervals import IA, hs_norm_upper, interval_matvec, interval_norm2_upper
from .radial import RadialBasis, TAYLOR_ORDER


@dataclass
class PieceBasis:
    """Radial data plus the per-k orthonormalizing 2x2 transforms for one piece."""

    piece: int
    ell: float
    radial: RadialBasis
    transform: np.ndarray  # (nk, 2, 2); columns of T mix (even, odd)
    gram_defect: float = 0.0  # ||T^t G T - I||_F bound over the sub-cylinder
    chi_norms: np.ndarray | None = None  # (nk, 2) quasi-mode L2 bounds per transformed column


def _cholesky_inv_t(g: np.ndarray) -> np.ndarray:
    """Inverse-transpose Cholesky factors of a batch of 2x2 Gramians.

    Where the even/odd pair is numerically degenerate on the window (high
    Fourier index), orthogonalizing would cancel catastrophically in the
    far field, so those indices fall back to diagonal normalization; the
    column span, and hence every generalized singular value, is unchanged.
    """
    l00 = np.sqrt(g[:, 0, 0])
    l10 = g[:, 0, 1] / l00
    gap = g[:, 1, 1] - l10 * l10
    safe = gap > 1e-6 * g[:, 1, 1]
    l11 = np.sqrt(np.where(safe, gap, g[:, 1, 1]))
    t = np.zeros_like(g)
    t[:, 0, 0] = 1.0 / l00
    t[:, 0, 1] = np.where(safe, -l10 / (l00 * l11), 0.0)
    t[:, 1, 1] = 1.0 / l11
    return t


def build_piece_bases(dec: SurfaceDecomposition, lam: float, n_four: int,
                      dtype=np.float64, validated: bool = False,
                      tol: float = 1e-12, step_cap: float = 0.22,
                      margin: float = 1e-9) -> list[PieceBasis]:
    """Solve the radial problems once per distinct cylinder and normalize per piece."""
    solves: dict[tuple[float, float], RadialBasis] = {}
    out: list[PieceBasis] = []
    for key, members in dec.cylinder_keys().items():
        ell, r_max = key
        rb = RadialBasis(ell=ell, lam=lam, n_four=n_four, r_max=r_max + margin,
                         dtype=dtype, validated=validated, tol=tol, step_cap=step_cap)
        solves[key] = rb
    for p in dec.pieces:
        rb = solves[(p.ell, round(p.r_max, 12))]
        ints = rb.pair_integrals(p.r_inv)
        nk = rb.n_four + 1
        c_t = np.full(nk, p.ell / 2.0, dtype=np.float64)
        c_t[0] = p.ell
        gram = ints.astype(np.float64) * c_t[:, None, None]
        t = _cholesky_inv_t(gram)
        pb = PieceBasis(piece=p.index, ell=p.ell, radial=rb, transform=t)
        if validated:
            chi = rb.residual_norms(p.r_max + margin)  # (nk, 2) raw bounds
            ct_sqrt = np.sqrt(c_t)[:, None]
            pb.chi_norms = ct_sqrt * np.einsum("kp,kpj->kj", chi, np.abs(t))
            pb.gram_defect = _gram_defect(rb, p.r_inv, t, c_t)
        out.append(pb)
    return out


def _gram_defect(rb: RadialBasis, r_inv: float, t: np.ndarray, c_t: np.ndarray) -> float:
    """Rigorous bound on || T^t G T - I ||_F with interval pair integrals."""
    nk = rb.n_four + 1
    ints = IA.zeros((nk, 2, 2))
    for step in range(len(rb.breaks) - 1):
        a = rb.breaks[step]
        if a >= r_inv:
            break
        b = min(rb.breaks[step + 1], r_inv)
        cf = IA.exact(rb.coeffs[:, :, step, :].astype(np.float64))
        x = b - a
        deg = TAYLOR_ORDER
        for ia_ in range(2):
            for ib_ in range(ia_, 2):
                conv = _ia_poly_mul(cf[:, ia_, :], cf[:, ib_, :])
                powers = x ** np.arange(1, 2 * deg + 2) / np.arange(1, 2 * deg + 2)
                integ = _ia_poly_dot(conv, powers)
                ints[:, ia_, ib_] = ints[:, ia_, ib_] + integ
                if ib_ != ia_:
                    ints[:, ib_, ia_] = ints[:, ib_, ia_] + integ
    g = ints * IA.exact(c_t[:, None, None])
    # T^t G T - I per k, accumulated in interval arithmetic
    worst = 0.0
    for k in range(nk):
        tk = IA.exact(t[k])
        gk = g[k]
        m = _ia_mat2(tk, gk)
        d00 = m[0][0] - 1.0
        d11 = m[1][1] - 1.0
        fro = float(d00.mag() ** 2 + d11.mag() ** 2 + m[0][1].mag() ** 2 + m[1][0].mag() ** 2)
        worst += fro
    return math.sqrt(worst)


def _ia_mat2(t: IA, g: IA):
    """(T^t G T) for 2x2 interval matrices, returned as nested scalars."""
    gt = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            gt[i][j] = g[i, 0] * t[0, j] + g[i, 1] * t[1, j]
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            out[i][j] = t[0, i] * gt[0][j] + t[1, i] * gt[1][j]
    return out


def _ia_poly_mul(a: IA, b: IA) -> IA:
    nk, p1 = a.shape
    out = IA.zeros((nk, 2 * p1 - 1))
    for i in range(p1):
        seg = out[:, i: i + p1] + a[:, i: i + 1] * b
        out[:, i: i + p1] = seg
    return out


def _ia_poly_dot(conv: IA, w: np.ndarray) -> IA:
    return (conv * IA.exact(w[None, :])).sum(axis=1)


@dataclass
class MatrixSet:
    lam: float
    n_four: int
    b0: np.ndarray
    b: np.ndarray
    c: np.ndarray
    b0_width: np.ndarray | None
    b_width: np.ndarray | None
    c_width: np.ndarray | None
    n_cols: int
    piece_cols: int
    row_segments: list  # bookkeeping (segment index, row ranges)
    bases: list[PieceBasis]
    grids: list[CollocationGrid]
    dec: SurfaceDecomposition


def n_columns(dec: SurfaceDecomposition, n_four: int) -> int:
    return (4 * n_four + 2) * dec.n_pieces


def _col_block(n_four: int):
    """Column index of (k, trig, j) inside one piece block."""
    def idx(k, trig, j):
        if k == 0:
            return j
        return 2 + (k - 1) * 4 + trig * 2 + j
    return idx


def _side_rows(side, u, n_four, basis: PieceBasis, want_width: bool):
    """Value, outward-normal and tangential rows for one segment side.

    Returns (val, nor, tan) arrays of shape (npts, 4 n_four + 2) in the
    piece-local column order, plus width arrays when requested.
    """
    rho, t, (tan_r, tan_t), (nor_r, nor_t) = side.located(u)
    dt = basis.radial.dtype
    r = np.sinh(rho).astype(dt)
    val_kp, dval_kp = basis.radial.eval(r)  # (npts, nk, 2), d/dr
    ch = np.cosh(rho).astype(dt)
    drho_kp = dval_kp * ch[:, None, None]  # d/drho
    tr = np.einsum("pkj,kji->pki", val_kp, basis.transform.astype(dt))
    trd = np.einsum("pkj,kji->pki", drho_kp, basis.transform.astype(dt))
    npts = len(u)
    nk = n_four + 1
    qs = basis.radial.qs.astype(dt)
    phase = qs[None, :] * t.astype(dt)[:, None]
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    inv_ch = (1.0 / ch)[:, None]
    ncols = 4 * n_four + 2
    val = np.zeros((npts, ncols), dtype=dt)
    nor = np.zeros_like(val)
    tan = np.zeros_like(val)
    width = [np.zeros_like(val), np.zeros_like(val), np.zeros_like(val)] if want_width else None

    def put(cols, trig_v, trig_d, radial_v, radial_d, kk):
        # function = radial(rho) * trig(q t)
        val[:, cols] = radial_v * trig_v
        grad_rho = radial_d * trig_v
        grad_t = radial_v * trig_d * inv_ch
        nor[:, cols] = grad_rho * nor_r[:, None] + grad_t * nor_t[:, None]
        tan[:, cols] = grad_rho * tan_r[:, None] + grad_t * tan_t[:, None]

    idx = _col_block(n_four)
    for j in (0, 1):
        put([idx(0, 0, j)], 1.0, 0.0, tr[:, 0, j: j + 1], trd[:, 0, j: j + 1], 0)
    for trig in (0, 1):
        tv = cos_p if trig == 0 else sin_p
        td = (-qs[None, :] * sin_p) if trig == 0 else (qs[None, :] * cos_p)
        for j in (0, 1):
            cols = [idx(k, trig, j) for k in range(1, nk)]
            put(cols, tv[:, 1:], td[:, 1:], tr[:, 1:, j], trd[:, 1:, j], None)

    if want_width:
        ev, edr = basis.radial.eta_at(np.asarray(r, dtype=np.float64))
        ev_t = np.einsum("pkj,kji->pki", ev, np.abs(basis.transform))
        # eta_dval bounds the phi-derivative error, which dominates |e'_rho|
        edr_t = np.einsum("pkj,kji->pki", edr, np.abs(basis.transform))
        wv = np.zeros((npts, ncols))
        wn = np.zeros((npts, ncols))
        for j in (0, 1):
            wv[:, idx(0, 0, j)] = ev_t[:, 0, j]
            wn[:, idx(0, 0, j)] = edr_t[:, 0, j]
        for trig in (0, 1):
            for j in (0, 1):
                cols = [idx(k, trig, j) for k in range(1, nk)]
                wv[:, cols] = ev_t[:, 1:, j]
                wn[:, cols] = edr_t[:, 1:, j] + ev_t[:, 1:, j] * qs[None, 1:]
        rel = 4e-16 * (np.abs(val) + np.abs(nor) + np.abs(tan))
        width[0][:] = wv + rel
        width[1][:] = wn + rel
        width[2][:] = wn + rel
    return (val, nor, tan), width


def assemble(dec: SurfaceDecomposition, grids: list[CollocationGrid], lam: float,
             n_four: int, bases: list[PieceBasis] | None = None,
             dtype=np.float64, validated: bool = False, tol: float = 1e-12,
             step_cap: float = 0.22) -> MatrixSet:
    if bases is None:
        bases = build_piece_bases(dec, lam, n_four, dtype=dtype, validated=validated,
                                  tol=tol, step_cap=step_cap)
    by_piece = {b.piece: b for b in bases}
    n_pts = sum(g.n for g in grids)
    pc = 4 * n_four + 2
    ncols = pc * dec.n_pieces
    dt = dtype
    b0 = np.zeros((2 * n_pts, ncols), dtype=dt)
    bmat = np.zeros((3 * n_pts, ncols), dtype=dt)
    cmat = np.zeros((4 * n_pts, ncols), dtype=dt)
    widths = [np.zeros_like(b0), np.zeros_like(bmat), np.zeros_like(cmat)] if validated else [None] * 3
    row0 = rowb = rowc = 0
    row_segments = []
    for grid in grids:
        seg = dec.segments[grid.segment]
        u_a = grid.points_u
        u_b = seg.partner_u(u_a)
        w = grid.quad_factors().astype(dt)[:, None]
        (va, na, ta), wa = _side_rows(seg.side_a, u_a, n_four, by_piece[seg.side_a.piece], validated)
        (vb, nb, tb), wb = _side_rows(seg.side_b, u_b, n_four, by_piece[seg.side_b.piece], validated)
        n = grid.n
        ca = slice(seg.side_a.piece * pc, seg.side_a.piece * pc + pc)
        cb = slice(seg.side_b.piece * pc, seg.side_b.piece * pc + pc)
        sgn = seg.partner_sign

        def add(mat, r0, blk_a, blk_b, fb=1.0):
            mat[r0: r0 + n, ca] += w * blk_a
            mat[r0: r0 + n, cb] += fb * w * blk_b

        add(b0, row0, va, -vb)
        add(b0, row0 + n, na, nb)
        add(bmat, rowb, va, -vb)
        add(bmat, rowb + n, na, nb)
        add(bmat, rowb + 2 * n, ta, -sgn * tb)
        add(cmat, rowc, va, 0 * vb)
        add(cmat, rowc + n, na, 0 * nb)
        add(cmat, rowc + 2 * n, 0 * va, vb)
        add(cmat, rowc + 3 * n, 0 * na, nb)
        if validated:
            wf = np.asarray(w, dtype=np.float64)
            widths[0][row0: row0 + n, ca] += wf * wa[0]
            widths[0][row0: row0 + n, cb] += wf * wb[0]
            widths[0][row0 + n: row0 + 2 * n, ca] += wf * wa[1]
            widths[0][row0 + n: row0 + 2 * n, cb] += wf * wb[1]
            widths[1][rowb: rowb + n, ca] += wf * wa[0]
            widths[1][rowb: rowb + n, cb] += wf * wb[0]
            widths[1][rowb + n: rowb + 2 * n, ca] += wf * wa[1]
            widths[1][rowb + n: rowb + 2 * n, cb] += wf * wb[1]
            widths[1][rowb + 2 * n: rowb + 3 * n, ca] += wf * wa[2]
            widths[1][rowb + 2 * n: rowb + 3 * n, cb] += wf * wb[2]
            widths[2][rowc: rowc + n, ca] += wf * wa[0]
            widths[2][rowc + n: rowc + 2 * n, ca] += wf * wa[1]
            widths[2][rowc + 2 * n: rowc + 3 * n, cb] += wf * wb[0]
            widths[2][rowc + 3 * n: rowc + 4 * n, cb] += wf * wb[1]
        row_segments.append((grid.segment, row0, rowb, rowc, n))
        row0 += 2 * n
        rowb += 3 * n
        rowc += 4 * n
    return MatrixSet(lam=lam, n_four=n_four, b0=b0, b=bmat, c=cmat,
                     b0_width=widths[0], b_width=widths[1], c_width=widths[2],
                     n_cols=ncols, piece_cols=pc, row_segments=row_segments,
                     bases=bases, grids=grids, dec=dec)


# -- singular value reports ---------------------------------------------------

@dataclass(frozen=True)
class SingularReport:
    estimate: float
    lower: float
    upper: float
    vector: np.ndarray
    sigma_c_lower: float | None = None
    deltas: tuple = ()
    all_sigmas: np.ndarray | None = None


def _svd_residual_bounds(mat: np.ndarray, width: np.ndarray | None):
    """Two-sided bounds on all singular values from a numeric SVD checked with
    rigorous residual norms."""
    u, s, vt = np.linalg.svd(mat.astype(np.float64), full_matrices=False)
    d3 = matprod_residual(u * s, vt, mat.astype(np.float64))
    du = orth_defect(u)
    dv = orth_defect(vt.T)
    scale_lo = math.sqrt(max(0.0, (1.0 - du) * (1.0 - dv)))
    scale_hi = math.sqrt((1.0 + du) * (1.0 + dv))
    extra = hs_norm_upper(IA(-width, width)) if width is not None else 0.0
    lower = s * scale_lo - d3 - extra
    upper = s * scale_hi + d3 + extra
    return u, s, vt, np.maximum(lower, 0.0), upper


def matprod_residual(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    from .intervals import matmul_residual_hs
    return matmul_residual_hs(a, b, c)


def orth_defect(q: np.ndarray) -> float:
    from .intervals import matmul_residual_hs
    return matmul_residual_hs(q.T, q, np.eye(q.shape[1]))


def smallest_singular(mat: np.ndarray, width: np.ndarray | None = None) -> SingularReport:
    """Certified smallest singular value of a (possibly interval-valued) matrix."""
    u, s, vt, lower, upper = _svd_residual_bounds(mat, width)
    v = vt[-1]
    # tighter upper bound: rigorous ||M v|| for the numeric singular vector
    v = v / math.sqrt(float(v @ v))
    if width is None:
        width0 = np.zeros_like(mat, dtype=np.float64)
    else:
        width0 = width
    enc = interval_matvec(IA(mat.astype(np.float64) - width0, mat.astype(np.float64) + width0), v)
    up2 = interval_norm2_upper(enc) / math.sqrt(max(1.0 - 1e-14, float(v @ v) - 1e-14))
    return SingularReport(estimate=float(s[-1]), lower=float(lower[-1]),
                          upper=float(min(upper[-1], up2)), vector=v,
                          all_sigmas=s)


def equilibrate(bmat: np.ndarray, cmat: np.ndarray):
    """Column scaling by 1/||C_col||; generalized singular values are invariant."""
    norms = np.sqrt(np.sum(cmat.astype(np.float64) ** 2, axis=0))
    d = 1.0 / np.maximum(norms, 1e-300)
    return bmat.astype(np.float64) * d, cmat.astype(np.float64) * d, d


def generalized_sigmas(bmat: np.ndarray, cmat: np.ndarray, with_vec: bool = False):
    """Generalized singular values of (B, C) via QR of C; no certification."""
    bs, cs, d = equilibrate(bmat, cmat)
    q, r = np.linalg.qr(cs)
    x = np.linalg.solve(r.T, bs.T).T
    if not with_vec:
        return np.linalg.svd(x, compute_uv=False)
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    v = d * np.linalg.solve(r, vt[-1])
    return s, v / np.linalg.norm(v)


def smallest_generalized_singular(ms: MatrixSet) -> SingularReport:
    """Certified smallest generalized singular value of (B, C).

    Works on the column-equilibrated pair, whose generalized singular values
    coincide with those of (B, C)."""
    bmat, cmat, d = equilibrate(ms.b, ms.c)
    bw = cw = None
    if ms.b_width is not None:
        bw = ms.b_width * d
        cw = ms.c_width * d
    # certified lower bound for sigma_1(C)
    crep = smallest_singular(cmat, cw)
    if crep.lower <= 0:
        raise RuntimeError("C is numerically rank deficient; cannot certify")
    q, r = np.linalg.qr(cmat)
    x = np.linalg.solve(r.T, bmat.T).T
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    v_small = d * np.linalg.solve(r, vt[-1])
    # B = U D (Vt R) with V = R^{-1} Vt^T; check residuals rigorously
    w = vt @ r
    d3 = matprod_residual(u * s, w, bmat)
    if bw is not None:
        d3 += hs_norm_upper(IA(-bw, bw))
    d1 = orth_defect(u)
    # delta_2 = || (VtR)^t (VtR) - C^t C ||: both products bounded rigorously
    d2 = _sym_residual(w, cmat, cw)
    sc = crep.lower
    if d2 > sc:
        err = math.inf
    else:
        err = d3 / sc + float(s[0]) * (d1 / 2.0 + (d2 + d1 * d2) / sc ** 3)
    est = float(s[-1])
    v_small = v_small / math.sqrt(float(v_small @ v_small))
    return SingularReport(estimate=est, lower=max(est - err, 0.0), upper=est + err,
                          vector=v_small, sigma_c_lower=sc, deltas=(d1, d2, d3),
                          all_sigmas=s)


def _sym_residual(w: np.ndarray, cmat: np.ndarray, c_width) -> float:
    """Upper bound for || w^t w - C^t C ||_HS."""
    g1 = w.T @ w
    g2 = cmat.T @ cmat
    r1 = matprod_residual(w.T, w, g1)
    r2 = matprod_residual(cmat.T, cmat, g2)
    num = float(np.linalg.norm(g1 - g2, "fro"))
    extra = 0.0
    if c_width is not None:
        wmag = hs_norm_upper(IA(-c_width, c_width))
        extra = 2.0 * wmag * float(np.linalg.norm(cmat, "fro")) + wmag ** 2
    slop = 1e-15 * (float(np.linalg.norm(g1, "fro")) + float(np.linalg.norm(g2, "fro")))
    return num + r1 + r2 + extra + slop
