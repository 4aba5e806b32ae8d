"""Pants decompositions of hyperbolic surfaces in cylinder coordinates.

A surface is described by a trivalent graph (one vertex per pair of pants,
one edge per gluing curve) together with curve lengths and twists.  Each
pair of pants is cut open along the shortest geodesic arc joining its two
non-core boundary circles, which turns it into an annulus sitting inside a
hyperbolic cylinder around the remaining boundary circle.  All boundary
segments are stored with Fermi-coordinate data (distance to the core, foot
position, arclength range) so that cylinder eigenfunctions and their
derivatives can be evaluated on them directly.

Conventions used throughout:
  * Fermi coordinates (rho, t) on the cylinder of a closed geodesic of
    length ell, metric cosh(rho)^2 dt^2 + drho^2; pieces live in rho >= 0.
  * A geodesic disjoint from the core with foot distance D and foot
    position t0 is parametrized by arclength sigma from the foot:
        sinh rho(sigma) = sinh D * cosh sigma
        tanh (t(sigma) - t0) = tanh sigma / cosh D
  * Each boundary circle of a pants carries a marked point (the foot of the
    perpendicular to the cyclically next boundary circle) and the boundary
    orientation induced by the pants; gluing identifies arclength parameters
    via u' = twist * ell - u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hypmath import parse_length_expr


class GraphError(ValueError):
    """Raised when the pants graph or curve data is inconsistent."""


MIN_CURVE_LEN = 1e-6
MAX_CURVE_LEN = 50.0


@dataclass(frozen=True)
class Curve:
    length: float
    twist: float  # fraction of length


@dataclass(frozen=True)
class FenchelNielsen:
    genus: int
    curves: tuple[Curve, ...]
    pants: tuple[tuple[tuple[int, int], ...], ...]  # per pants: three (curve, end)

    def validate(self) -> None:
        g = self.genus
        if g < 2:
            raise GraphError(f"genus must be >= 2, got {g}")
        if len(self.curves) != 3 * g - 3:
            raise GraphError(f"expected {3 * g - 3} curves for genus {g}, got {len(self.curves)}")
        if len(self.pants) != 2 * g - 2:
            raise GraphError(f"expected {2 * g - 2} pants for genus {g}, got {len(self.pants)}")
        seen: dict[tuple[int, int], int] = {}
        for p, ends in enumerate(self.pants):
            if len(ends) != 3:
                raise GraphError(f"pants {p} has valence {len(ends)}, expected 3")
            for cid, end in ends:
                if not 0 <= cid < len(self.curves):
                    raise GraphError(f"pants {p} references unknown curve {cid}")
                if end not in (0, 1):
                    raise GraphError(f"curve end must be 0 or 1, got {end}")
                if (cid, end) in seen:
                    raise GraphError(f"curve end ({cid},{end}) attached twice")
                seen[(cid, end)] = p
        for cid in range(len(self.curves)):
            for end in (0, 1):
                if (cid, end) not in seen:
                    raise GraphError(f"curve end ({cid},{end}) is dangling")
        for cid, c in enumerate(self.curves):
            if not (c.length > 0):
                raise GraphError(f"curve {cid} has non-positive length")
            if c.length < MIN_CURVE_LEN or c.length > MAX_CURVE_LEN:
                raise GraphError(
                    f"curve {cid} length {c.length} outside supported range "
                    f"[{MIN_CURVE_LEN}, {MAX_CURVE_LEN}]"
                )


# -- elementary pants trigonometry ----------------------------------------

def perp_distance(la: float, lb: float, lc: float) -> float:
    """Distance between the boundary circles of lengths la and lb on a pants
    with boundary lengths (la, lb, lc), from the right-angled hexagon relation."""
    xa, xb, xc = la / 2.0, lb / 2.0, lc / 2.0
    num = math.cosh(xc) + math.cosh(xa) * math.cosh(xb)
    den = math.sinh(xa) * math.sinh(xb)
    return math.acosh(num / den)


def fermi_to_halfplane(rho: float, t: float) -> complex:
    return math.exp(t) * complex(math.tanh(rho), 1.0 / math.cosh(rho))


def frame_to_euclid(rho: float, t: float, w_rho: float, w_t: float) -> complex:
    """Euclidean vector of a unit tangent with Fermi frame components."""
    z = fermi_to_halfplane(rho, t)
    sech = 1.0 / math.cosh(rho)
    e_rho = math.exp(t) * sech * complex(sech, -math.tanh(rho))
    e_t = z * sech
    return w_rho * e_rho + w_t * e_t


def hyp_dist(z1: complex, z2: complex) -> float:
    q = 1.0 + (abs(z1 - z2) ** 2) / (2.0 * z1.imag * z2.imag)
    return math.acosh(max(q, 1.0))


@dataclass(frozen=True)
class GeoLine:
    """Geodesic of the cylinder disjoint from the core: foot distance D > 0,
    foot position t0 along the core, on the rho > 0 side."""

    dist: float
    t_foot: float

    def point(self, sigma):
        sr = math.sinh(self.dist) * np.cosh(sigma)
        rho = np.arcsinh(sr)
        t = self.t_foot + np.arctanh(np.tanh(sigma) / math.cosh(self.dist))
        return rho, t

    def frame(self, sigma):
        """Unit tangent (d/dsigma) and the away-from-core unit normal, in the
        orthonormal Fermi frame (e_rho, e_t)."""
        rho, _ = self.point(sigma)
        ch = np.cosh(rho)
        t_rho = math.sinh(self.dist) * np.sinh(sigma) / ch
        t_t = math.cosh(self.dist) / ch
        return (t_rho, t_t), (t_t, -t_rho)

    def sigma_of_point(self, rho: float, t: float) -> float:
        gap = max(math.sinh(rho) ** 2 - math.sinh(self.dist) ** 2, 0.0)
        sig = math.asinh(math.sqrt(gap) / math.sinh(self.dist))
        return sig if t >= self.t_foot else -sig


def line_from_point_direction(z: complex, v: complex) -> tuple[float, float]:
    """(dist, t_foot) of the geodesic through z with Euclidean direction v,
    relative to the core on the imaginary axis.  Requires the geodesic to be
    ultraparallel to the axis."""
    x, y = z.real, z.imag
    if abs(v.real) < 1e-14 * abs(v):
        raise GraphError("geodesic asymptotic to the core axis")
    c = x + y * v.imag / v.real
    r = abs(z - c)
    if abs(c) <= r:
        raise GraphError("geodesic meets the core axis")
    dist = math.acosh(abs(c) / r)
    t_foot = 0.5 * math.log(c * c - r * r)
    return dist, t_foot


def line_line_distance(c1: float, r1: float, c2: float, r2: float) -> float:
    """Distance between two disjoint half-circle geodesics centered on the real axis."""
    d2 = ((c1 - c2) ** 2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
    if d2 <= 1.0:
        return 0.0
    return math.acosh(d2)


# -- decomposition data -----------------------------------------------------

@dataclass(frozen=True)
class SegmentSide:
    """One side of a cutting segment: where it sits on one cylinder piece.

    kind 'core': points (0, t_off - u); kind 'far'/'seam': points on `line`
    at sigma = sigma0 + direction * u (or a wrapped variant for kind 'wrap').
    """

    piece: int
    kind: str  # 'core' | 'far' | 'wrap' | 'seam'
    line: GeoLine | None
    sigma0: float
    direction: float
    t_off: float
    wrap_len: float

    def located(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "core":
            t = np.mod(self.t_off - u, self.wrap_len)
            z = np.zeros_like(u)
            rho, t = z, t
            tan = (z, np.full_like(u, -1.0))
            nor = (np.full_like(u, -1.0), z)
            return rho, t, tan, nor
        if self.kind == "wrap":
            half = self.wrap_len / 2.0
            sigma = np.mod(u + half, self.wrap_len) - half
            sigma = self.sigma0 + self.direction * sigma
        else:
            sigma = self.sigma0 + self.direction * u
        rho, t = self.line.point(sigma)
        (t_rho, t_t), (n_rho, n_t) = self.line.frame(sigma)
        tan = (self.direction * t_rho, self.direction * t_t)
        return rho, t, tan, (n_rho, n_t)


@dataclass(frozen=True)
class GeodesicSegment:
    index: int
    length: float
    side_a: SegmentSide
    side_b: SegmentSide
    partner_sign: float  # +1: u_b = u_a (seam); -1: u_b = offset - u_a (curve)
    partner_offset: float
    curve: int | None  # decomposition curve id, None for cut seams

    def partner_u(self, u):
        if self.partner_sign > 0:
            return np.asarray(u, dtype=float)
        return np.mod(self.partner_offset - np.asarray(u, dtype=float), self.length)


@dataclass(frozen=True)
class CylinderPiece:
    index: int
    pants: int
    core_curve: int
    ell: float
    rho_inv: float  # invariant sub-cylinder [0, rho_inv]
    rho_max: float  # outer radius actually reached by the piece
    far_lines: tuple[GeoLine, ...]
    area: float

    @property
    def r_inv(self) -> float:
        return math.sinh(self.rho_inv)

    @property
    def r_max(self) -> float:
        return math.sinh(self.rho_max)

    def halfwidth(self, margin: float = 0.0) -> float:
        return self.rho_max + margin


@dataclass(frozen=True)
class CollocationGrid:
    segment: int
    n: int
    delta: float
    points_u: np.ndarray
    weights: np.ndarray  # Simpson b_i in {1,4,2,...,4,1}

    def quad_factors(self) -> np.ndarray:
        return np.sqrt(self.delta * self.weights / 3.0)


@dataclass(frozen=True)
class SurfaceDecomposition:
    fn: FenchelNielsen
    pieces: tuple[CylinderPiece, ...]
    segments: tuple[GeodesicSegment, ...]
    systole_lower: float
    cut_length: float  # total length of the cutting locus
    min_side_distance: float
    area: float

    @property
    def genus(self) -> int:
        return self.fn.genus

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    def cylinder_keys(self):
        """Distinct (ell, r_max) solve keys and the pieces sharing them."""
        keys: dict[tuple[float, float], list[int]] = {}
        for p in self.pieces:
            keys.setdefault((p.ell, round(p.r_max, 12)), []).append(p.index)
        return keys


# -- pants assembly ---------------------------------------------------------

def _pants_layout(ells: tuple[float, float, float]):
    """Geometry of one cut-open pants with core boundary first.

    Returns foot distances to the two far circles, their lines, the two seam
    sides, corner radius, invariant radius, and the seam length.
    """
    la, lb, lc = ells
    d_ab = perp_distance(la, lb, lc)
    d_ac = perp_distance(la, lc, lb)
    d_bc = perp_distance(lb, lc, la)

    line_b = GeoLine(d_ab, 0.0)
    line_c = GeoLine(d_ac, la / 2.0)

    def corner(line: GeoLine, sigma: float):
        rho, t = line.point(sigma)
        (t_rho, t_t), _ = line.frame(sigma)
        z = fermi_to_halfplane(float(rho), float(t))
        tanv = frame_to_euclid(float(rho), float(t), float(t_rho), float(t_t))
        return z, tanv, float(rho), float(t)

    zb, tb, rho_b, t_b = corner(line_b, lb / 2.0)
    zc, tc, rho_c, t_c = corner(line_c, -lc / 2.0)

    # seam: geodesic through the b-corner orthogonal to the b-circle
    nb = tb * 1j  # rotate tangent by 90 degrees (conformal model)
    best = None
    for v in (nb, -nb):
        try:
            dist, t_foot = line_from_point_direction(zb, v)
        except GraphError:
            continue
        line_s = GeoLine(dist, t_foot)
        sig_b = line_s.sigma_of_point(rho_b, t_b)
        sig_c = line_s.sigma_of_point(rho_c, t_c)
        zc_test = fermi_to_halfplane(*map(float, line_s.point(sig_c)))
        if abs(zc_test - zc) < 1e-9 * (1.0 + abs(zc)) and abs(abs(sig_c - sig_b) - d_bc) < 1e-8:
            best = (line_s, sig_b, sig_c)
            break
    if best is None:
        raise GraphError("seam construction failed; pants geometry degenerate")
    line_s, sig_b, sig_c = best

    rho_max = max(rho_b, rho_c)
    rho_inv = min(d_ab, d_ac, _segment_min_rho(line_s, sig_b, sig_c))

    # closed-form area below a far segment: arctan(sinh D sinh s / cosh D)
    def band(line: GeoLine, s1: float, s2: float) -> float:
        f = lambda s: math.atan(math.sinh(line.dist) * math.sinh(s) / math.cosh(line.dist))
        return f(s2) - f(s1)

    area = band(line_b, -lb / 2.0, lb / 2.0) + band(line_c, -lc / 2.0, lc / 2.0)
    area += 2.0 * abs(band(line_s, sig_b, sig_c))
    return {
        "d": (d_ab, d_ac, d_bc),
        "line_b": line_b,
        "line_c": line_c,
        "line_seam": line_s,
        "seam_sig": (sig_b, sig_c),
        "rho_max": rho_max,
        "rho_inv": rho_inv,
        "area": area,
    }


def _segment_min_rho(line: GeoLine, s1: float, s2: float) -> float:
    lo, hi = min(s1, s2), max(s1, s2)
    if lo <= 0.0 <= hi:
        return line.dist
    s = min(abs(lo), abs(hi))
    return math.asinh(math.sinh(line.dist) * math.cosh(s))


def _core_choice_cost(ells: tuple[float, float, float]) -> float:
    try:
        lay = _pants_layout(ells)
    except (GraphError, ValueError, OverflowError):
        return math.inf
    return ells[0] * math.cosh(lay["rho_max"])


def build_decomposition(fn: FenchelNielsen) -> SurfaceDecomposition:
    """Resolve Fenchel-Nielsen data into cylinder pieces and paired cut segments."""
    fn.validate()
    end_owner: dict[tuple[int, int], tuple[int, int]] = {}
    for p, ends in enumerate(fn.pants):
        for slot, (cid, end) in enumerate(ends):
            end_owner[(cid, end)] = (p, slot)

    pieces: list[CylinderPiece] = []
    layouts = []
    core_sockets = []
    total_area = 0.0
    for p, ends in enumerate(fn.pants):
        lens = [fn.curves[cid].length for cid, _ in ends]
        best_k, best_cost = 0, math.inf
        for k in range(3):
            cost = _core_choice_cost((lens[k], lens[(k + 1) % 3], lens[(k + 2) % 3]))
            if cost < best_cost:
                best_k, best_cost = k, cost
        if not math.isfinite(best_cost):
            raise GraphError(f"pants {p} geometry is degenerate for all core choices")
        k = best_k
        lay = _pants_layout((lens[k], lens[(k + 1) % 3], lens[(k + 2) % 3]))
        layouts.append(lay)
        core_sockets.append(k)
        total_area += lay["area"]
        pieces.append(
            CylinderPiece(
                index=p,
                pants=p,
                core_curve=ends[k][0],
                ell=lens[k],
                rho_inv=lay["rho_inv"],
                rho_max=lay["rho_max"],
                far_lines=(lay["line_b"], lay["line_c"], lay["line_seam"]),
                area=lay["area"],
            )
        )

    # canonical side charts: socket kappa -> core, kappa+1 -> line_b, kappa+2 -> line_c
    def side_for(p: int, slot: int) -> SegmentSide:
        kappa = core_sockets[p]
        lay = layouts[p]
        ends = fn.pants[p]
        la = fn.curves[ends[kappa][0]].length
        rel = (slot - kappa) % 3
        if rel == 0:
            return SegmentSide(piece=p, kind="core", line=None, sigma0=0.0,
                               direction=-1.0, t_off=0.0, wrap_len=la)
        if rel == 1:
            lb = fn.curves[ends[slot][0]].length
            return SegmentSide(piece=p, kind="far", line=lay["line_b"],
                               sigma0=-lb / 2.0, direction=1.0, t_off=0.0, wrap_len=lb)
        lc = fn.curves[ends[slot][0]].length
        return SegmentSide(piece=p, kind="wrap", line=lay["line_c"],
                           sigma0=0.0, direction=1.0, t_off=0.0, wrap_len=lc)

    segments: list[GeodesicSegment] = []
    cut_length = 0.0
    for cid, curve in enumerate(fn.curves):
        pa, slot_a = end_owner[(cid, 0)]
        pb, slot_b = end_owner[(cid, 1)]
        segments.append(
            GeodesicSegment(
                index=len(segments),
                length=curve.length,
                side_a=side_for(pa, slot_a),
                side_b=side_for(pb, slot_b),
                partner_sign=-1.0,
                partner_offset=(curve.twist * curve.length) % curve.length,
                curve=cid,
            )
        )
        cut_length += curve.length

    for p in range(len(fn.pants)):
        lay = layouts[p]
        line_s: GeoLine = lay["line_seam"]
        sig_b, sig_c = lay["seam_sig"]
        seam_len = abs(sig_c - sig_b)
        direction = 1.0 if sig_c >= sig_b else -1.0
        side_plus = SegmentSide(piece=p, kind="seam", line=line_s, sigma0=sig_b,
                                direction=direction, t_off=0.0, wrap_len=seam_len)
        mirror = GeoLine(line_s.dist, -line_s.t_foot)
        side_minus = SegmentSide(piece=p, kind="seam", line=mirror, sigma0=-sig_b,
                                 direction=-direction, t_off=0.0, wrap_len=seam_len)
        segments.append(
            GeodesicSegment(
                index=len(segments),
                length=seam_len,
                side_a=side_plus,
                side_b=side_minus,
                partner_sign=1.0,
                partner_offset=0.0,
                curve=None,
            )
        )
        cut_length += seam_len

    systole_lower = min(c.length for c in fn.curves)
    min_side = _min_nonadjacent_distance(fn, pieces, layouts, systole_lower)
    return SurfaceDecomposition(
        fn=fn,
        pieces=tuple(pieces),
        segments=tuple(segments),
        systole_lower=systole_lower,
        cut_length=cut_length,
        min_side_distance=min_side,
        area=total_area,
    )


def _min_nonadjacent_distance(fn, pieces, layouts, systole) -> float:
    """Minimal distance between non-adjacent boundary sides over all pieces,
    capped by the systole; this is the collar scale entering the coupling
    constant."""
    best = systole
    for piece, lay in zip(pieces, layouts):
        d_ab, d_ac, d_bc = lay["d"]
        line_s: GeoLine = lay["line_seam"]
        sig_b, sig_c = lay["seam_sig"]
        cands = [d_ab, d_ac, d_bc, _segment_min_rho(line_s, sig_b, sig_c)]
        # the two seam copies (mirror images): distance between their lines
        cs = math.exp(line_s.t_foot) / math.tanh(line_s.dist)
        rs = math.exp(line_s.t_foot) / math.sinh(line_s.dist)
        cm = math.exp(-line_s.t_foot) / math.tanh(line_s.dist)
        rm = math.exp(-line_s.t_foot) / math.sinh(line_s.dist)
        cands.append(line_line_distance(cs, rs, cm, rm))
        # seam copy vs. the image of the seam shifted one full turn
        cands.append(line_line_distance(cs, rs, math.exp(piece.ell) * cs, math.exp(piece.ell) * rs))
        best = min(best, min(c for c in cands if c > 0))
    return best


def min_nonadjacent_side_distance(dec: SurfaceDecomposition) -> float:
    if not (dec.min_side_distance > 0):
        raise GraphError("degenerate polygon: non-adjacent sides touch")
    return dec.min_side_distance


def make_grids(dec: SurfaceDecomposition, delta_target: float) -> list[CollocationGrid]:
    """Composite Simpson grids: smallest odd n >= 3 with step <= delta_target;
    partner grids are mirrored through the segment pairing."""
    if not delta_target > 0:
        raise ValueError("delta_target must be positive")
    grids = []
    for seg in dec.segments:
        n_sub = max(2, math.ceil(seg.length / delta_target))
        if n_sub % 2 == 1:
            n_sub += 1
        n = n_sub + 1
        delta = seg.length / (n - 1)
        w = np.ones(n)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        grids.append(
            CollocationGrid(
                segment=seg.index,
                n=n,
                delta=delta,
                points_u=np.linspace(0.0, seg.length, n),
                weights=w,
            )
        )
    return grids
