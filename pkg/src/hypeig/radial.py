"""Radial solutions of the cylinder eigenfunction ODE.

In coordinates r = sinh(rho) on the cylinder of circumference ell, the
radial factor of an eigenfunction with Fourier index k solves

    (1+r^2)^2 P'' + 2 r (1+r^2) P' + (lam (1+r^2) - q^2) P = 0,   q = 2 pi k / ell,

which has polynomial coefficients, so Taylor stepping with a fixed order is
exact arithmetic on polynomial data.  The solver advances all Fourier
indices simultaneously (coefficient arrays are (nk, 2) for the even/odd
initial data (1,0) and (0,1)).

Validated mode bounds the difference between the stored piecewise
polynomial and the exact solution: the polynomial's defect against the ODE
is evaluated with interval arithmetic on each step and propagated through
the Gronwall envelope of the first-order system in the angle variable
phi = 2 arctan(tanh(rho/2)), where the equation reads Psi'' = V Psi with
V = q^2 - lam / cos^2(phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .intervals import IA, as_ia, iarccos, iarctan, icosh, isqrt

TAYLOR_ORDER = 24


class ToleranceNotMet(RuntimeError):
    def __init__(self, achieved: float, requested: float):
        super().__init__(f"validated ODE bound {achieved:.3e} exceeds requested {requested:.3e}")
        self.achieved = achieved
        self.requested = requested


class TruncationPrecondition(ValueError):
    def __init__(self, n_min: int):
        super().__init__(f"Fourier truncation bound needs N >= {n_min}")
        self.n_min = n_min


@dataclass(frozen=True)
class SpectralParameter:
    lam: float

    @property
    def s(self) -> complex:
        if self.lam >= 0.25:
            return complex(0.5, math.sqrt(self.lam - 0.25))
        return complex(0.5 + math.sqrt(0.25 - self.lam), 0.0)

    @property
    def sigma(self) -> float:
        return self.s.real

    @property
    def r_im(self) -> float:
        return self.s.imag


def step_size(lam: float, q_max: float) -> float:
    return min(0.5, 1.5 / math.sqrt(lam + q_max * q_max + 1.0))


class RadialBasis:
    """Piecewise-polynomial radial solutions for k = 0..N on one cylinder."""

    def __init__(self, ell: float, lam: float, n_four: int, r_max: float,
                 dtype=np.float64, validated: bool = False, tol: float = 1e-12,
                 step_cap: float = 0.22):
        self.ell = float(ell)
        self.lam = float(lam)
        self.n_four = int(n_four)
        self.qs = 2.0 * np.pi * np.arange(n_four + 1) / ell
        self.dtype = dtype
        self.validated = validated
        h_freq = step_size(lam, float(self.qs[-1]))
        breaks = [0.0]
        while breaks[-1] < r_max:
            r = breaks[-1]
            # cap against the coefficient singularity at r = +-i and the
            # local oscillation frequency
            breaks.append(r + min(step_cap * math.sqrt(1.0 + r * r), h_freq))
        self.breaks = np.asarray(breaks)
        self.coeffs = self._solve()
        self.eta_val = None
        self.eta_dval = None
        self.tolerance_met = True
        if validated:
            self._validate(tol)

    # -- Taylor recurrence -------------------------------------------------
    def _solve(self):
        P = TAYLOR_ORDER
        nk = self.n_four + 1
        lam = self.dtype(self.lam)
        q2 = (self.qs.astype(self.dtype)) ** 2
        n_steps = len(self.breaks) - 1
        coeffs = np.zeros((nk, 2, n_steps, P + 1), dtype=self.dtype)
        val = np.zeros((nk, 2), dtype=self.dtype)
        dval = np.zeros((nk, 2), dtype=self.dtype)
        val[:, 0] = 1.0
        dval[:, 1] = 1.0
        for step in range(n_steps):
            r0 = self.dtype(self.breaks[step])
            h = self.dtype(self.breaks[step + 1]) - r0
            p = self.dtype(1.0) + r0 * r0
            A = (p * p, 4.0 * r0 * p, 2.0 * p + 4.0 * r0 * r0, 4.0 * r0, self.dtype(1.0))
            B = (2.0 * r0 * p, 2.0 * (2.0 * r0 * r0 + p), 6.0 * r0, self.dtype(2.0))
            C0 = lam * p - q2  # shape (nk,)
            C1 = lam * 2.0 * r0
            C2 = lam
            a = np.zeros((P + 3, nk, 2), dtype=self.dtype)
            a[0] = val
            a[1] = dval
            for n in range(P + 1):
                s = a[n + 1] * (A[1] * (n + 1.0) * n + B[0] * (n + 1.0))
                s = s + a[n] * (C0[:, None] + A[2] * n * (n - 1.0) + B[1] * n)
                if n >= 1:
                    s = s + a[n - 1] * (C1 + A[3] * (n - 1.0) * (n - 2.0) + B[2] * (n - 1.0))
                if n >= 2:
                    s = s + a[n - 2] * (C2 + A[4] * (n - 2.0) * (n - 3.0) + B[3] * (n - 2.0))
                a[n + 2] = -s / (A[0] * (n + 2.0) * (n + 1.0))
            coeffs[:, :, step, :] = np.transpose(a[: P + 1], (1, 2, 0))
            val, dval = _horner_pair(coeffs[:, :, step, :], h)
        return coeffs

    # -- validated error envelope -------------------------------------------
    def _validate(self, tol: float):
        nk = self.n_four + 1
        n_steps = len(self.breaks) - 1
        lam = IA.exact(self.lam)
        q2 = IA.exact(self.qs) ** 2
        E = IA.zeros((nk, 2))
        c_prev = np.ones((nk, 2))
        eta_val = np.zeros((nk, 2, n_steps))
        eta_dval = np.zeros((nk, 2, n_steps))
        for step in range(n_steps):
            r0 = self.breaks[step]
            r1 = self.breaks[step + 1]
            h = r1 - r0
            c = IA.exact(self.coeffs[:, :, step, :].astype(np.float64))
            d_sup = _defect_sup(c, r0, h, lam, q2)
            dphi = iarctan(IA.exact(r1)) - iarctan(IA.exact(r0))
            v_hi = (q2 - self.lam * (1.0 + r0 * r0)).mag()[:, None]
            v_lo = (q2 - self.lam * (1.0 + r1 * r1)).mag()[:, None]
            c_gr = np.maximum(1.0, np.sqrt(np.maximum(v_hi, v_lo))) * np.ones((1, 2))
            E = E * IA.exact(np.maximum(1.0, c_prev / c_gr))
            grow = iexp_upper(c_gr * float(dphi.hi))
            E = (E + d_sup * (float(dphi.hi) / c_gr)) * IA.exact(grow)
            eta_val[:, :, step] = E.mag()
            eta_dval[:, :, step] = E.mag() * c_gr
            # float evaluation jump feeding the next step's initial data
            v_end, dv_end = _horner_pair_interval(c, h)
            if step + 1 < n_steps:
                jump_v = (v_end - IA.exact(self.coeffs[:, :, step + 1, 0].astype(np.float64))).mag()
                jump_dv = (dv_end - IA.exact(self.coeffs[:, :, step + 1, 1].astype(np.float64))).mag()
                E = E + IA.exact(np.sqrt(jump_v ** 2 + (jump_dv / c_gr) ** 2) * (1.0 + 1e-15))
            c_prev = c_gr
        self.eta_val = eta_val
        self.eta_dval = eta_dval
        self.eta_global = float(np.max(eta_val[:, :, -1] + eta_dval[:, :, -1]))
        self.tolerance_met = self.eta_global <= tol
        if not self.tolerance_met:
            self.requested_tol = tol

    # -- evaluation ---------------------------------------------------------
    def eval(self, r_points: np.ndarray):
        """Values and r-derivatives at r_points >= 0: arrays (npts, nk, 2)."""
        r = np.asarray(r_points, dtype=self.dtype)
        if np.any(r < 0) or np.any(r > self.breaks[-1] + 1e-12):
            raise ValueError("evaluation point outside solved range")
        bins = np.clip(np.searchsorted(self.breaks, r, side="right") - 1, 0,
                       len(self.breaks) - 2)
        nk = self.n_four + 1
        val = np.empty((len(r), nk, 2), dtype=self.dtype)
        dval = np.empty_like(val)
        for b in np.unique(bins):
            idx = np.nonzero(bins == b)[0]
            x = (r[idx] - self.dtype(self.breaks[b]))[:, None, None]
            cf = self.coeffs[:, :, b, :]
            v = np.broadcast_to(cf[None, :, :, TAYLOR_ORDER], (len(idx), nk, 2)).copy()
            d = np.zeros_like(v)
            for n in range(TAYLOR_ORDER - 1, -1, -1):
                d = d * x + v
                v = v * x + cf[None, :, :, n]
            val[idx] = v
            dval[idx] = d
        return val, dval

    def eta_at(self, r_points: np.ndarray):
        """Validated (value, derivative) error bounds at the given radii."""
        if self.eta_val is None:
            z = np.zeros((len(r_points), self.n_four + 1, 2))
            return z, z
        bins = np.clip(np.searchsorted(self.breaks, r_points, side="right") - 1, 0,
                       self.eta_val.shape[2] - 1)
        return (np.transpose(self.eta_val[:, :, bins], (2, 0, 1)),
                np.transpose(self.eta_dval[:, :, bins], (2, 0, 1)))

    # -- exact integration ---------------------------------------------------
    def pair_integrals(self, r_hi: float):
        """Exact integrals over [0, r_hi] of products Phi_a Phi_b: (nk, 2, 2)."""
        nk = self.n_four + 1
        out = np.zeros((nk, 2, 2), dtype=self.dtype)
        for step in range(len(self.breaks) - 1):
            a = self.breaks[step]
            if a >= r_hi:
                break
            b = min(self.breaks[step + 1], r_hi)
            cf = self.coeffs[:, :, step, :]
            prod_deg = 2 * TAYLOR_ORDER
            x = self.dtype(b - a)
            for ia in range(2):
                for ib in range(ia, 2):
                    conv = _poly_mul(cf[:, ia, :], cf[:, ib, :])
                    powers = x ** np.arange(1, prod_deg + 2, dtype=self.dtype)
                    integ = conv @ (powers / np.arange(1, prod_deg + 2, dtype=self.dtype))
                    out[:, ia, ib] += integ
                    if ib != ia:
                        out[:, ib, ia] += integ
        return out

    def residual_norms(self, r_hi: float):
        """Upper bounds for the L2(dr) norm over [0, r_hi] of the ODE defect
        of each stored spline, divided by (1+r^2) as in the quasi-mode term."""
        nk = self.n_four + 1
        lam = IA.exact(self.lam)
        q2 = IA.exact(self.qs) ** 2
        total = IA.zeros((nk, 2))
        for step in range(len(self.breaks) - 1):
            a = self.breaks[step]
            if a >= r_hi:
                break
            b = min(self.breaks[step + 1], r_hi)
            c = IA.exact(self.coeffs[:, :, step, :].astype(np.float64))
            d_sup = _defect_sup(c, a, b - a, lam, q2)
            # |chi| = |defect|/(1+r^2) <= defect sup on the step
            total = total + d_sup * d_sup * IA.exact(b - a)
        return np.sqrt(total.mag())


def _defect_sup(c: IA, r0: float, h: float, lam: IA, q2: IA) -> IA:
    """Sup over one step of |A P'' + B P' + C P| for the stored polynomial,
    bounded by the interval sum of absolute Taylor coefficients."""
    P = TAYLOR_ORDER
    r0i = IA.exact(float(r0))
    p = r0i * r0i + 1.0
    A = [p * p, 4.0 * r0i * p, 2.0 * p + 4.0 * r0i * r0i, 4.0 * r0i, IA.exact(1.0)]
    B = [2.0 * r0i * p, 2.0 * (2.0 * r0i * r0i + p), 6.0 * r0i, IA.exact(2.0)]
    C = [lam * p - q2.reshape(-1, 1), 2.0 * lam * r0i, lam]
    d_sup = IA.zeros(c[:, :, 0].shape)
    hpow = 1.0
    for n in range(P + 3):
        term = IA.zeros(c[:, :, 0].shape)
        for j, Aj in enumerate(A):
            m = n - j + 2
            if 2 <= m <= P:
                term = term + Aj * (float(m) * (m - 1.0)) * c[:, :, m]
        for j, Bj in enumerate(B):
            m = n - j + 1
            if 1 <= m <= P:
                term = term + Bj * float(m) * c[:, :, m]
        for j, Cj in enumerate(C):
            m = n - j
            if 0 <= m <= P:
                term = term + Cj * c[:, :, m]
        d_sup = d_sup + term.abs() * hpow
        hpow = hpow * h
    return d_sup


def iexp_upper(x: np.ndarray) -> np.ndarray:
    y = np.exp(x)
    return y * (1.0 + 4e-16)


def _horner_pair(cf, h):
    v = cf[..., TAYLOR_ORDER].copy()
    d = np.zeros_like(v)
    for n in range(TAYLOR_ORDER - 1, -1, -1):
        d = d * h + v
        v = v * h + cf[..., n]
    return v, d


def _horner_pair_interval(c: IA, h: float):
    v = c[:, :, TAYLOR_ORDER]
    d = IA.zeros(v.shape)
    for n in range(TAYLOR_ORDER - 1, -1, -1):
        d = d * h + v
        v = v * h + c[:, :, n]
    return v, d


def _poly_mul(a, b):
    """Row-wise polynomial product: a, b are (nk, P+1) -> (nk, 2P+1)."""
    nk, p1 = a.shape
    out = np.zeros((nk, 2 * p1 - 1), dtype=a.dtype)
    for i in range(p1):
        out[:, i: i + p1] += a[:, i: i + 1] * b
    return out


# -- hypergeometric reference oracle ----------------------------------------

class OracleDomain(ValueError):
    pass


def _series_2f1(a, b, c, w, tol=None):
    """Gauss series at |w| < 1 with a geometric tail bound; mpmath scalars."""
    if abs(w) >= 1:
        raise OracleDomain(f"series argument |w| = {abs(w)} >= 1")
    term = mp.mpf(1)
    total = mp.mpf(1)
    max_term = mp.mpf(1)
    tol = tol or mp.mpf(10) ** (-mp.mp.dps + 5)
    aa, bb = max(abs(a), mp.mpf(1)), max(abs(b), mp.mpf(1))
    for n in range(0, 100000):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * w
        total += term
        max_term = max(max_term, abs(term))
        # |t_{m+1}/t_m| <= G_n for all m >= n+1; G_n decreases in n
        m = n + 1
        gn = abs(w) * (m + aa) * (m + bb) / ((m + 1) * (m + mp.re(c)))
        if gn < 1:
            tail = abs(term) * gn / (1 - gn)
            if tail < tol * max(abs(total), mp.mpf(1)):
                return total, tail, max_term
    raise OracleDomain("hypergeometric series did not converge")


def hypergeometric_reference(sp: SpectralParameter, k: int, ell: float, rho: float,
                             dps: int = 30):
    """(Phi_even, Phi_odd) at rho from the closed-form solutions, evaluated by
    a Pfaff-transformed power series in tanh^2(rho).  Test oracle; raises
    OracleDomain when the series cannot deliver the target accuracy."""
    for attempt in range(4):
        with mp.workdps(dps):
            s = mp.mpc(sp.s)
            iq = mp.mpc(0, mp.pi * k / ell)
            w = mp.tanh(rho) ** 2
            ch = mp.cosh(rho)
            fe, erre, mte = _series_2f1(s / 2 + iq, s / 2 - iq, mp.mpf(1) / 2, w)
            fo, erro, mto = _series_2f1((1 + s) / 2 + iq, (1 + s) / 2 - iq, mp.mpf(3) / 2, w)
            even = ch ** (-s) * fe
            odd = mp.sinh(rho) * ch ** (-(1 + s)) * fo
            lost = mp.log10(max(mte, mto, mp.mpf(1)))
            if lost < dps - 18:
                if abs(mp.im(even)) > 1e-10 * (1 + abs(even)):
                    raise OracleDomain("closed form produced a non-real value")
                return float(mp.re(even)), float(mp.re(odd))
        dps = int(dps + lost + 10)
    raise OracleDomain("could not reach target precision")


def hypergeometric_reference_deriv(sp: SpectralParameter, k: int, ell: float, rho: float,
                                   dps: int = 30):
    """rho-derivatives of the closed-form pair, by high-precision differentiation."""
    with mp.workdps(dps + 10):
        def fe(x):
            e, _ = hypergeometric_reference(sp, k, ell, float(x), dps + 10)
            return mp.mpf(e)

        def fo(x):
            _, o = hypergeometric_reference(sp, k, ell, float(x), dps + 10)
            return mp.mpf(o)

        return float(mp.diff(fe, rho)), float(mp.diff(fo, rho))


# -- Fourier truncation bounds ----------------------------------------------

@dataclass(frozen=True)
class TruncationBound:
    n_four: int
    lam: float
    ell: float
    halfwidth: float
    phi0: float
    a1: float
    a2: float
    a3: float

    @property
    def beta_sup(self) -> float:
        return self.a1

    @property
    def beta_c1(self) -> float:
        return math.sqrt(self.a1 ** 2 + self.a2 ** 2 + self.a3 ** 2)


def min_admissible_n(lam: float, ell: float, halfwidth: float) -> int:
    n = ell * math.sqrt(max(lam, 0.0)) * math.cosh(halfwidth) / (2.0 * math.pi)
    return int(math.floor(n)) + 1


def _c_k(q: IA, lam: float, phi0: float) -> IA:
    """Integral of sqrt(V_k) from phi0 to the turning angle, closed form."""
    sphi = math.sin(phi0)
    q2 = q * q
    if lam <= 0:
        return q * (math.pi / 2.0 - phi0)
    lam_i = IA.exact(lam)
    arg1 = q * sphi / isqrt(q2 - lam_i)
    arg1 = IA(np.minimum(arg1.lo, 1.0), np.minimum(arg1.hi, 1.0))
    term1 = q * iarccos(arg1)
    denom = isqrt(q2 * math.cos(phi0) ** 2 - lam_i)
    term2 = isqrt(lam_i) * iarctan(denom / (isqrt(lam_i) * sphi))
    return term1 - term2


def truncation_bound(sp_or_lam, ell: float, halfwidth: float, n_four: int) -> TruncationBound:
    """Tail bounds A1, A2, A3 for truncating the Fourier expansion at |k| <= N
    on the sub-cylinder |rho| <= halfwidth, with a certified geometric tail."""
    lam = sp_or_lam.lam if isinstance(sp_or_lam, SpectralParameter) else float(sp_or_lam)
    n_min = min_admissible_n(lam, ell, halfwidth)
    if n_four < n_min:
        raise TruncationPrecondition(n_min)
    phi0 = 2.0 * math.atan(math.tanh(halfwidth / 2.0))
    k_star = max(2 * n_four, n_four + 40)
    ks = np.arange(n_four + 1, k_star + 1, dtype=np.float64)
    q = IA.exact(2.0 * np.pi * ks / ell)
    ck = _c_k(q, lam, phi0)
    sech = 1.0 / icosh(ck)
    vphi0 = q * q - IA.exact(lam / math.cos(phi0) ** 2)
    vphi0 = IA(np.maximum(vphi0.lo, 0.0), np.maximum(vphi0.hi, 0.0))
    csch = 1.0 / (icosh(ck) * itanh_pos(ck))
    a1 = (4.0 * sech).sum()
    a2 = (4.0 * q * sech).sum()
    a3 = (4.0 * isqrt(vphi0) * csch).sum()
    # tail beyond k_star: c_k >= theta * k, sech/csch bounded by shifted exponentials
    qfac = 2.0 * math.pi / ell
    theta = _tail_slope(lam, ell, phi0, qfac * k_star) * qfac
    x = math.exp(-theta)
    if not x < 1.0:
        raise TruncationPrecondition(n_min)
    e_first = math.exp(-theta * (k_star + 1))
    sum_geo = e_first / (1.0 - x)
    sum_k = e_first * ((k_star + 1) / (1.0 - x) + x / (1.0 - x) ** 2)
    csch_floor = 1.0 - math.exp(-2.0 * theta * (k_star + 1))
    slop = 1.0 + 1e-7
    a1f = float(a1.hi) + 8.0 * sum_geo * slop
    a2f = float(a2.hi) + 8.0 * qfac * sum_k * slop
    a3f = float(a3.hi) + 8.0 * qfac * sum_k / csch_floor * slop
    return TruncationBound(n_four=n_four, lam=lam, ell=ell, halfwidth=halfwidth,
                           phi0=phi0, a1=a1f, a2=a2f, a3=a3f)


def itanh_pos(x: IA) -> IA:
    lo = np.tanh(x.lo) * (1.0 - 1e-15)
    hi = np.tanh(x.hi) * (1.0 + 1e-15)
    return IA(lo, hi)


def _tail_slope(lam: float, ell: float, phi0: float, q_star: float) -> float:
    """Lower bound of c_k / q_k for all q_k >= q_star: integral of
    sqrt(1 - lam/(q* cos phi)^2) from phi0 to the q*-turning angle."""
    if lam <= 0:
        return (math.pi / 2.0 - phi0) * (1.0 - 1e-12)
    s_star = math.acos(min(1.0, math.sqrt(lam) / q_star))
    if s_star <= phi0:
        return 0.0
    n = 2000
    phis = np.linspace(phi0, s_star, n + 1)
    integrand = np.sqrt(np.maximum(0.0, 1.0 - lam / (q_star * np.cos(phis)) ** 2))
    # lower Riemann bound: integrand is decreasing in phi
    val = float(np.sum(integrand[1:]) * (s_star - phi0) / n)
    return max(val * (1.0 - 1e-12), 0.0)


# -- single-solution convenience API ------------------------------------------

@dataclass
class RadialSolution:
    ell: float
    k: int
    parity: str  # "even" | "odd"
    lam: float
    breaks: np.ndarray
    coeffs: np.ndarray  # (n_steps, order+1)
    eta_ode: float
    tolerance_met: bool
    norm_const: float = 1.0

    def eval(self, r_points):
        r = np.asarray(r_points, dtype=float)
        sign = np.where(r < 0, -1.0 if self.parity == "odd" else 1.0, 1.0)
        dsign = np.where(r < 0, -1.0 if self.parity == "even" else 1.0, 1.0)
        ra = np.abs(r)
        bins = np.clip(np.searchsorted(self.breaks, ra, side="right") - 1, 0,
                       len(self.breaks) - 2)
        val = np.empty_like(ra)
        dval = np.empty_like(ra)
        for b in np.unique(bins):
            idx = np.nonzero(bins == b)[0]
            x = ra[idx] - self.breaks[b]
            cf = self.coeffs[b]
            v = np.full(len(idx), cf[-1])
            d = np.zeros(len(idx))
            for n in range(len(cf) - 2, -1, -1):
                d = d * x + v
                v = v * x + cf[n]
            val[idx], dval[idx] = v, d
        return self.norm_const * sign * val, self.norm_const * dsign * dval


def solve_radial(sp_or_lam, k: int, ell: float, r_max: float, tol: float = 1e-10,
                 validated: bool = True):
    """Both parity solutions of the radial equation for one Fourier index.

    Validated mode reports a global C1 error bound; if the bound misses the
    requested tolerance the achieved value is still reported and the
    tolerance_met flag is cleared.
    """
    lam = sp_or_lam.lam if isinstance(sp_or_lam, SpectralParameter) else float(sp_or_lam)
    basis = RadialBasis(ell=ell, lam=lam, n_four=abs(k), r_max=r_max,
                        validated=validated, tol=tol)
    out = []
    for p, name in ((0, "even"), (1, "odd")):
        if validated:
            eta = float(np.max(basis.eta_val[abs(k), p, -1] + basis.eta_dval[abs(k), p, -1]))
        else:
            eta = 0.0
        out.append(RadialSolution(
            ell=ell, k=k, parity=name, lam=lam, breaks=basis.breaks.copy(),
            coeffs=basis.coeffs[abs(k), p].astype(np.float64),
            eta_ode=eta, tolerance_met=(eta <= tol)))
    return tuple(out)


def normalize(sol: RadialSolution, window: tuple[float, float]) -> RadialSolution:
    """Rescale so the full basis function has unit L2 norm on the invariant
    sub-cylinder window (measure dr dt)."""
    r_lo, r_hi = window
    if not 0.0 <= r_lo < r_hi <= sol.breaks[-1] + 1e-12:
        raise ValueError("window outside the solved range")
    total = 0.0
    order = sol.coeffs.shape[1]
    for step in range(len(sol.breaks) - 1):
        a, b = sol.breaks[step], sol.breaks[step + 1]
        lo, hi = max(a, r_lo), min(b, r_hi)
        if lo >= hi:
            continue
        cf = sol.coeffs[step]
        conv = np.convolve(cf, cf)
        powers_hi = (hi - a) ** np.arange(1, 2 * order)
        powers_lo = (lo - a) ** np.arange(1, 2 * order)
        total += float(conv @ ((powers_hi - powers_lo) / np.arange(1, 2 * order)))
    c_t = sol.ell if sol.k == 0 else sol.ell / 2.0
    norm_sq = c_t * total
    if norm_sq <= 0:
        raise ValueError("vanishing norm on the window")
    scale = 1.0 / math.sqrt(norm_sq)
    return RadialSolution(ell=sol.ell, k=sol.k, parity=sol.parity, lam=sol.lam,
                          breaks=sol.breaks, coeffs=sol.coeffs,
                          eta_ode=sol.eta_ode * scale,
                          tolerance_met=sol.tolerance_met,
                          norm_const=sol.norm_const * scale)
