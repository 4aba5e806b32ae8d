"""Directed-rounding interval arithmetic on numpy arrays.

Intervals are pairs of float64 arrays (lo, hi) with lo <= hi elementwise.
Ring operations are outward-rounded with nextafter, which is rigorous because
IEEE +,-,*,/ and sqrt are correctly rounded.  Library transcendentals (exp,
log, cosh, ...) are not correctly rounded; results are widened by a few ulp
(ULP_SLOP), which covers any faithful libm.  This is the usual "trust the
math library" caveat of computer-assisted proofs and is documented in the
package README.
"""

from __future__ import annotations

import math

import numpy as np

ULP_SLOP = 4

_INF = np.inf


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _widen(x, n=ULP_SLOP):
    lo = x
    hi = x
    for _ in range(n):
        lo = np.nextafter(lo, -_INF)
        hi = np.nextafter(hi, _INF)
    return lo, hi


class IA:
    """Interval array: elementwise [lo, hi] enclosure."""

    __slots__ = ("lo", "hi")
    __array_priority__ = 100.0

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=np.float64)
        hi = lo if hi is None else np.asarray(hi, dtype=np.float64)
        self.lo = lo
        self.hi = hi

    # -- constructors ---------------------------------------------------
    @staticmethod
    def exact(x):
        x = np.asarray(x, dtype=np.float64)
        return IA(x, x.copy())

    @staticmethod
    def from_ulp(x, n=ULP_SLOP):
        lo, hi = _widen(np.asarray(x, dtype=np.float64), n)
        return IA(lo, hi)

    @staticmethod
    def zeros(shape=()):
        z = np.zeros(shape)
        return IA(z, z.copy())

    # -- inspection ------------------------------------------------------
    @property
    def shape(self):
        return np.shape(self.lo)

    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def width(self):
        return _up(self.hi - self.lo)

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        m = np.minimum(np.abs(self.lo), np.abs(self.hi))
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0, m)

    def contains(self, x):
        return np.all((self.lo <= x) & (x <= self.hi))

    def __getitem__(self, idx):
        return IA(self.lo[idx], self.hi[idx])

    def __setitem__(self, idx, val):
        val = as_ia(val)
        self.lo[idx] = val.lo
        self.hi[idx] = val.hi

    def reshape(self, *shape):
        return IA(self.lo.reshape(*shape), self.hi.reshape(*shape))

    def __len__(self):
        return len(self.lo)

    def __repr__(self):
        return f"IA({self.lo!r}, {self.hi!r})"

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return IA(-self.hi, -self.lo)

    def __add__(self, other):
        o = as_ia(other)
        return IA(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = as_ia(other)
        return IA(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return as_ia(other) - self

    def __mul__(self, other):
        o = as_ia(other)
        p1 = self.lo * o.lo
        p2 = self.lo * o.hi
        p3 = self.hi * o.lo
        p4 = self.hi * o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return IA(_down(lo), _up(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_ia(other)
        if np.any((o.lo <= 0) & (o.hi >= 0)):
            raise ZeroDivisionError("interval division by interval containing 0")
        p1 = self.lo / o.lo
        p2 = self.lo / o.hi
        p3 = self.hi / o.lo
        p4 = self.hi / o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return IA(_down(lo), _up(hi))

    def __rtruediv__(self, other):
        return as_ia(other) / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        if n == 0:
            return IA.exact(np.ones(self.shape))
        out = self
        for _ in range(n - 1):
            out = out * self
        if n % 2 == 0:
            lo = np.where((self.lo <= 0) & (self.hi >= 0), 0.0, out.lo)
            out = IA(lo, out.hi)
        return out

    # -- reductions -------------------------------------------------------
    def sum(self, axis=None):
        # outward rounding once per term via cumulative bound: n*eps slop
        lo = np.sum(self.lo, axis=axis)
        hi = np.sum(self.hi, axis=axis)
        n = self.lo.size if axis is None else self.lo.shape[axis]
        slop = (n + 1) * np.finfo(np.float64).eps
        mag = np.maximum(np.sum(np.abs(self.lo), axis=axis), np.sum(np.abs(self.hi), axis=axis))
        return IA(_down(lo - slop * mag), _up(hi + slop * mag))

    def abs(self):
        return IA(self.mig(), self.mag())


def as_ia(x):
    return x if isinstance(x, IA) else IA.exact(x)


def hull(a, b):
    a, b = as_ia(a), as_ia(b)
    return IA(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))


# -- monotone elementary functions ---------------------------------------

def _mono(f, x, n=ULP_SLOP):
    x = as_ia(x)
    lo, _ = _widen(f(x.lo), n)
    _, hi = _widen(f(x.hi), n)
    return IA(lo, hi)


def iexp(x):
    return _mono(np.exp, x)


def ilog(x):
    x = as_ia(x)
    if np.any(x.lo <= 0):
        raise ValueError("log of interval touching 0")
    return _mono(np.log, x)


def isqrt(x):
    x = as_ia(x)
    if np.any(x.lo < 0):
        raise ValueError("sqrt of negative interval")
    return IA(np.maximum(_down(np.sqrt(x.lo)), 0.0), _up(np.sqrt(x.hi)))


def isinh(x):
    return _mono(np.sinh, x)


def icosh(x):
    x = as_ia(x)
    lo_at = np.where((x.lo <= 0) & (x.hi >= 0), 0.0, np.minimum(np.abs(x.lo), np.abs(x.hi)))
    hi_at = np.maximum(np.abs(x.lo), np.abs(x.hi))
    lo, _ = _widen(np.cosh(lo_at))
    _, hi = _widen(np.cosh(hi_at))
    return IA(np.maximum(lo, 1.0), hi)


def iarctan(x):
    return _mono(np.arctan, x)


def iarcsinh(x):
    return _mono(np.arcsinh, x)


def iarccosh(x):
    x = as_ia(x)
    if np.any(x.lo < 1.0):
        raise ValueError("arccosh needs x >= 1")
    return _mono(np.arccosh, x)


def iarccos(x):
    x = as_ia(x)
    if np.any(x.lo < -1.0) or np.any(x.hi > 1.0):
        raise ValueError("arccos needs [-1, 1]")
    lo, _ = _widen(np.arccos(x.hi))
    _, hi = _widen(np.arccos(x.lo))
    return IA(np.maximum(lo, 0.0), hi)


def iatanh(x):
    x = as_ia(x)
    if np.any(np.abs(x.lo) >= 1) or np.any(np.abs(x.hi) >= 1):
        raise ValueError("artanh needs (-1, 1)")
    return _mono(np.arctanh, x)


def itanh(x):
    return _mono(np.tanh, x)


def ierf(x):
    return _mono(np.vectorize(math.erf), x)


def _trig(x, fun, crit_offset):
    """Range of sin (crit_offset=pi/2) or cos (crit_offset=0) over intervals."""
    x = as_ia(x)
    v1, w1 = _widen(fun(x.lo))
    v2, w2 = _widen(fun(x.hi))
    lo = np.minimum(v1, v2)
    hi = np.maximum(w1, w2)
    # critical points of fun: crit_offset + k*pi (maxima at even k, minima at odd k)
    two_pi = 2.0 * np.pi
    kmax = np.floor((x.hi - crit_offset) / two_pi)
    kmin = np.floor((x.hi - crit_offset - np.pi) / two_pi)
    has_max = crit_offset + kmax * two_pi >= x.lo - 1e-300
    has_min = crit_offset + np.pi + kmin * two_pi >= x.lo - 1e-300
    # pessimistic on argument reduction: treat "maybe" as yes when wide
    wide = (x.hi - x.lo) >= two_pi
    hi = np.where(has_max | wide, 1.0, hi)
    lo = np.where(has_min | wide, -1.0, lo)
    return IA(np.maximum(lo, -1.0), np.minimum(hi, 1.0))


def isin(x):
    return _trig(x, np.sin, np.pi / 2.0)


def icos(x):
    return _trig(x, np.cos, 0.0)


# -- linear algebra helpers ------------------------------------------------

def dot_bound(a_mag, b_mag):
    """Rigorous slop for a float dot product of vectors bounded by the given magnitudes."""
    n = a_mag.shape[-1]
    u = np.finfo(np.float64).eps / 2.0
    gamma = (n + 2) * u / (1.0 - (n + 2) * u)
    return gamma * np.sum(a_mag * b_mag, axis=-1)


def interval_matvec(a: IA, v: np.ndarray) -> IA:
    """Enclosure of A @ v for interval matrix A and exact float vector v."""
    vp = np.where(v > 0, v, 0.0)
    vn = np.where(v < 0, v, 0.0)
    lo = a.lo @ vp + a.hi @ vn
    hi = a.hi @ vp + a.lo @ vn
    amag = np.maximum(np.abs(a.lo), np.abs(a.hi))
    slop = dot_bound(amag, np.abs(v)[None, :] if amag.ndim == 2 else np.abs(v))
    return IA(_down(lo - slop), _up(hi + slop))


def interval_norm2_upper(x: IA) -> float:
    """Upper bound for the Euclidean norm of an interval vector."""
    m = x.mag()
    s = float(np.sum(m.astype(np.float64) ** 2))
    slop = (m.size + 2) * np.finfo(np.float64).eps * s
    return math.sqrt(s + slop)


def hs_norm_upper(a: IA) -> float:
    """Upper bound of the Hilbert-Schmidt norm of an interval matrix."""
    return interval_norm2_upper(a.reshape(-1))


def matmul_residual_hs(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Rigorous upper bound for ||a @ b - c||_HS with float inputs."""
    prod = a @ b
    r = prod - c
    k = a.shape[-1]
    u = np.finfo(np.float64).eps / 2.0
    gamma = (k + 2) * u / (1.0 - (k + 2) * u)
    err = gamma * (np.abs(a) @ np.abs(b))
    r_mag = np.abs(r) + err + np.finfo(np.float64).eps * (np.abs(prod) + np.abs(c))
    s = float(np.sum(r_mag ** 2))
    slop = (r_mag.size + 2) * np.finfo(np.float64).eps * s
    return math.sqrt(s + slop)
