"""Truncated Taylor series (jets) over interval coefficients.

A jet holds Taylor coefficients f[0..m] of a function at a point, so the n-th
derivative is n! * f[n].  Coefficients are interval arrays, which makes every
jet operation an enclosure; evaluating a jet of order m at an interval point
bounds derivatives of composite functions rigorously.  Used for quadrature
remainders and for bounding tangential derivatives along geodesic segments.
"""

from __future__ import annotations

import math

import numpy as np

from .intervals import IA, as_ia, iarcsinh, icos, icosh, iexp, isin, isinh, isqrt

__all__ = ["Jet", "jet_var", "jet_const"]


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = [as_ia(x) for x in coeffs]

    @property
    def order(self):
        return len(self.c) - 1

    def __getitem__(self, n):
        return self.c[n]

    def deriv_bound(self, n):
        """Upper bound for |f^(n)| at the base point."""
        return math.factorial(n) * float(np.max(self.c[n].mag()))

    # -- ring ops ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet([a + b for a, b in zip(self.c, other.c)])
        out = list(self.c)
        out[0] = out[0] + other
        return Jet(out)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-a for a in self.c])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -as_ia(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([a * other for a in self.c])
        m = self.order
        out = []
        for n in range(m + 1):
            s = self.c[0] * other.c[n]
            for j in range(1, n + 1):
                s = s + self.c[j] * other.c[n - j]
            out.append(s)
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        m = self.order
        h = [1.0 / self.c[0]]
        for n in range(1, m + 1):
            s = self.c[1] * h[n - 1]
            for j in range(2, n + 1):
                s = s + self.c[j] * h[n - j]
            h.append(-s / self.c[0])
        return Jet(h)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet([a / other for a in self.c])

    def sqrt(self):
        m = self.order
        h = [isqrt(self.c[0])]
        for n in range(1, m + 1):
            s = self.c[n]
            for j in range(1, n):
                s = s - h[j] * h[n - j]
            h.append(s / (2.0 * h[0]))
        return Jet(h)

    def integrate(self, f0):
        """Antiderivative jet with value f0, one order higher."""
        out = [as_ia(f0)]
        for n in range(1, self.order + 2):
            out.append(self.c[n - 1] / float(n))
        return Jet(out)

    def dshift(self):
        """Jet of the derivative (one order lower)."""
        return Jet([(j + 1.0) * self.c[j + 1] for j in range(self.order)])


def jet_var(x, order):
    """Jet of the identity at x."""
    x = as_ia(x)
    one = IA.exact(np.ones(np.shape(x.lo)))
    zero = IA.zeros(np.shape(x.lo))
    return Jet([x, one] + [zero] * (order - 1))


def jet_const(x, order, shape=None):
    x = as_ia(x)
    zero = IA.zeros(np.shape(x.lo) if shape is None else shape)
    return Jet([x] + [zero] * order)


def jexp(g: Jet) -> Jet:
    m = g.order
    h = [iexp(g.c[0])]
    for n in range(1, m + 1):
        s = g.c[1] * h[n - 1]
        for j in range(2, n + 1):
            s = s + (float(j) * g.c[j]) * h[n - j]
        h.append(s / float(n))
    return Jet(h)


def jsincos(g: Jet):
    m = g.order
    s = [isin(g.c[0])]
    c = [icos(g.c[0])]
    for n in range(1, m + 1):
        ds = g.c[1] * c[n - 1]
        dc = g.c[1] * s[n - 1]
        for j in range(2, n + 1):
            ds = ds + (float(j) * g.c[j]) * c[n - j]
            dc = dc + (float(j) * g.c[j]) * s[n - j]
        s.append(ds / float(n))
        c.append(-dc / float(n))
    return Jet(s), Jet(c)


def jcoshsinh(g: Jet):
    m = g.order
    ch = [icosh(g.c[0])]
    sh = [isinh(g.c[0])]
    for n in range(1, m + 1):
        dch = g.c[1] * sh[n - 1]
        dsh = g.c[1] * ch[n - 1]
        for j in range(2, n + 1):
            dch = dch + (float(j) * g.c[j]) * sh[n - j]
            dsh = dsh + (float(j) * g.c[j]) * ch[n - j]
        ch.append(dch / float(n))
        sh.append(dsh / float(n))
    return Jet(ch), Jet(sh)


def jarcsinh(g: Jet) -> Jet:
    w = g * g + 1.0
    v = w.sqrt().reciprocal()
    gp = g.dshift()
    integrand = Jet(v.c[: g.order]) * gp if g.order > 0 else None
    return integrand.integrate(iarcsinh(g.c[0]))


def jpolyval(coeffs, g: Jet) -> Jet:
    """Jet of P(g) for a polynomial with interval (or float) coefficients.

    coeffs are in lowest-degree-first order.
    """
    out = jet_const(as_ia(coeffs[-1]), g.order, shape=np.shape(g.c[0].lo))
    for a in reversed(coeffs[:-1]):
        out = out * g + as_ia(a)
    return out
