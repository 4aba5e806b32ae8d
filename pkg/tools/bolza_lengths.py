#!/usr/bin/env python3
"""Generate the primitive length spectrum of the regular-octagon surface.

Enumerates the Fuchsian group generated by the four side-pairing boosts of
the regular hyperbolic octagon (disk model), reduces each hyperbolic element
to a canonical conjugacy representative by sliding its axis into the
Dirichlet domain around the origin, and counts unoriented primitive classes
per length.  Output lines: length multiplicity.

Usage: python tools/bolza_lengths.py [max_length] [max_word] > lengths.txt
"""

import cmath
import math
import sys

L0 = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


def boost(theta, ell):
    a = complex(math.cosh(ell / 2.0), 0.0)
    b = cmath.exp(1j * theta) * math.sinh(ell / 2.0)
    return (a, b)


def mul(g, h):
    # elements are (a, b) meaning [[a, b], [conj(b), conj(a)]]
    a1, b1 = g
    a2, b2 = h
    return (a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate())


def inv(g):
    a, b = g
    return (a.conjugate(), -b)


def apply(g, z):
    a, b = g
    return (a * z + b) / (b.conjugate() * z + a.conjugate())


GENS = []
for k in range(4):
    g = boost(k * math.pi / 4.0, L0)
    GENS.append(g)
    GENS.append(inv(g))


def axis_data(g):
    """(length, closest point to 0, canonical endpoint pair) of a hyperbolic g."""
    a, b = g
    tr = 2.0 * a.real
    if abs(tr) <= 2.0 + 1e-12:
        return None
    ell = 2.0 * math.acosh(abs(tr) / 2.0)
    # fixed points: conj(b) z^2 + (conj(a) - a) z - b = 0
    A = b.conjugate()
    B = a.conjugate() - a
    C = -b
    if abs(A) < 1e-15:
        return None  # axis through the origin direction degenerate; rotate first
    disc = cmath.sqrt(B * B - 4.0 * A * C)
    z1 = (-B + disc) / (2.0 * A)
    z2 = (-B - disc) / (2.0 * A)
    z1 /= abs(z1)
    z2 /= abs(z2)
    # circle orthogonal to the unit circle through z1, z2: solve Re(c conj(u)) = 1
    x1, y1 = z1.real, z1.imag
    x2, y2 = z2.real, z2.imag
    det = x1 * y2 - x2 * y1
    if abs(det) < 1e-13:
        # diameter through the origin: closest point is 0
        p = complex(0.0, 0.0)
    else:
        cx = (y2 - y1) / det
        cy = (x1 - x2) / det
        c = complex(cx, cy)
        r = math.sqrt(abs(c) ** 2 - 1.0)
        p = c * (abs(c) - r) / abs(c)
    return ell, p, tuple(sorted(((round(z1.real, 7), round(z1.imag, 7)),
                                 (round(z2.real, 7), round(z2.imag, 7)))))


def reduce_element(g):
    """Conjugate g so that the closest axis point enters the Dirichlet domain."""
    for _ in range(200):
        data = axis_data(g)
        if data is None:
            return None
        _, p, _ = data
        best = abs(p)
        best_h = None
        for h in GENS:
            q = apply(h, p)
            if abs(q) < best - 1e-13:
                best = abs(q)
                best_h = h
        if best_h is None:
            return g
        g = mul(mul(best_h, g), inv(best_h))
    return g


def signature(g):
    data = axis_data(g)
    if data is None:
        return None
    ell, p, ends = data
    return (round(ell, 8), round(p.real, 5), round(p.imag, 5), ends)


def _matkey(g):
    a, b = g
    if (a.real, a.imag, b.real, b.imag) < (-a.real, -a.imag, -b.real, -b.imag):
        a, b = -a, -b
    return (round(a.real, 8), round(a.imag, 8), round(b.real, 8), round(b.imag, 8))


def ball_elements(max_len, max_word):
    """All group elements (up to sign) whose basepoint displacement allows a
    class of length <= max_len, by breadth-first ball growth with matrix
    deduplication."""
    ident = (complex(1.0, 0.0), complex(0.0, 0.0))
    seen = {_matkey(ident): ident}
    frontier = [ident]
    cut = max_len + 2.6
    for _ in range(max_word):
        new = []
        for g in frontier:
            for h in GENS:
                gh = mul(g, h)
                z0 = apply(gh, 0j)
                if 2.0 * math.atanh(min(abs(z0), 1 - 1e-15)) > cut:
                    continue
                key = _matkey(gh)
                if key not in seen:
                    seen[key] = gh
                    new.append(gh)
        if not new:
            break
        frontier = new
    return list(seen.values())


def canonical_key(red, sig):
    cands = [sig]
    base = abs(complex(sig[1], sig[2]))
    for h1 in GENS + [None]:
        for h2 in GENS:
            h = h2 if h1 is None else mul(h1, h2)
            s2 = signature(mul(mul(h, red), inv(h)))
            if (s2 is not None and abs(s2[0] - sig[0]) < 1e-7
                    and abs(complex(s2[1], s2[2])) < base + 1e-4):
                cands.append(s2)
    return min(cands)


def enumerate_classes(max_len=9.3, max_word=8):
    found = {}
    for g in ball_elements(max_len, max_word):
        data = axis_data(g)
        if data is None or data[0] > max_len:
            continue
        red = reduce_element(g)
        if red is None:
            continue
        sig = signature(red)
        if sig is None or sig[0] > max_len:
            continue
        found.setdefault(canonical_key(red, sig), g)
    return found


def main():
    max_len = float(sys.argv[1]) if len(sys.argv) > 1 else 9.3
    max_word = int(sys.argv[2]) if len(sys.argv) > 2 else 8
    found = enumerate_classes(max_len, max_word)
    # group by axis (drop powers), then count per primitive length
    by_axis = {}
    for (ell, px, py, ends), g in found.items():
        by_axis.setdefault((px, py, ends), []).append(ell)
    prim = []
    for axis, ells in by_axis.items():
        ell0 = min(ells)
        prim.append(ell0)
    counts = {}
    for ell in prim:
        key = round(ell, 7)
        counts[key] = counts.get(key, 0) + 1
    print("# primitive unoriented geodesic classes, octagon surface")
    for ell in sorted(counts):
        print(f"{ell:.7f} {counts[ell]}")


if __name__ == "__main__":
    main()
