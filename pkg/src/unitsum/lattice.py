"""Digit alphabets and exact enumeration of the critical-point set.

The critical points are the order elements lying in the region P whose
other-conjugate modulus stays below C2/(1-|eps^(2)|). Enumeration walks an
integer bounding box derived from the inverse Minkowski matrix; float64
does the scanning, mpmath re-verifies every survivor, and borderline points
are included (over-inclusion keeps downstream certificates sound).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import mpmath as mp

from . import geometry as ge
from .numerics import EmbeddingData, embed, embed_fast
from .ring import MinimalPolynomial, OrderElement

BOX_GUARD = 10 ** 9


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class DigitAlphabet:
    """Finite digit set with exact elements and per-conjugate bounds.

    decomp holds, per element, the canonical nonneg tuple (d_1..d_mu) for
    roots-of-unity alphabets or the pair (d0, d1) for affine ones; it is the
    decomposition later used to split digits into units.
    """

    kind: str  # roots_of_unity | affine_pair
    elements: tuple[OrderElement, ...]
    w: int
    decomp: tuple[tuple[int, ...], ...]
    conj_bound: object  # C_2 = max |c^(2)| over the alphabet (mpf at precision)

    def __len__(self):
        return len(self.elements)

    def index_of(self, elem: OrderElement) -> int | None:
        try:
            return self.elements.index(elem)
        except ValueError:
            return None


def alphabet_roots_of_unity(zeta: OrderElement, mu: int, w: int,
                            e: EmbeddingData) -> DigitAlphabet:
    """Sigma_mu(w) = { sum d_i zeta^i : 0 <= d_i <= w }, exactly deduplicated."""
    if w < 0:
        raise LatticeError("w must be >= 0")
    powers = [zeta ** i for i in range(1, mu + 1)]
    zero = OrderElement.from_int(zeta.poly, 0)
    seen: dict[tuple, tuple] = {}
    for d in itertools.product(range(w + 1), repeat=mu):
        acc = zero
        for di, p in zip(d, powers):
            if di:
                acc = acc + p * di
        key = acc.coords
        cand = (sum(d), d)
        if key not in seen or cand < seen[key]:
            seen[key] = cand
    elems = sorted(seen, key=lambda k: tuple(k))
    elements = tuple(OrderElement(zeta.poly, k) for k in elems)
    decomp = tuple(seen[k][1] for k in elems)
    bound = _conj_bound(elements, e)
    return DigitAlphabet("roots_of_unity", elements, w, decomp, bound)


def alphabet_affine_pair(eps_tilde: OrderElement, w: int,
                         e: EmbeddingData) -> DigitAlphabet:
    """Sigma = { d0 + d1 eps_tilde : -w <= d0, d1 <= w } (no collisions)."""
    if w < 0:
        raise LatticeError("w must be >= 0")
    one = OrderElement.from_int(eps_tilde.poly, 1)
    items = []
    for d0 in range(-w, w + 1):
        for d1 in range(-w, w + 1):
            items.append((one * d0 + eps_tilde * d1, (d0, d1)))
    items.sort(key=lambda t: t[0].coords)
    elements = tuple(t[0] for t in items)
    if len(set(el.coords for el in elements)) != len(elements):
        raise LatticeError("affine digit collision: eps_tilde looks rational")
    decomp = tuple(t[1] for t in items)
    bound = _conj_bound(elements, e)
    return DigitAlphabet("affine_pair", elements, w, decomp, bound)


def _conj_bound(elements, e: EmbeddingData):
    """Exact-precision mpf; boundary-point classification depends on it."""
    with mp.workprec(e.precision_bits + 32):
        root = e.other_root()
        best = mp.mpf(0)
        for el in elements:
            acc = mp.mpc(0)
            for c in reversed(el.coords):
                acc = acc * root + c
            best = max(best, abs(acc))
        return best


@dataclass(frozen=True)
class LatticeEmbedding:
    """Minkowski image of the power basis: coords -> (Re s1, Im s1, Re s2, Im s2)."""

    matrix: tuple  # 4x4 floats, rows as above
    inverse: tuple

    @staticmethod
    def build(e: EmbeddingData) -> "LatticeEmbedding":
        r1 = complex(e.main_root())
        r2 = complex(e.other_root())
        cols = [[(r1 ** k).real, (r1 ** k).imag, (r2 ** k).real, (r2 ** k).imag]
                for k in range(4)]
        M = [[cols[k][i] for k in range(4)] for i in range(4)]
        Minv = _invert4(M)
        det = _det4(M)
        disc = abs(e.poly.discriminant())
        expected = math.sqrt(disc) / 4
        if abs(abs(det) - expected) > 1e-6 * max(1.0, expected):
            raise LatticeError(
                f"lattice determinant {abs(det)} inconsistent with discriminant "
                f"(expected {expected})")
        return LatticeEmbedding(tuple(map(tuple, M)), tuple(map(tuple, Minv)))


def _det4(M) -> float:
    from itertools import permutations

    total = 0.0
    for perm in permutations(range(4)):
        sign = 1
        seen = list(perm)
        for i in range(4):
            for j in range(i + 1, 4):
                if seen[i] > seen[j]:
                    sign = -sign
        term = sign
        for i in range(4):
            term *= M[i][perm[i]]
        total += term
    return total


def _invert4(M):
    n = 4
    A = [list(map(float, M[i])) + [1.0 if j == i else 0.0 for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if abs(A[piv][col]) < 1e-300:
            raise LatticeError("singular lattice matrix")
        A[col], A[piv] = A[piv], A[col]
        f = A[col][col]
        A[col] = [v / f for v in A[col]]
        for r in range(n):
            if r != col:
                f = A[r][col]
                if f:
                    A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


@dataclass(frozen=True)
class CriticalPoint:
    element: OrderElement
    borderline: bool


def conjugate_radius(alphabet: DigitAlphabet, eps_other_mod) -> float:
    if eps_other_mod >= 1:
        raise LatticeError("unit is not complex Pisot: |eps^(2)| >= 1")
    return float(alphabet.conj_bound) / (1 - float(eps_other_mod))


def enumerate_critical_points(poly: MinimalPolynomial, e: EmbeddingData,
                              eps: OrderElement, alphabet: DigitAlphabet,
                              region: ge.Region,
                              radius_pad: float = 0.0) -> list[CriticalPoint]:
    """All alpha in Z[gamma] with alpha in P and |alpha^(2)| <= C2/(1-|eps^(2)|).

    radius_pad inflates the conjugate bound (used by the discreteness-margin
    check); borderline points are included and flagged. Output is sorted by
    coordinates so the result does not depend on scan order.
    """
    with mp.workprec(e.precision_bits + 32):
        eps2 = abs(embed(eps, e, 2 * (1 - e.chosen_index // 2)))
        if eps2 >= 1:
            raise LatticeError("unit is not complex Pisot under this embedding")
        radius = float(mp.mpf(alphabet.conj_bound) / (1 - eps2)) + radius_pad
    lat = LatticeEmbedding.build(e)
    Minv = lat.inverse
    verts = region.vertices_f
    margin_f = 1e-7
    ranges = []
    for j in range(4):
        a = (Minv[j][0], Minv[j][1])
        b = (Minv[j][2], Minv[j][3])
        sup = max(a[0] * v.real + a[1] * v.imag for v in verts)
        inf = min(a[0] * v.real + a[1] * v.imag for v in verts)
        dn = radius * math.hypot(*b)
        lo = math.floor(inf - dn - 1e-6)
        hi = math.ceil(sup + dn + 1e-6)
        ranges.append((lo, hi))
    volume = 1
    for lo, hi in ranges:
        volume *= (hi - lo + 1)
    if volume > BOX_GUARD:
        raise LatticeError(f"bounding box too large ({volume} points); "
                           "check precision or field data")
    r1 = complex(e.main_root())
    r2 = complex(e.other_root())
    planes = ge.halfplanes_f(region)
    rad2 = radius * (1 + 1e-9) + 1e-9
    (l0, h0), (l1, h1), (l2, h2), (l3, h3) = ranges
    p1 = [r1 ** k for k in range(4)]
    p2 = [r2 ** k for k in range(4)]
    xmin = min(v.real for v in verts) - margin_f
    xmax = max(v.real for v in verts) + margin_f
    ymin = min(v.imag for v in verts) - margin_f
    ymax = max(v.imag for v in verts) + margin_f
    hits = []
    for c3 in range(l3, h3 + 1):
        z1a = c3 * p1[3]
        z2a = c3 * p2[3]
        for c2 in range(l2, h2 + 1):
            z1b = z1a + c2 * p1[2]
            z2b = z2a + c2 * p2[2]
            for c1 in range(l1, h1 + 1):
                z1c = z1b + c1 * p1[1]
                z2c = z2b + c1 * p2[1]
                if not (ymin <= z1c.imag <= ymax):
                    continue
                im2 = z2c.imag
                if abs(im2) > rad2:
                    continue
                half = math.sqrt(max(rad2 * rad2 - im2 * im2, 0.0))
                lo = max(l0, math.ceil(-z2c.real - half),
                         math.ceil(xmin - z1c.real))
                hi = min(h0, math.floor(-z2c.real + half),
                         math.floor(xmax - z1c.real))
                for c0 in range(lo, hi + 1):
                    z1 = z1c + c0
                    if ge.membership_fast(z1, planes, margin_f) >= 0:
                        hits.append((c0, c1, c2, c3))
    out = []
    margin = float(mp.mpf(2) ** (-e.precision_bits // 4))
    with mp.workprec(e.precision_bits + 32):
        eps2_mp = abs(embed(eps, e, 2 * (1 - e.chosen_index // 2)))
        radius_mp = mp.mpf(alphabet.conj_bound) / (1 - eps2_mp) + radius_pad
        for coords in sorted(hits):
            el = OrderElement(poly, coords)
            z1 = embed(el, e)
            z2 = embed(el, e, 2 * (1 - e.chosen_index // 2))
            verdict = ge.membership(z1, region, 1.0, margin)
            if verdict == "outside":
                continue
            d2 = abs(z2) - radius_mp
            if d2 > margin:
                continue
            borderline = verdict == "borderline" or abs(d2) <= margin
            out.append(CriticalPoint(el, borderline))
    return out
