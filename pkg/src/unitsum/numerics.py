"""High-precision roots, embeddings and complex-Pisot classification.

Every comparison against 1 carries an explicit margin and falls back to a
"borderline" verdict instead of guessing. Official values are computed with
mpmath at the requested precision; hot loops elsewhere use float64 shadows
of the same data.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import mpmath as mp

from .ring import MinimalPolynomial, OrderElement

DEFAULT_PRECISION_BITS = 256


def default_precision() -> int:
    env = os.environ.get("UNITSUM_PRECISION_BITS")
    if env:
        try:
            return max(64, int(env))
        except ValueError:
            pass
    return DEFAULT_PRECISION_BITS


class NumericsError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingData:
    """Roots of the minimal polynomial, conjugate-paired.

    roots holds (sigma_1, conj sigma_1, sigma_2, conj sigma_2); for the
    catalog fields the signature is (0, 2). chosen_index in {0,1,2,3} picks
    the root identified with K inside C (conjugate representatives are
    distinct choices because the tables print one specific sign of the
    imaginary part); the non-conjugate pair is chosen_index // 2.
    """

    poly: MinimalPolynomial
    roots: tuple  # 4 mpc values, paired (r1, conj r1, r2, conj r2)
    signature: tuple[int, int]
    chosen_index: int
    precision_bits: int
    roots_f: tuple = field(default=(), compare=False)  # float64 shadows

    def _check_tc(self):
        if self.signature != (0, 2):
            raise NumericsError(f"totally complex quartic expected, signature {self.signature}")

    def main_root(self):
        self._check_tc()
        return self.roots[self.chosen_index]

    def other_root(self):
        """Representative of the non-identified pair (modulus matters, sign does not)."""
        self._check_tc()
        return self.roots[2 * (1 - self.chosen_index // 2)]

    def with_chosen(self, which: int) -> "EmbeddingData":
        if which not in (0, 1, 2, 3):
            raise NumericsError(f"embedding index must be in 0..3, got {which}")
        return EmbeddingData(self.poly, self.roots, self.signature, which,
                             self.precision_bits, self.roots_f)


@dataclass(frozen=True)
class PisotClass:
    modulus_main: float
    moduli_others: tuple[float, ...]
    verdict: str  # complex_pisot | not_pisot | borderline


def _workprec(precision_bits: int):
    return mp.workprec(precision_bits + 64)


def find_roots(poly: MinimalPolynomial, precision_bits: int | None = None,
               chosen_index: int = 0) -> EmbeddingData:
    """All four roots at the requested precision, conjugate-paired.

    Rejects repeated roots via the exact integer discriminant before any
    numerics run. Ordering is canonical (pairs sorted by real part, then
    imaginary part of the upper-half-plane representative).
    """
    if precision_bits is None:
        precision_bits = default_precision()
    if poly.discriminant() == 0:
        raise NumericsError("repeated roots: discriminant is zero")
    with _workprec(precision_bits):
        coeffs = [mp.mpf(1)] + [mp.mpf(c) for c in reversed(poly.coeffs[:-1])]
        try:
            roots = mp.polyroots(coeffs, maxsteps=200, extraprec=precision_bits)
        except mp.libmp.libhyper.NoConvergence as exc:  # pragma: no cover
            raise NumericsError(f"root finding did not converge: {exc}") from exc
        tol = mp.mpf(2) ** (-precision_bits // 2)
        for r in roots:
            resid = abs(poly(r))
            if resid > tol * max(1, abs(r)) ** 4:
                raise NumericsError(f"root residual too large: {resid}")
        reals = [r for r in roots if abs(mp.im(r)) <= tol]
        comps = [r for r in roots if mp.im(r) > tol]
        t, s = len(reals), len(comps)
        if t + 2 * s != 4:
            raise NumericsError("could not pair roots into conjugate pairs")
        comps.sort(key=lambda r: (mp.re(r), mp.im(r)))
        paired = []
        for r in comps:
            paired.extend([mp.mpc(r), mp.conj(r)])
        ordered = tuple([mp.mpc(r) for r in sorted(reals)] + paired)
        roots_f = tuple(complex(r) for r in ordered)
    return EmbeddingData(poly, ordered, (t, s), chosen_index, precision_bits, roots_f)


def embed(a: OrderElement, e: EmbeddingData, which: int | None = None):
    """sigma(a) = sum coords_k * root^k at working precision (mpc).

    which is a root index in 0..3 (None: the chosen main embedding).
    """
    if which is None:
        root = e.main_root()
    else:
        if which not in (0, 1, 2, 3):
            raise NumericsError(f"embedding index must be in 0..3, got {which}")
        root = e.roots[which]
    with _workprec(e.precision_bits):
        acc = mp.mpc(0)
        for c in reversed(a.coords):
            acc = acc * root + c
        return acc


def embed_fast(a: OrderElement, root_f: complex) -> complex:
    acc = 0j
    for c in reversed(a.coords):
        acc = acc * root_f + c
    return acc


def embed_all(a: OrderElement, e: EmbeddingData):
    """(main embedding, representative of the other pair)."""
    with _workprec(e.precision_bits):
        main = embed(a, e)
        other_root = e.other_root()
        acc = mp.mpc(0)
        for c in reversed(a.coords):
            acc = acc * other_root + c
        return main, acc


def is_root_of_unity(a: OrderElement, max_order: int = 24) -> int:
    """Smallest k <= max_order with a^k == 1 exactly, else 0."""
    one = OrderElement.from_int(a.poly, 1)
    p = a
    for k in range(1, max_order + 1):
        if p == one:
            return k
        p = p * a
    return 0


def classify_pisot(a: OrderElement, e: EmbeddingData) -> PisotClass:
    """Complex-Pisot test with explicit margin 2^(-precision_bits/4).

    Exact roots of unity are classified not_pisot outright (their moduli
    are exactly 1, which no numeric margin can separate).
    """
    if a.is_zero():
        raise NumericsError("classify_pisot requires a nonzero element")
    with _workprec(e.precision_bits):
        margin = mp.mpf(2) ** (-e.precision_bits // 4)
        main, other = embed_all(a, e)
        main = abs(main)
        others = (abs(other),)
        main_f = float(main)
        others_f = tuple(float(x) for x in others)
        if is_root_of_unity(a):
            return PisotClass(main_f, others_f, "not_pisot")
        if any(abs(x - 1) <= margin for x in (main,) + others):
            return PisotClass(main_f, others_f, "borderline")
        if main > 1 and all(x < 1 for x in others):
            return PisotClass(main_f, others_f, "complex_pisot")
        return PisotClass(main_f, others_f, "not_pisot")
