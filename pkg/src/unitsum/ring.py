"""Exact arithmetic in the order Z[gamma] of a monic quartic integer polynomial.

Elements are integer coordinate vectors over the power basis {1, gamma,
gamma^2, gamma^3}; all reductions use the defining relation exactly, so
there is no rounding anywhere in this module.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

DEGREE = 4


class RingError(ValueError):
    """Raised on malformed polynomials or mixed-field operands."""


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic quartic p(X) = c0 + c1 X + c2 X^2 + c3 X^3 + X^4, ascending coeffs."""

    coeffs: tuple[int, int, int, int, int]

    def __post_init__(self):
        try:
            object.__setattr__(self, "coeffs", tuple(operator.index(c) for c in self.coeffs))
        except TypeError:
            raise RingError("coefficients must be integers") from None
        if len(self.coeffs) != DEGREE + 1:
            raise RingError(f"need 5 ascending coefficients, got {len(self.coeffs)}")
        if self.coeffs[-1] != 1:
            raise RingError(f"polynomial must be monic, got leading {self.coeffs[-1]}")

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def derivative_coeffs(self) -> tuple[int, ...]:
        return tuple(k * c for k, c in enumerate(self.coeffs))[1:]

    def discriminant(self) -> int:
        """disc(p) = (-1)^(n(n-1)/2) Res(p, p') for monic p, computed exactly."""
        res = resultant(self.coeffs, self.derivative_coeffs())
        return res if (DEGREE * (DEGREE - 1) // 2) % 2 == 0 else -res

    def is_irreducible(self) -> bool:
        """Complete irreducibility test for a monic integer quartic.

        Rules out linear factors through integer roots (rational root
        theorem) and quadratic ones by exact divisor enumeration of the
        constant term.
        """
        c0 = self.coeffs[0]
        if c0 == 0:
            return False
        for r in _divisors_signed(c0):
            if self(r) == 0:
                return False
        # (X^2+aX+b)(X^2+cX+d) with b*d = c0, all integers.
        p0, p1, p2, p3 = self.coeffs[0], self.coeffs[1], self.coeffs[2], self.coeffs[3]
        for b in _divisors_signed(c0):
            if c0 % b != 0:
                continue
            d = c0 // b
            # a+c = p3, ac = p2-b-d, ad+bc = p1
            s = p3
            prod = p2 - b - d
            # a, c are integer roots of t^2 - s t + prod
            disc = s * s - 4 * prod
            if disc < 0:
                continue
            sq = _isqrt(disc)
            if sq * sq != disc:
                continue
            for a in {(s + sq) // 2, (s - sq) // 2}:
                c = s - a
                if a + c == s and a * c == prod and a * d + b * c == p1:
                    return False
        return True


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


def _divisors_signed(n: int) -> Iterable[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out += [d, -d, n // d, -(n // d)]
        d += 1
    return sorted(set(out))


def resultant(p: Sequence[int], q: Sequence[int]) -> int:
    """Resultant of two integer polynomials (ascending coeffs), exact.

    Computed as the Sylvester matrix determinant via fraction-free Bareiss
    elimination.
    """
    p = _trim(p)
    q = _trim(q)
    m, n = len(p) - 1, len(q) - 1
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    M = [[0] * size for _ in range(size)]
    pd = list(reversed(p))
    qd = list(reversed(q))
    for i in range(n):
        M[i][i : i + m + 1] = pd
    for i in range(m):
        M[n + i][i : i + n + 1] = qd
    return _bareiss_det(M)


def _trim(p: Sequence[int]) -> list[int]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _bareiss_det(M: list[list[int]]) -> int:
    n = len(M)
    M = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@lru_cache(maxsize=None)
def _reduction_rows(poly: MinimalPolynomial) -> tuple[tuple[int, ...], ...]:
    """Coordinates of gamma^4, gamma^5, gamma^6 over the power basis."""
    c = poly.coeffs
    rows = []
    g4 = [-c[0], -c[1], -c[2], -c[3]]
    rows.append(tuple(g4))
    cur = g4
    for _ in range(2):
        nxt = [0] + cur[:3]
        top = cur[3]
        for i in range(4):
            nxt[i] += top * g4[i]
        rows.append(tuple(nxt))
        cur = nxt
    return tuple(rows)


@dataclass(frozen=True)
class OrderElement:
    """Element of Z[gamma] with exact integer coordinates over {1,..,gamma^3}."""

    poly: MinimalPolynomial
    coords: tuple[int, int, int, int]

    def __post_init__(self):
        try:
            object.__setattr__(self, "coords", tuple(operator.index(c) for c in self.coords))
        except TypeError:
            raise RingError("coordinates must be integers") from None
        if len(self.coords) != DEGREE:
            raise RingError("need 4 coordinates")

    @staticmethod
    def from_int(poly: MinimalPolynomial, n: int) -> "OrderElement":
        return OrderElement(poly, (n, 0, 0, 0))

    def _check(self, other: "OrderElement"):
        if self.poly != other.poly:
            raise RingError("mixed-field operands")

    def __add__(self, other: "OrderElement") -> "OrderElement":
        self._check(other)
        return OrderElement(self.poly, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "OrderElement") -> "OrderElement":
        self._check(other)
        return OrderElement(self.poly, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "OrderElement":
        return OrderElement(self.poly, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            return OrderElement(self.poly, tuple(other * a for a in self.coords))
        self._check(other)
        a, b = self.coords, other.coords
        prod = [0] * 7
        for i in range(4):
            if a[i] == 0:
                continue
            for j in range(4):
                prod[i + j] += a[i] * b[j]
        red = _reduction_rows(self.poly)
        out = prod[:4]
        for k in range(4, 7):
            if prod[k]:
                row = red[k - 4]
                for i in range(4):
                    out[i] += prod[k] * row[i]
        return OrderElement(self.poly, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "OrderElement":
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise RingError("negative power of a non-unit")
            return inv ** (-k)
        result = OrderElement.from_int(self.poly, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_one(self) -> bool:
        return self.coords == (1, 0, 0, 0)

    def norm(self) -> int:
        """Field norm, exact: Res(p, a(X)) for the coordinate polynomial a."""
        return resultant(self.poly.coeffs, self.coords)

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def multiplication_matrix(self) -> list[list[int]]:
        """Integer matrix of multiplication by self on the power basis (columns)."""
        cols = []
        basis = [OrderElement(self.poly, tuple(1 if i == j else 0 for i in range(4)))
                 for j in range(4)]
        for b in basis:
            cols.append((self * b).coords)
        return [[cols[j][i] for j in range(4)] for i in range(4)]

    def inverse(self) -> "OrderElement | None":
        """Exact inverse inside Z[gamma], or None.

        Solves the 4x4 rational system mult(self) * x = e0 and keeps the
        result only if it is integral.
        """
        if self.is_zero():
            return None
        M = [[Fraction(v) for v in row] for row in self.multiplication_matrix()]
        rhs = [Fraction(1), Fraction(0), Fraction(0), Fraction(0)]
        sol = _solve_fraction(M, rhs)
        if sol is None:
            return None
        if any(f.denominator != 1 for f in sol):
            return None
        return OrderElement(self.poly, tuple(int(f) for f in sol))

    def __repr__(self):
        return f"OrderElement{self.coords}"


def _solve_fraction(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(M)
    A = [M[i][:] + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if A[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def arithmetic(a: OrderElement, b: OrderElement, kind: str) -> OrderElement:
    """Dispatch wrapper: kind in {'add','sub','mul'}."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise RingError(f"unknown operation {kind!r}")


def norm(a: OrderElement) -> int:
    return a.norm()


def is_unit(a: OrderElement) -> bool:
    return a.is_unit()


def power(a: OrderElement, k: int) -> OrderElement:
    if k < 0:
        raise RingError("power() takes k >= 0")
    return a ** k


def gamma(poly: MinimalPolynomial) -> OrderElement:
    return OrderElement(poly, (0, 1, 0, 0))


def one(poly: MinimalPolynomial) -> OrderElement:
    return OrderElement.from_int(poly, 1)


def zero(poly: MinimalPolynomial) -> OrderElement:
    return OrderElement.from_int(poly, 0)


@dataclass(frozen=True)
class LaurentElement:
    """element * base^shift with base a unit of the order (gamma by default).

    Flattening to an OrderElement is always exact: a unit's inverse lies in
    Z[gamma] because its characteristic polynomial has constant term +-1.
    """

    element: OrderElement
    shift: int
    base: OrderElement

    def __post_init__(self):
        if self.shift < 0 and not self.base.is_unit():
            raise RingError("negative shifts require a unit base")

    @staticmethod
    def of(element: OrderElement, shift: int = 0, base: OrderElement | None = None) -> "LaurentElement":
        if base is None:
            base = gamma(element.poly)
        return LaurentElement(element, shift, base)

    def flatten(self) -> OrderElement:
        if self.shift >= 0:
            return self.element * (self.base ** self.shift)
        inv = self.base.inverse()
        if inv is None:
            raise RingError("base is not a unit of the order")
        return self.element * (inv ** (-self.shift))

    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return self.flatten() == other.flatten()

    def __hash__(self):
        return hash(self.flatten())
