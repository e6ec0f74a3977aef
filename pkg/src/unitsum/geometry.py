"""Convex regions, the three covering criteria, and the exact-style verifier.

The criteria implement the sufficient covering conditions for the square,
hexagon and parallelogram regions. verify_covering_exact decides the actual
covering by convex polygon clipping at the working precision, with an
explicit area margin and a borderline band instead of silent coin flips.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .numerics import default_precision

SQRT3 = None  # computed lazily at working precision


class GeometryError(ValueError):
    pass


def _mpc(z):
    return mp.mpc(z)


@dataclass(frozen=True)
class Region:
    """Convex polygon containing 0 strictly inside, counterclockwise vertices."""

    kind: str  # square | hexagon | parallelogram | polygon
    vertices: tuple  # mpc, counterclockwise

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise GeometryError("need at least 3 vertices")
        if _signed_area(self.vertices) <= 0:
            raise GeometryError("vertices must be counterclockwise")
        if membership(0, self, 1.0) != "inside":
            raise GeometryError("region must contain 0 strictly inside")

    @property
    def vertices_f(self) -> tuple[complex, ...]:
        return tuple(complex(v) for v in self.vertices)

    def area(self):
        return _signed_area(self.vertices)

    def circumradius(self) -> float:
        return max(abs(v) for v in self.vertices_f)

    def inradius(self) -> float:
        out = []
        vs = self.vertices_f
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            d = b - a
            out.append(abs((d.real * (-a.imag) - d.imag * (-a.real))) / abs(d))
        return min(out)


def _signed_area(vertices) -> float:
    total = mp.mpf(0)
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        total += mp.re(a) * mp.im(b) - mp.re(b) * mp.im(a)
    return total / 2


def _ccw(vertices):
    vs = tuple(_mpc(v) for v in vertices)
    return vs if _signed_area(vs) > 0 else tuple(reversed(vs))


def square() -> Region:
    """Vertices (+-1 +- i)/2."""
    h = mp.mpf(1) / 2
    return Region("square", (mp.mpc(h, h), mp.mpc(-h, h), mp.mpc(-h, -h), mp.mpc(h, -h)))


def hexagon() -> Region:
    """Vertices exp(2 pi i (2k+1)/12)/sqrt(3), k = 0..5."""
    s = 1 / mp.sqrt(3)
    vs = tuple(s * mp.expjpi(mp.mpf(2 * k + 1) / 6) for k in range(6))
    return Region("hexagon", vs)


def parallelogram(eps_tilde) -> Region:
    """Vertices (+-1 +- eps_tilde)/2; eps_tilde must be non-real."""
    e = _mpc(eps_tilde)
    if abs(mp.im(e)) < mp.mpf(2) ** (-default_precision() // 4):
        raise GeometryError("parallelogram needs a non-real eps_tilde")
    vs = ((1 + e) / 2, (-1 + e) / 2, (-1 - e) / 2, (1 - e) / 2)
    return Region("parallelogram", _ccw(vs))


def polygon(vertices) -> Region:
    return Region("polygon", _ccw(vertices))


def membership(z, r: Region, scale=1.0, margin: float | None = None) -> str:
    """Is z inside scale*P? Returns inside | outside | borderline.

    Tested via the half-plane inequalities of P applied to z/scale; margin
    is relative to the region scale.
    """
    if margin is None:
        margin = float(mp.mpf(2) ** (-default_precision() // 4))
    w = _mpc(z) / _mpc(scale)
    verdict = "inside"
    vs = r.vertices
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        d = b - a
        cross = mp.re(d) * (mp.im(w) - mp.im(a)) - mp.im(d) * (mp.re(w) - mp.re(a))
        lim = margin * abs(d)
        if cross < -lim:
            return "outside"
        if cross <= lim:
            verdict = "borderline"
    return verdict


def halfplanes_f(r: Region) -> list[tuple[float, float, float]]:
    """Float shadows (nx, ny, c): inside means nx*x + ny*y <= c for all edges."""
    out = []
    vs = r.vertices_f
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        d = b - a
        ln = abs(d)
        nx, ny = d.imag / ln, -d.real / ln  # outward normal for CCW
        out.append((nx, ny, nx * a.real + ny * a.imag))
    return out


def membership_fast(z: complex, planes, margin: float) -> int:
    """+1 inside, 0 borderline, -1 outside (float64 path for hot loops)."""
    state = 1
    for nx, ny, c in planes:
        v = nx * z.real + ny * z.imag - c
        if v > margin:
            return -1
        if v >= -margin:
            state = 0
    return state


@dataclass(frozen=True)
class CoveringVerdict:
    passed: bool
    borderline: bool
    w_required: object  # int or "fail"
    criterion_values: tuple
    lhs: float
    rhs: float
    margin: float


def _verdict(lhs, rhs, w, values, margin) -> CoveringVerdict:
    border = abs(lhs - rhs) <= margin
    passed = lhs <= rhs
    return CoveringVerdict(bool(passed), bool(border), (w if passed else "fail"),
                           tuple(values), float(lhs), float(rhs), float(margin))


def square_criterion(eps_embedded, w: int, precision_bits: int | None = None) -> CoveringVerdict:
    """max(|Re eta|, |Im eta|) <= (1+2w)/2 with eta = eps (1+i)/2."""
    prec = precision_bits or default_precision()
    with mp.workprec(prec + 32):
        eta = _mpc(eps_embedded) * mp.mpc(1, 1) / 2
        lhs = max(abs(mp.re(eta)), abs(mp.im(eta)))
        rhs = mp.mpf(1 + 2 * w) / 2
        return _verdict(lhs, rhs, w, (complex(eta),), mp.mpf(2) ** (-prec // 4))


def hexagon_criterion(eps_embedded, w: int, precision_bits: int | None = None) -> CoveringVerdict:
    """max_k |Im(eps v_k)| <= (5w+2)/(2 sqrt 3) over the hexagon vertices."""
    prec = precision_bits or default_precision()
    with mp.workprec(prec + 32):
        hexa = hexagon()
        etas = tuple(_mpc(eps_embedded) * v for v in hexa.vertices)
        lhs = max(abs(mp.im(t)) for t in etas)
        rhs = mp.mpf(5 * w + 2) / (2 * mp.sqrt(3))
        return _verdict(lhs, rhs, w, tuple(complex(t) for t in etas),
                        mp.mpf(2) ** (-prec // 4))


def parallelogram_criterion(eps_tilde_embedded, w: int,
                            precision_bits: int | None = None) -> CoveringVerdict:
    """Both coordinates of A^-1 (vertices of eps P) bounded by (1+2w)/2.

    A maps (c, d) |-> c + d*eps_tilde; the vertices of eps P are
    (eps_tilde^2 / 2)(1 +- eps_tilde).
    """
    prec = precision_bits or default_precision()
    with mp.workprec(prec + 32):
        et = _mpc(eps_tilde_embedded)
        if abs(mp.im(et)) <= mp.mpf(2) ** (-prec // 4):
            raise GeometryError("A is singular: Im(eps_tilde) ~ 0")
        vals = []
        lhs = mp.mpf(0)
        for sign in (1, -1):
            v = et ** 2 / 2 * (1 + sign * et)
            d = mp.im(v) / mp.im(et)
            c = mp.re(v) - d * mp.re(et)
            vals.append((float(c), float(d)))
            lhs = max(lhs, abs(c), abs(d))
        rhs = mp.mpf(1 + 2 * w) / 2
        return _verdict(lhs, rhs, w, tuple(vals), mp.mpf(2) ** (-prec // 4))


CRITERIA = {
    "square": square_criterion,
    "hexagon": hexagon_criterion,
    "parallelogram": parallelogram_criterion,
}

W_SEARCH_CAP = 8


def minimal_w(eps_candidates, kind: str, w_cap: int = W_SEARCH_CAP,
              precision_bits: int | None = None) -> tuple[int, int]:
    """Smallest w in 1..w_cap passing the criterion over the candidate
    embedded units; returns (w, index of the winning candidate).

    eps_candidates: embedded values; for the parallelogram criterion these
    are eps_tilde values, otherwise eps itself.
    """
    crit = CRITERIA[kind]
    best = None
    for w in range(1, w_cap + 1):
        for i, z in enumerate(eps_candidates):
            if crit(z, w, precision_bits).passed:
                return w, i
    raise GeometryError(f"no w <= {w_cap} passes the {kind} criterion")


# ---------------------------------------------------------------------------
# Convex clipping machinery for the exact-style covering check.

def _clip_halfplane(points, a, b, keep_left: bool):
    """Sutherland-Hodgman single-edge clip of a convex polygon.

    Edge a->b; keep_left keeps the CCW-inside (left) side.
    """
    if not points:
        return []
    out = []
    n = len(points)
    d = b - a

    def side(p):
        s = mp.re(d) * (mp.im(p) - mp.im(a)) - mp.im(d) * (mp.re(p) - mp.re(a))
        return s if keep_left else -s

    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        sp, sq = side(p), side(q)
        if sp >= 0:
            out.append(p)
            if sq < 0:
                out.append(p + (q - p) * sp / (sp - sq))
        elif sq > 0:
            out.append(p + (q - p) * sp / (sp - sq))
    return out


def _poly_area(points):
    if len(points) < 3:
        return mp.mpf(0)
    total = mp.mpf(0)
    n = len(points)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        total += mp.re(p) * mp.im(q) - mp.re(q) * mp.im(p)
    return abs(total) / 2


def _subtract_convex(pieces, clip_pts):
    """Subtract the convex polygon clip_pts from each convex piece."""
    result = []
    n = len(clip_pts)
    for piece in pieces:
        remaining = piece
        for i in range(n):
            a, b = clip_pts[i], clip_pts[(i + 1) % n]
            outside = _clip_halfplane(remaining, a, b, keep_left=False)
            if len(outside) >= 3 and _poly_area(outside) > 0:
                result.append(outside)
            remaining = _clip_halfplane(remaining, a, b, keep_left=True)
            if len(remaining) < 3:
                break
        # remaining lies inside clip_pts: covered, dropped
    return result


COVER_AREA_MARGIN = mp.mpf(10) ** -20
COVER_BORDERLINE_BAND = mp.mpf(10) ** -12


@dataclass(frozen=True)
class CoveringResult:
    covered: bool
    borderline: bool
    witness: complex | None
    residual_area_ratio: float


def verify_covering_exact(eps_embedded, alphabet_points, r: Region, w: int,
                          precision_bits: int | None = None) -> CoveringResult:
    """Decide eps*P subset Union_s (s+P) by convex clipping.

    Covered iff the residual area is below 1e-20 * |P|; residuals inside the
    borderline band are flagged rather than guessed. Translates are
    processed in sorted order so the outcome is deterministic.
    """
    prec = precision_bits or default_precision()
    with mp.workprec(prec + 32):
        eps = _mpc(eps_embedded)
        scaled = [v * eps for v in r.vertices]
        if _signed_area(scaled) < 0:
            scaled = list(reversed(scaled))
        pieces = [scaled]
        pts = sorted((complex(p) for p in alphabet_points), key=lambda z: (z.real, z.imag))
        for s in pts:
            translate = [v + _mpc(s) for v in r.vertices]
            pieces = _subtract_convex(pieces, translate)
            if not pieces:
                break
        base = _poly_area(list(r.vertices))
        residual = sum((_poly_area(p) for p in pieces), mp.mpf(0))
        ratio = residual / base
        if ratio < COVER_AREA_MARGIN:
            return CoveringResult(True, False, None, float(ratio))
        if ratio < COVER_BORDERLINE_BAND:
            return CoveringResult(False, True, None, float(ratio))
        largest = max(pieces, key=_poly_area)
        centroid = sum(largest, mp.mpc(0)) / len(largest)
        return CoveringResult(False, False, complex(centroid), float(ratio))
