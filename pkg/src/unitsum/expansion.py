"""Greedy digit expansions, critical-point representations and certificates.

Everything numeric here only steers the search; each result carries an
exact ring identity that is re-verified with integer arithmetic before it
is returned. Certificates bound the unit sum height by the alphabet
parameter w.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import mpmath as mp

from . import geometry as ge
from . import lattice as la
from . import numerics as nu
from .catalog import CatalogEntry
from .ring import LaurentElement, MinimalPolynomial, OrderElement

DELTA_DEFAULT = 1e-6
DELTA_RETRIES = 10
MAX_DEPTH_DEFAULT = 12

X4_X_1 = (1, -1, 0, 0, 1)  # the rewriting engine proves this field DUG


class ExpansionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpansionResult:
    """alpha * eps^N = beta + sum_i digits[i] * eps^i (digits[i] at exponent i)."""

    alpha: OrderElement
    eps: OrderElement
    N: int
    digits: tuple[OrderElement, ...]  # index i = coefficient of eps^i
    beta: OrderElement
    delta: float

    def verify(self) -> bool:
        lhs = self.alpha * (self.eps ** self.N)
        rhs = self.beta
        for i, c in enumerate(self.digits):
            if not c.is_zero():
                rhs = rhs + c * (self.eps ** i)
        return lhs == rhs


@dataclass(frozen=True)
class CriticalPointReport:
    """point = sum_{k=1..depth} digits[k-1] * eps^(-k), exactly."""

    point: OrderElement
    eps: OrderElement
    digits: tuple[OrderElement, ...]
    depth: int

    def verify(self) -> bool:
        lhs = self.point * (self.eps ** self.depth)
        rhs = OrderElement.from_int(self.point.poly, 0)
        for k, s in enumerate(self.digits, start=1):
            if not s.is_zero():
                rhs = rhs + s * (self.eps ** (self.depth - k))
        return lhs == rhs


@dataclass(frozen=True)
class UnitTerm:
    """coefficient * (zeta^zeta_power * base^base_power); value is exact."""

    coefficient: int
    zeta_power: int
    base_power: int
    value: LaurentElement

    def describe(self, base_name: str) -> str:
        parts = []
        if self.zeta_power:
            parts.append(f"zeta^{self.zeta_power}")
        parts.append(f"{base_name}^{self.base_power}")
        return f"{self.coefficient} * " + " * ".join(parts)


@dataclass(frozen=True)
class UnitSumCertificate:
    target: OrderElement
    terms: tuple[UnitTerm, ...]
    w_bound: int

    def verify(self) -> bool:
        total = OrderElement.from_int(self.target.poly, 0)
        seen = set()
        for t in self.terms:
            if not 1 <= t.coefficient <= self.w_bound:
                return False
            flat = t.value.flatten()
            if flat.coords in seen:
                return False
            seen.add(flat.coords)
            total = total + flat * t.coefficient
        return total == self.target

    def max_coefficient(self) -> int:
        return max((t.coefficient for t in self.terms), default=0)


class FieldAnalysis:
    """Per-field working context: alphabet, region, bounds, cached depth map.

    The base unit eps is the catalog unit (or its square when the digits are
    d0 + d1*eps_tilde); all hot-loop numerics use float64 shadows while the
    official values live at the embedding's precision.
    """

    def __init__(self, entry: CatalogEntry, w: int | None = None,
                 embedding_index: int | None = None,
                 precision_bits: int | None = None):
        self.entry = entry
        f, u = entry.field, entry.unit_data
        self.poly = f.min_poly
        prec = precision_bits or u.embedding.precision_bits
        emb = u.embedding if precision_bits is None else \
            nu.find_roots(f.min_poly, prec).with_chosen(u.embedding.chosen_index)
        if embedding_index is not None:
            emb = emb.with_chosen(embedding_index)
        self.embedding = emb
        self.precision_bits = prec
        unit = u.unit
        if u.is_squared_base:
            # keep |eps_tilde| > 1 under the chosen embedding
            if abs(nu.embed_fast(unit, emb.roots_f[emb.chosen_index])) < 1:
                inv = unit.inverse()
                if inv is None:
                    raise ExpansionError("stored unit is not invertible")
                unit = inv
        self.eps_tilde = unit if u.is_squared_base else None
        self.eps = unit * unit if u.is_squared_base else unit
        verdict = nu.classify_pisot(self.eps, emb)
        if verdict.verdict != "complex_pisot":
            raise ExpansionError(
                f"{f.id}: base not complex Pisot under embedding "
                f"{emb.chosen_index} ({verdict.verdict})")
        self.w = w if w is not None else self.minimal_w()
        self.region = self._region()
        self.alphabet = self._alphabet(self.w)
        self.zeta = f.zeta if f.mu > 2 else -OrderElement.from_int(self.poly, 1)
        self.mu = f.mu
        self.alphabet_mu = f.alphabet_mu if f.mu > 2 else 2
        if f.mu > 2 and f.alphabet_mu != f.mu:
            # tail representations may use the full root-of-unity alphabet
            self.rep_alphabet = la.alphabet_roots_of_unity(f.zeta, f.mu, self.w,
                                                           self.embedding)
        else:
            self.rep_alphabet = self.alphabet
        # float shadows
        self.root_main = emb.roots_f[emb.chosen_index]
        self.root_other = emb.roots_f[2 * (1 - emb.chosen_index // 2)]
        self.eps_main_f = nu.embed_fast(self.eps, self.root_main)
        self.eps_other_f = nu.embed_fast(self.eps, self.root_other)
        self.alpha_elems = self.alphabet.elements
        self.alpha_main_f = [nu.embed_fast(s, self.root_main) for s in self.alpha_elems]
        self.alpha_other_f = [nu.embed_fast(s, self.root_other) for s in self.alpha_elems]
        self.planes = ge.halfplanes_f(self.region)
        self.eps_inv = self.eps.inverse()
        if self.eps_inv is None:
            raise ExpansionError("expansion base must be a unit")
        self._critical: list[la.CriticalPoint] | None = None
        self._depths: dict[tuple, int] | None = None
        self._depth_limit = 0

    # -- construction helpers ------------------------------------------------
    def criterion_kind(self) -> str:
        f = self.entry.field
        if f.mu % 4 == 0:
            return "square"
        if f.mu % 6 == 0:
            return "hexagon"
        return "parallelogram"

    def _region(self) -> ge.Region:
        kind = self.criterion_kind()
        if kind == "square":
            return ge.square()
        if kind == "hexagon":
            return ge.hexagon()
        return ge.parallelogram(nu.embed(self.eps_tilde, self.embedding))

    def _alphabet(self, w: int) -> la.DigitAlphabet:
        f = self.entry.field
        if f.mu > 2:
            zeta_d = f.zeta ** (f.mu // f.alphabet_mu)
            return la.alphabet_roots_of_unity(zeta_d, f.alphabet_mu, w,
                                              self.embedding)
        return la.alphabet_affine_pair(self.eps_tilde, w, self.embedding)

    def criterion_value(self, w: int) -> ge.CoveringVerdict:
        kind = self.criterion_kind()
        z = nu.embed(self.eps_tilde if kind == "parallelogram" else self.eps,
                     self.embedding)
        return ge.CRITERIA[kind](z, w, self.precision_bits)

    def minimal_w(self) -> int:
        """Smallest passing w, minimized over the stored embeddings."""
        kind = self.criterion_kind()
        candidates = [self._criterion_input(self.embedding.chosen_index)]
        alt = self.entry.unit_data.alt_embedding_index
        if alt is not None and alt != self.embedding.chosen_index:
            candidates.append(self._criterion_input(alt))
        w, _ = ge.minimal_w(candidates, kind, precision_bits=self.precision_bits)
        return w

    def _criterion_input(self, emb_index: int):
        u = self.entry.unit_data
        unit = u.unit
        root = self.embedding.roots_f[emb_index]
        if u.is_squared_base:
            if abs(nu.embed_fast(unit, root)) < 1:
                unit = unit.inverse()
            return nu.embed(unit, self.embedding.with_chosen(emb_index))
        z = nu.embed(unit, self.embedding.with_chosen(emb_index))
        return z

    # -- critical points -----------------------------------------------------
    def critical_points(self) -> list[la.CriticalPoint]:
        if self._critical is None:
            self._critical = la.enumerate_critical_points(
                self.poly, self.embedding, self.eps, self.alphabet, self.region)
        return self._critical

    def critical_set(self) -> set[tuple]:
        return {cp.element.coords for cp in self.critical_points()}

    # -- depth map (shared backward BFS from 0) -------------------------------
    def _bounds(self) -> tuple[float, float]:
        eps1 = abs(self.eps_main_f)
        c_main = max(abs(nu.embed_fast(s, self.root_main))
                     for s in self.rep_alphabet.elements)
        r_main = c_main / (eps1 - 1)
        m_main = max(r_main, self.region.circumradius()) * (1 + 1e-9) + 1e-9
        r2 = la.conjugate_radius(self.rep_alphabet, abs(self.eps_other_f))
        return m_main, r2 * (1 + 1e-9) + 1e-9

    def depth_map(self, max_depth: int) -> dict[tuple, int]:
        """Minimal representation depth for every bounded state, by BFS.

        States are exact order elements r with |r| and |r^(2)| inside the
        tail bounds; r -> (r + s) * eps^-1 enumerates predecessors, so level
        k holds exactly the elements representable as sum_{j=1..k} s_j eps^-j
        and not earlier.
        """
        if self._depths is not None and self._depth_limit >= max_depth:
            return self._depths
        m_main, r2 = self._bounds()
        zero = OrderElement.from_int(self.poly, 0)
        depths: dict[tuple, int] = {zero.coords: 0}
        frontier = [zero]
        for d in range(1, max_depth + 1):
            nxt = []
            for r in frontier:
                for s in self.rep_alphabet.elements:
                    pre = (r + s) * self.eps_inv
                    key = pre.coords
                    if key in depths:
                        continue
                    z1 = nu.embed_fast(pre, self.root_main)
                    if abs(z1) > m_main:
                        continue
                    z2 = nu.embed_fast(pre, self.root_other)
                    if abs(z2) > r2:
                        continue
                    depths[key] = d
                    nxt.append(pre)
            frontier = nxt
            if not frontier:
                break
        self._depths = depths
        self._depth_limit = max_depth
        return depths

    # -- analysis caches -----------------------------------------------------
    _reports: dict | None = None


def represent_critical_point(ctx: FieldAnalysis, beta: OrderElement,
                             max_depth: int = MAX_DEPTH_DEFAULT) -> CriticalPointReport:
    """Minimal-depth representation beta = sum s_k eps^-k, digits in Sigma.

    Depths come from the shared BFS; the digit string itself is extracted
    greedily smallest-first, which yields the lexicographically least tuple
    among minimal-depth representations. The final identity is exact.
    """
    if beta.is_zero():
        raise ExpansionError("0 is not a critical point")
    depths = ctx.depth_map(max_depth)
    d = depths.get(beta.coords)
    if d is None or d > max_depth:
        raise ExpansionError(
            f"no representation of {beta.coords} within depth {max_depth}")
    digits = []
    r = beta
    for level in range(d, 0, -1):
        advanced = r * ctx.eps
        for s in ctx.rep_alphabet.elements:
            nxt = advanced - s
            nd = depths.get(nxt.coords)
            if nd is not None and nd == level - 1:
                digits.append(s)
                r = nxt
                break
        else:
            raise ExpansionError("depth map inconsistent (internal error)")
    report = CriticalPointReport(beta, ctx.eps, tuple(digits), d)
    if not report.verify():
        raise ExpansionError("representation failed exact verification")
    return report


def greedy_expand(ctx: FieldAnalysis, alpha: OrderElement,
                  delta: float = DELTA_DEFAULT) -> ExpansionResult:
    """Theorem-style expansion: alpha * eps^N = beta + sum c_i eps^i.

    N kills the other conjugate below delta; digits are chosen top-down so
    the remainder stays inside the shrinking region, preferring the digit
    minimizing |remainder| (ties: lexicographically smallest coordinates).
    The returned beta is guaranteed to be in the enumerated critical set.
    """
    zero = OrderElement.from_int(ctx.poly, 0)
    if alpha.is_zero():
        return ExpansionResult(alpha, ctx.eps, 0, (), zero, delta)
    crit = ctx.critical_set() | {zero.coords}
    a2 = abs(nu.embed_fast(alpha, ctx.root_other))
    e2 = abs(ctx.eps_other_f)
    N = 0
    if a2 >= delta:
        N = max(0, math.ceil(math.log(delta / a2) / math.log(e2)))
        while a2 * e2 ** N >= delta:
            N += 1
    x_elem = alpha * (ctx.eps ** N)
    x = nu.embed_fast(x_elem, ctx.root_main)
    eps1 = ctx.eps_main_f
    # smallest n >= -1 with x in eps^(n+1) P
    n = -1
    scale = 1 + 0j
    inradius = ctx.region.inradius()
    n_cap = 8 + max(0, math.ceil(math.log(max(abs(x), 1e-12) / inradius)
                                 / math.log(abs(eps1)))) + 64
    starts = []
    while n <= n_cap:
        if ge.membership_fast(x / scale, ctx.planes, 1e-9) >= 0:
            starts.append(n)
            if len(starts) >= 6:
                break
        n += 1
        scale *= eps1
    if not starts:
        raise ExpansionError("covering violated numerically: no start level")
    last_err = None
    for n in starts:
        digits = [None] * max(0, n + 1)
        rem_elem = x_elem
        rem = nu.embed_fast(rem_elem, ctx.root_main)
        ok = True
        for j in range(n, -1, -1):
            scale_j = eps1 ** j
            best = None
            for idx, s in enumerate(ctx.alpha_elems):
                cand = rem - ctx.alpha_main_f[idx] * scale_j
                if ge.membership_fast(cand / scale_j, ctx.planes, 1e-9) >= 0:
                    key = (abs(cand), ctx.alpha_elems[idx].coords)
                    if best is None or key < best[0]:
                        best = (key, idx)
            if best is None:
                ok = False
                last_err = f"no digit keeps remainder in region at level {j}"
                break
            idx = best[1]
            digits[j] = ctx.alpha_elems[idx]
            rem_elem = rem_elem - ctx.alpha_elems[idx] * (ctx.eps ** j)
            rem = nu.embed_fast(rem_elem, ctx.root_main)
        if not ok:
            continue
        if rem_elem.coords in crit:
            result = ExpansionResult(alpha, ctx.eps, N, tuple(digits), rem_elem, delta)
            if not result.verify():
                raise ExpansionError("expansion failed exact verification")
            return result
        last_err = (f"beta {rem_elem.coords} not in the enumerated critical set: "
                    "critical set incomplete or delta too large")
    raise ExpansionError(last_err or "expansion failed")


def _recognize_unit_power(ctx: FieldAnalysis, alpha: OrderElement) -> UnitTerm | None:
    """alpha == zeta^i * base^m exactly, for the certificate fast path."""
    base = ctx.eps_tilde if ctx.eps_tilde is not None else ctx.eps
    zb = nu.embed_fast(base, ctx.root_main)
    za = nu.embed_fast(alpha, ctx.root_main)
    if abs(za) <= 0 or abs(zb) <= 1:
        return None
    m0 = round(math.log(abs(za)) / math.log(abs(zb)))
    mu = ctx.mu
    for m in range(m0 - 1, m0 + 2):
        p = LaurentElement(OrderElement.from_int(ctx.poly, 1), m, base).flatten()
        z = OrderElement.from_int(ctx.poly, 1)
        for i in range(mu):
            if z * p == alpha:
                return UnitTerm(1, i, m, LaurentElement(z * OrderElement.from_int(
                    ctx.poly, 1), m, base))
            z = z * ctx.zeta
    return None


def unit_sum_representation(ctx: FieldAnalysis, alpha: OrderElement,
                            delta: float = DELTA_DEFAULT,
                            max_depth: int = MAX_DEPTH_DEFAULT) -> UnitSumCertificate:
    """Distinct-unit certificate with coefficients bounded by the field's w.

    Head digits occupy base exponents >= -N and the critical-point tail
    exponents < -N, so units never collide; digit values split into root-of-
    unity components (mu > 2) or d0 + d1*eps_tilde components (mu = 2).
    """
    if alpha.is_zero():
        return UnitSumCertificate(alpha, (), ctx.w)
    if abs(alpha.norm()) == 1:
        term = _recognize_unit_power(ctx, alpha)
        if term is None:
            term = UnitTerm(1, 0, 0, LaurentElement(
                alpha, 0, ctx.eps_tilde if ctx.eps_tilde is not None else ctx.eps))
        cert = UnitSumCertificate(alpha, (term,), ctx.w)
        if cert.verify():
            return cert
    d = delta
    last = None
    for _ in range(DELTA_RETRIES + 1):
        try:
            exp = greedy_expand(ctx, alpha, d)
            break
        except ExpansionError as exc:
            last = exc
            d /= 2
    else:
        raise ExpansionError(f"greedy expansion failed after retries: {last}")
    pieces: list[tuple[OrderElement, int, bool]] = []  # (digit, exponent, tail?)
    for i, c in enumerate(exp.digits):
        if c is not None and not c.is_zero():
            pieces.append((c, i - exp.N, False))
    if not exp.beta.is_zero():
        rep = represent_critical_point(ctx, exp.beta, max_depth)
        for k, s in enumerate(rep.digits, start=1):
            if not s.is_zero():
                pieces.append((s, -k - exp.N, True))
    terms = []
    for digit, m, tail in pieces:
        terms.extend(_digit_terms(ctx, digit, m, tail))
    terms.sort(key=lambda t: (t.base_power, t.zeta_power))
    cert = UnitSumCertificate(alpha, tuple(terms), ctx.w)
    if not cert.verify():
        raise ExpansionError("certificate failed exact verification")
    return cert


def _digit_terms(ctx: FieldAnalysis, digit: OrderElement, m: int,
                 tail: bool = False) -> list[UnitTerm]:
    alphabet = ctx.rep_alphabet if tail else ctx.alphabet
    idx = alphabet.index_of(digit)
    if idx is None:
        raise ExpansionError(f"digit {digit.coords} not in alphabet")
    decomp = alphabet.decomp[idx]
    out = []
    one = OrderElement.from_int(ctx.poly, 1)
    if alphabet.kind == "roots_of_unity":
        mu_d = ctx.mu if tail else ctx.alphabet_mu
        step = ctx.mu // mu_d  # zeta powers used by this alphabet
        zeta_d = ctx.zeta ** step
        zp = one
        for i in range(1, mu_d + 1):
            zp = zp * zeta_d
            di = decomp[i - 1]
            if di:
                out.append(UnitTerm(di, (i * step) % ctx.mu, m,
                                    LaurentElement(zp, m, ctx.eps)))
    else:
        d0, d1 = decomp
        base = ctx.eps_tilde
        if d0:
            val = one if d0 > 0 else -one
            out.append(UnitTerm(abs(d0), 0 if d0 > 0 else 1, 2 * m,
                                LaurentElement(val, 2 * m, base)))
        if d1:
            val = one if d1 > 0 else -one
            out.append(UnitTerm(abs(d1), 0 if d1 > 0 else 1, 2 * m + 1,
                                LaurentElement(val, 2 * m + 1, base)))
    return out


@dataclass(frozen=True)
class FieldReport:
    field_id: str
    w: int
    C: int
    B: int | None
    dug: bool
    dug_via: str  # w1-representations | rewriting | none
    omega_bound: int
    criterion: ge.CoveringVerdict
    critical_points: tuple[CriticalPointReport, ...]
    borderline_points: int
    precision_bits: int
    seconds: float
    failures: tuple[str, ...]


def certify_field(entry: CatalogEntry, w: int | None = None,
                  embedding_index: int | None = None,
                  precision_bits: int | None = None,
                  max_depth: int = MAX_DEPTH_DEFAULT,
                  ctx_out: list | None = None) -> FieldReport:
    """Full pipeline: minimal w, critical points, representations, verdicts.

    dug is certified either by w = 1 with all critical points represented,
    or, for the X^4-X+1 field, by the digit rewriting engine.
    """
    t0 = time.time()
    ctx = FieldAnalysis(entry, w=w, embedding_index=embedding_index,
                        precision_bits=precision_bits)
    if ctx_out is not None:
        ctx_out.append(ctx)
    failures = []
    crit = ctx.critical_points()
    nonzero = [cp for cp in crit if not cp.element.is_zero()]
    reports = []
    max_b = 0
    for cp in nonzero:
        try:
            rep = represent_critical_point(ctx, cp.element, max_depth)
            reports.append(rep)
            max_b = max(max_b, rep.depth)
        except ExpansionError as exc:
            failures.append(str(exc))
    all_rep = not failures and len(reports) == len(nonzero)
    dug_via = "none"
    if ctx.w == 1 and all_rep:
        dug_via = "w1-representations"
    elif entry.field.min_poly.coeffs == X4_X_1 and _rewriting_certifies():
        dug_via = "rewriting"
    dug = dug_via != "none"
    omega = 1 if dug else ctx.w
    return FieldReport(
        field_id=entry.field.id, w=ctx.w, C=len(nonzero),
        B=(max_b if nonzero else None), dug=dug, dug_via=dug_via,
        omega_bound=omega, criterion=ctx.criterion_value(ctx.w),
        critical_points=tuple(reports),
        borderline_points=sum(1 for cp in crit if cp.borderline),
        precision_bits=ctx.precision_bits, seconds=time.time() - t0,
        failures=tuple(failures))


def _rewriting_certifies() -> bool:
    """Spot-check the rewriting engine before trusting it for the dug flag."""
    from . import rewriting as rw

    try:
        rw.validate_derived_rules()
    except rw.RewriteError:
        return False
    import itertools as it

    for digs in it.product((-1, 0, 1, 2), repeat=4):
        word = rw.Word.from_digits(digs)
        signed = rw.rewrite_to_signed(word)[0]
        if not rw.words_equal_value(word, signed):
            return False
        if any(abs(dv) > 1 for dv in signed.digits.values()):
            return False
    return True
