"""Digit-word rewriting for the field of X^4 - X + 1.

Finite integer words v_k..v_l stand for sums of gamma powers; adding or
subtracting shifts of patterns that vanish at gamma (the defining relation
and three derived ones) changes the word but never its value. The engine
first sparsifies a word until five structural conditions hold, then drives
every remaining +-2 digit down to the alphabet {-1, 0, 1} by a case table
keyed on the distance to the next +-2. A signed output word is a sum of
pairwise distinct units, one per nonzero digit.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ring import LaurentElement, MinimalPolynomial, OrderElement, gamma

FIELD_POLY = MinimalPolynomial((1, -1, 0, 0, 1))


class RewriteError(RuntimeError):
    pass


class Word:
    """Sparse integer digit word: position -> nonzero digit."""

    __slots__ = ("digits",)

    def __init__(self, digits: dict[int, int] | None = None):
        self.digits = {p: d for p, d in (digits or {}).items() if d}

    @staticmethod
    def from_digits(seq, shift: int = 0) -> "Word":
        """Digits most significant first; shift is the lowest exponent."""
        seq = list(seq)
        n = len(seq)
        return Word({shift + (n - 1 - i): d for i, d in enumerate(seq) if d})

    def copy(self) -> "Word":
        return Word(dict(self.digits))

    def __eq__(self, other):
        return isinstance(other, Word) and self.digits == other.digits

    def __hash__(self):
        return hash(frozenset(self.digits.items()))

    def __bool__(self):
        return bool(self.digits)

    def get(self, pos: int) -> int:
        return self.digits.get(pos, 0)

    def weight(self) -> int:
        return sum(abs(d) for d in self.digits.values())

    def span(self) -> tuple[int, int]:
        if not self.digits:
            return (0, -1)
        return (min(self.digits), max(self.digits))

    def is_signed(self) -> bool:
        return all(abs(d) <= 1 for d in self.digits.values())

    def __neg__(self) -> "Word":
        return Word({p: -d for p, d in self.digits.items()})

    def add_pattern(self, pattern: dict[int, int], shift: int, sign: int):
        for e, c in pattern.items():
            p = e + shift
            v = self.digits.get(p, 0) + sign * c
            if v:
                self.digits[p] = v
            else:
                self.digits.pop(p, None)

    def value(self) -> LaurentElement:
        """Exact value as element * gamma^shift over X^4 - X + 1."""
        g = gamma(FIELD_POLY)
        zero = OrderElement.from_int(FIELD_POLY, 0)
        if not self.digits:
            return LaurentElement(zero, 0, g)
        lo, hi = self.span()
        acc = zero
        power = OrderElement.from_int(FIELD_POLY, 1)
        cur = lo
        for pos in sorted(self.digits):
            while cur < pos:
                power = power * g
                cur += 1
            acc = acc + power * self.digits[pos]
        return LaurentElement(acc, lo, g)

    def __repr__(self):
        return f"Word({format_word(self)!r})"


def format_word(w: Word) -> str:
    """CLI literal: comma-separated digits, most significant first, @shift."""
    if not w.digits:
        return "0@0"
    lo, hi = w.span()
    digs = [str(w.get(p)) for p in range(hi, lo - 1, -1)]
    return ",".join(digs) + f"@{lo}"


def parse_word_literal(text: str) -> Word:
    text = text.strip()
    shift = 0
    if "@" in text:
        text, s = text.rsplit("@", 1)
        shift = int(s)
    digs = [int(t) for t in text.split(",") if t.strip() != ""]
    if all(d == 0 for d in digs):
        return Word()
    return Word.from_digits(digs, shift)


def weight(v: Word) -> int:
    return v.weight()


def words_equal_value(a: Word, b: Word) -> bool:
    va, vb = a.value(), b.value()
    m = min(va.shift, vb.shift)
    g = gamma(FIELD_POLY)
    return va.element * (g ** (va.shift - m)) == vb.element * (g ** (vb.shift - m))


@dataclass(frozen=True)
class RewriteRule:
    name: str
    pattern: dict  # exponent -> coefficient; must vanish at gamma

    def poly_coeffs(self) -> list[int]:
        hi = max(self.pattern)
        out = [0] * (hi + 1)
        for e, c in self.pattern.items():
            out[e] = c
        return out


W1 = RewriteRule("w1", {4: 1, 1: -1, 0: 1})
W2 = RewriteRule("w2", {13: 1, 6: 3, 0: 1})
W3 = RewriteRule("w3", {10: 1, 6: 1, 3: 1, 1: -1, 0: 1})
W4 = RewriteRule("w4", {7: 1, 6: 1, 5: 1, 0: 1})
RULES = {r.name: r for r in (W1, W2, W3, W4)}


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    position: int
    sign: int


@dataclass
class RewriteTrace:
    initial: Word
    steps: list[RewriteStep]

    def replay(self) -> Word:
        w = self.initial.copy()
        for st in self.steps:
            w.add_pattern(RULES[st.rule].pattern, st.position, st.sign)
        return w


def apply_rule(u: Word, rule: RewriteRule, position: int, sign: int) -> Word:
    if sign not in (1, -1):
        raise RewriteError("sign must be +1 or -1")
    out = u.copy()
    out.add_pattern(rule.pattern, position, sign)
    return out


# ---------------------------------------------------------------------------
# Sparsification (weight-decreasing rewriting into the 5-condition form).

CONDITION_NAMES = ("i", "ii", "iii", "iv", "v")


def check_sparse_conditions(v: Word):
    """First violation as (condition, index), or None if the word is sparse.

    (i) digits within -2..2; (ii) same-sign pairs never at distance 1, 2, 4;
    (iii) opposite-sign pairs never at distance 1, 3; (iv) an opposite pair
    at distance 2 forces zeros at offsets 4 and 5; (v) a same-sign pair at
    distance 3 forces a zero at offset 6.
    """
    if not v.digits:
        return None
    lo, hi = v.span()
    for i in range(lo, hi + 1):
        vi = v.get(i)
        if abs(vi) > 2:
            return ("i", i)
        if vi == 0:
            continue
        for m in (1, 2, 4):
            if v.get(i + m) * vi > 0:
                return ("ii", i)
        for m in (1, 3):
            if v.get(i + m) * vi < 0:
                return ("iii", i)
        if v.get(i + 2) * vi < 0 and (v.get(i + 4) != 0 or v.get(i + 5) != 0):
            return ("iv", i)
        if v.get(i + 3) * vi > 0 and v.get(i + 6) != 0:
            return ("v", i)
    return None


def _sign(x: int) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


# case -> (rule, shift offset from i, sign selector)
def _candidates(v: Word):
    """Applicable (index, case, rule, shift, sign) tuples in priority order."""
    out = []
    for i in sorted(v.digits):
        vi = v.digits[i]
        s = _sign(vi)
        if abs(vi) >= 3:
            out.append((i, "a", W2, i - 6, -s))
        if v.get(i + 1) * vi < 0:
            out.append((i, "b", W1, i, _sign(v.get(i + 1))))
        if v.get(i + 3) * vi < 0:
            out.append((i, "c", W1, i - 1, s))
        if v.get(i + 4) * vi > 0:
            out.append((i, "d", W1, i, -s))
        if v.get(i + 2) * vi < 0 and v.get(i + 5) * vi < 0:
            out.append((i, "e", W3, i - 1, s))
        if v.get(i + 3) * vi > 0 and v.get(i + 6) * vi > 0:
            out.append((i, "f", W3, i, -s))
        if v.get(i + 1) * vi > 0:
            out.append((i, "g", W4, i - 6, -s))
        if v.get(i + 2) * vi > 0:
            out.append((i, "h", W4, i - 5, -s))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _weight_delta(v: Word, rule: RewriteRule, shift: int, sign: int) -> int:
    delta = 0
    for e, c in rule.pattern.items():
        old = v.get(e + shift)
        delta += abs(old + sign * c) - abs(old)
    return delta


def sparsify(u: Word) -> tuple[Word, RewriteTrace]:
    """Rewrite into the 5-condition form, decreasing weight at every step.

    The two weight-neutral cases (same-sign pairs at distance 1 or 2 with
    nothing underneath to absorb them) are applied at most once per shape:
    a seen-set guards against cycling, and the step guard flags a bug.
    """
    trace = RewriteTrace(u.copy(), [])
    v = u.copy()
    guard = 10 * v.weight() ** 2 + 100
    seen: set = set()
    while True:
        if len(trace.steps) > guard:
            raise RewriteError("sparsify exceeded its step guard (bug)")
        cands = _candidates(v)
        applied = False
        for i, case, rule, shift, sign in cands:
            if _weight_delta(v, rule, shift, sign) < 0:
                v.add_pattern(rule.pattern, shift, sign)
                trace.steps.append(RewriteStep(rule.name, shift, sign))
                seen.clear()
                applied = True
                break
        if applied:
            continue
        if check_sparse_conditions(v) is None:
            return v, trace
        # only the w4 cases (g)/(h) can be weight-neutral
        for i, case, rule, shift, sign in cands:
            if case not in ("g", "h"):
                continue
            if _weight_delta(v, rule, shift, sign) != 0:
                continue
            nxt = apply_rule(v, rule, shift, sign)
            key = frozenset(nxt.digits.items())
            if key in seen:
                continue
            seen.add(frozenset(v.digits.items()))
            v = nxt
            trace.steps.append(RewriteStep(rule.name, shift, sign))
            applied = True
            break
        if not applied:
            raise RewriteError(
                f"sparsify is stuck on {format_word(v)} (conditions violated, "
                "no reducing step)")


# ---------------------------------------------------------------------------
# Normalization of +-2 digits into the signed alphabet.

# Tables keyed on the distance to the next +-2 above. Each row maps the
# (sign-normalized) context window to the w1 operations resolving the low 2:
#   A: subtract w1 at i, B: add w1 at i-1, C: add w1 at i-1 and at i+2.
_OPS = {
    "A": ((0, -1),),
    "B": ((-1, 1),),
    "C": ((-1, 1), (2, 1)),
}

_TABLE_D6 = {  # key: (v[i+4], v[i+3], v[i+2])
    (0, 0, -1): "A",
    (0, 1, 0): "A",
    (0, 0, 0): "A",
    (-1, 0, 0): "B",
}

_TABLE_D5 = {  # key: (v[i+5], v[i+4], v[i+3], v[i+2])
    (1, 0, 0, 0): "A",
    (1, 1, 0, 0): "A",
    (-1, 0, 0, 0): "A",
    (-1, -1, 0, 0): "B",
    (-1, 0, 1, 0): "A",
    (-1, -1, 1, 0): "C",
}

_TABLE_D4 = {  # key: (v[i+4], v[i+3])
    (-1, 0): "B",
    (-1, -1): "B",
}

_TABLE_D3 = {  # key: (v[i+4], v[i+3], v[i+2])
    (0, 1, 1): "A",
    (1, 1, 0): "A",
    (0, 1, 0): "A",
}

_TABLE_D2 = {  # key: (v[i+4], v[i+3], v[i+2], v[i+1])
    (0, 0, -1, -1): "A",
    (0, -1, -1, 0): "A",
}


def _resolve_low_two(v: Word, i: int, delta, trace: RewriteTrace):
    """Apply the table row for the lowest +-2 at position i (paper order)."""
    s = _sign(v.get(i))
    if abs(v.get(i)) != 2:
        raise RewriteError(f"internal: no +-2 at {i}")
    if delta is None or delta >= 6:
        table, offs = _TABLE_D6, (4, 3, 2)
    elif delta == 5:
        table, offs = _TABLE_D5, (5, 4, 3, 2)
    elif delta == 4:
        table, offs = _TABLE_D4, (4, 3)
    elif delta == 3:
        table, offs = _TABLE_D3, (4, 3, 2)
    elif delta == 2:
        table, offs = _TABLE_D2, (4, 3, 2, 1)
    else:
        raise RewriteError(f"impossible gap {delta} between +-2 digits")
    key = tuple(s * v.get(i + o) for o in offs)
    op = table.get(key)
    if op is None:
        window = ",".join(str(v.get(i + o)) for o in range(7, -2, -1))
        raise RewriteError(
            f"no table row for neighborhood [{window}] at index {i} "
            f"(gap {delta}); this contradicts the case analysis")
    for off, sign in _OPS[op]:
        v.add_pattern(W1.pattern, i + off, sign * s)
        trace.steps.append(RewriteStep(W1.name, i + off, sign * s))


def normalize(v: Word) -> tuple[Word, RewriteTrace]:
    """Rewrite a sparse word into digits {-1, 0, 1}, value preserved.

    Processes the +-2 positions top-down; the gap of each +-2 to its upper
    neighbor decides which table applies, exactly as in the case proof. The
    digits below i-1 never change.
    """
    bad = check_sparse_conditions(v)
    if bad is not None:
        raise RewriteError(f"normalize needs a sparse word; condition "
                           f"({bad[0]}) fails at index {bad[1]}")
    trace = RewriteTrace(v.copy(), [])
    out = v.copy()
    twos = sorted((p for p, d in v.digits.items() if abs(d) == 2), reverse=True)
    gaps = []
    for k, p in enumerate(twos):
        gaps.append(None if k == 0 else twos[k - 1] - p)
    for p, gap in zip(twos, gaps):
        _resolve_low_two(out, p, gap, trace)
    if not out.is_signed():
        raise RewriteError("normalize left digits outside {-1,0,1} (bug)")
    return out, trace


def rewrite_to_signed(x: Word) -> tuple[Word, RewriteTrace]:
    """sparsify then normalize; the result is over {-1,0,1} with equal value."""
    sparse, t1 = sparsify(x)
    signed, t2 = normalize(sparse)
    trace = RewriteTrace(x.copy(), t1.steps + t2.steps)
    return signed, trace


def validate_derived_rules() -> dict:
    """Each derived pattern vanishes at gamma and is a sum of w1 shifts.

    The decomposition is the exact quotient by X^4 - X + 1; the report maps
    rule name -> list of (shift, multiplicity) with its reconstruction
    verified digit by digit.
    """
    base = W1.poly_coeffs()
    report = {}
    for rule in (W1, W2, W3, W4):
        quot, rem = _polydiv_int(rule.poly_coeffs(), base)
        if rem is None or any(rem):
            raise RewriteError(f"{rule.name} is not divisible by the base rule")
        decomp = [(e, c) for e, c in enumerate(quot) if c]
        rebuilt = Word()
        for e, c in decomp:
            for _ in range(abs(c)):
                rebuilt.add_pattern(W1.pattern, e, _sign(c))
        if rebuilt.digits != {e: c for e, c in rule.pattern.items()}:
            raise RewriteError(f"{rule.name} reconstruction mismatch")
        report[rule.name] = decomp
    return report


def _polydiv_int(num: list[int], den: list[int]):
    """Exact division of integer polynomials (ascending); None if non-integer."""
    num = num[:]
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return None, num
    quot = [0] * (len(num) - dn)
    for k in range(len(num) - 1 - dn, -1, -1):
        c = num[k + dn]
        if c % den[-1] != 0:
            return None, None
        q = c // den[-1]
        quot[k] = q
        if q:
            for j, d in enumerate(den):
                num[k + j] -= q * d
    return quot, num


def unit_sum_from_signed(word: Word) -> list[tuple[int, int]]:
    """Signed word as distinct units: list of (sign, gamma exponent)."""
    if not word.is_signed():
        raise RewriteError("word is not over {-1,0,1}")
    return [(d, p) for p, d in sorted(word.digits.items())]
