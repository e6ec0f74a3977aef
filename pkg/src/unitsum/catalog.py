"""Field catalog: defining polynomials, roots of unity, verified Pisot units.

Entries are shipped as JSON (data/catalog.json). Loading re-checks every
invariant exactly: irreducibility, the root-of-unity relations, unit norms
and the complex-Pisot verdict; any failure aborts naming the entry.

Schema (schema version 1), one object per field:
  id             stable lowercase identifier
  display        human-readable field name
  table          2, 3, 5 (paper tables) or 0 (extra entries)
  minpoly        5 ascending integer coefficients, monic quartic
  mu             largest root-of-unity order (even)
  alphabet_mu    root-of-unity order of the digit alphabet (default mu; the
                 zeta8 field expands over the Sigma_4 sub-alphabet)
  zeta           coords of a primitive mu-th root of unity (mu > 2)
  unit           coords of the expansion unit (eps, or eps-tilde if squared_base)
  squared_base   true when the base is eps = eps_tilde^2
  embedding      root index 0..3 identified with K in C
  alt_embedding  root index of the other non-conjugate pair (squared_base only)
  marker         none | dagger | double_dagger
  suborder       true when Z[gamma] is a proper suborder of the maximal order
  expected       {w, C, B, eps_tilde?} from the paper tables (absent for extras)
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources

import mpmath as mp

from . import numerics as nu
from .ring import MinimalPolynomial, OrderElement

CATALOG_RESOURCE = "catalog.json"


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class FieldDescriptor:
    id: str
    display: str
    table: int
    min_poly: MinimalPolynomial
    mu: int
    alphabet_mu: int
    zeta: OrderElement | None
    marker: str  # none | dagger | double_dagger
    suborder: bool
    expected: dict | None


@dataclass(frozen=True)
class UnitData:
    unit: OrderElement
    is_squared_base: bool
    embedding: nu.EmbeddingData
    alt_embedding_index: int | None

    def base(self) -> OrderElement:
        return self.unit * self.unit if self.is_squared_base else self.unit


@dataclass(frozen=True)
class CatalogEntry:
    field: FieldDescriptor
    unit_data: UnitData


def _load_raw() -> list[dict]:
    text = resources.files(__package__).joinpath("data", CATALOG_RESOURCE).read_text()
    doc = json.loads(text)
    if doc.get("schema") != 1:
        raise CatalogError(f"unsupported catalog schema {doc.get('schema')!r}")
    return doc["fields"]


def _entry_from_raw(raw: dict, precision_bits: int | None = None) -> CatalogEntry:
    fid = raw.get("id", "<missing id>")
    try:
        poly = MinimalPolynomial(tuple(raw["minpoly"]))
        if not poly.is_irreducible():
            raise CatalogError("minimal polynomial is reducible")
        mu = int(raw["mu"])
        if mu % 2 != 0:
            raise CatalogError(f"mu must be even, got {mu}")
        zeta = None
        if mu > 2:
            zeta = OrderElement(poly, tuple(raw["zeta"]))
            _check_zeta(zeta, mu)
        unit = OrderElement(poly, tuple(raw["unit"]))
        if not unit.is_unit():
            raise CatalogError(f"|norm| != 1 for stored unit {unit.coords}")
        emb = nu.find_roots(poly, precision_bits).with_chosen(int(raw["embedding"]))
        squared = bool(raw["squared_base"])
        base = unit * unit if squared else unit
        verdict = nu.classify_pisot(base, emb)
        if verdict.verdict != "complex_pisot":
            raise CatalogError(
                f"stored base is {verdict.verdict}, not complex Pisot "
                f"(main modulus {verdict.modulus_main})")
        alphabet_mu = int(raw.get("alphabet_mu", mu))
        if mu % alphabet_mu != 0:
            raise CatalogError(f"alphabet_mu {alphabet_mu} must divide mu {mu}")
        field = FieldDescriptor(
            id=raw["id"], display=raw.get("display", raw["id"]),
            table=int(raw.get("table", 0)), min_poly=poly, mu=mu,
            alphabet_mu=alphabet_mu, zeta=zeta,
            marker=raw.get("marker", "none"), suborder=bool(raw.get("suborder", False)),
            expected=raw.get("expected"))
        unit_data = UnitData(unit=unit, is_squared_base=squared, embedding=emb,
                             alt_embedding_index=raw.get("alt_embedding"))
        return CatalogEntry(field, unit_data)
    except CatalogError as exc:
        raise CatalogError(f"catalog entry {fid!r}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"catalog entry {fid!r}: malformed ({exc})") from exc


def entry_from_dict(raw: dict, precision_bits: int | None = None) -> CatalogEntry:
    """Build and invariant-check an entry outside the shipped catalog.

    Accepts the same keys as the JSON schema; expected values are optional,
    so user-supplied fields work as long as the unit and zeta data hold up.
    """
    return _entry_from_raw(raw, precision_bits)


def _check_zeta(zeta: OrderElement, mu: int):
    one = OrderElement.from_int(zeta.poly, 1)
    if (zeta ** mu) != one:
        raise CatalogError(f"zeta^{mu} != 1")
    if (zeta ** (mu // 2)) != -one:
        raise CatalogError(f"zeta^{mu // 2} != -1")
    for k in range(1, mu):
        if (zeta ** k) == one:
            raise CatalogError(f"zeta has order {k} < {mu}")


_CACHE: dict[int | None, tuple[CatalogEntry, ...]] = {}


def load_catalog(precision_bits: int | None = None) -> tuple[CatalogEntry, ...]:
    """All catalog entries, invariant-checked at load. Cached per precision."""
    key = precision_bits
    if key not in _CACHE:
        _CACHE[key] = tuple(_entry_from_raw(raw, precision_bits) for raw in _load_raw())
        ids = [e.field.id for e in _CACHE[key]]
        if len(set(ids)) != len(ids):
            raise CatalogError("duplicate field ids in catalog")
    return _CACHE[key]


def get_entry(field_id: str, precision_bits: int | None = None) -> CatalogEntry:
    wanted = field_id.strip().lower()
    for entry in load_catalog(precision_bits):
        if entry.field.id == wanted:
            return entry
    raise CatalogError(f"unknown field id {field_id!r}; run the catalog command "
                       "for the list")


def find_pisot_unit(poly: MinimalPolynomial, coord_bound: int,
                    e: nu.EmbeddingData | None = None,
                    zeta: OrderElement | None = None) -> tuple[OrderElement, int] | None:
    """Exhaustive unit search in the coordinate box [-bound, bound]^4.

    Returns (canonical unit, embedding index) of minimal main modulus among
    complex-Pisot units, or None. The float prefilter only skips elements
    whose norm is clearly far from +-1; candidates are confirmed exactly.
    """
    if coord_bound < 0:
        raise CatalogError("coord_bound must be >= 0")
    if e is None:
        e = nu.find_roots(poly)
    roots_f = e.roots_f
    r0, r1 = roots_f[0], roots_f[2]
    pw0 = [r0 ** k for k in range(4)]
    pw1 = [r1 ** k for k in range(4)]
    found = []
    rng = range(-coord_bound, coord_bound + 1)
    for c3 in rng:
        a3, b3 = c3 * pw0[3], c3 * pw1[3]
        for c2 in rng:
            a2, b2 = a3 + c2 * pw0[2], b3 + c2 * pw1[2]
            for c1 in rng:
                a1, b1 = a2 + c1 * pw0[1], b2 + c1 * pw1[1]
                for c0 in rng:
                    za, zb = a1 + c0, b1 + c0
                    m0, m1 = abs(za), abs(zb)
                    nf = (m0 * m1) ** 2
                    if not 0.4 < nf < 2.5:
                        continue
                    if (m0 > 1 and m1 > 1) or (m0 < 1 and m1 < 1):
                        continue
                    el = OrderElement(poly, (c0, c1, c2, c3))
                    if abs(el.norm()) != 1:
                        continue
                    which = 0 if m0 > m1 else 2
                    found.append((max(m0, m1), el, which))
    if not found:
        return None
    found.sort(key=lambda t: t[0])
    best_mod = found[0][0]
    pool = [t for t in found if t[0] <= best_mod * (1 + 1e-9)]
    cands = []
    for _, el, which in pool:
        canon, idx = canonical_associate(el, e.with_chosen(which), zeta)
        cands.append((canon, idx))
    cands.sort(key=lambda t: (tuple(abs(c) for c in t[0].coords), t[0].coords))
    unit, which = cands[0]
    verdict = nu.classify_pisot(unit, e.with_chosen(which))
    if verdict.verdict != "complex_pisot":
        return None
    return unit, which


def canonical_associate(unit: OrderElement, e: nu.EmbeddingData,
                        zeta: OrderElement | None) -> tuple[OrderElement, int]:
    """Canonical representative of unit * (roots of unity).

    Picks, among associates with positive real part under the Pisot
    embedding of the given pair, the lexicographically smallest coordinate
    vector (absolute values first, then signs).
    """
    pair = e.chosen_index // 2
    assocs = [unit, -unit]
    if zeta is not None:
        mu = _zeta_order(zeta)
        p = zeta
        for _ in range(mu - 1):
            assocs.extend([p * unit, -(p * unit)])
            p = p * zeta
    seen = {}
    for a in assocs:
        for idx in (2 * pair, 2 * pair + 1):
            z = nu.embed_fast(a, e.roots_f[idx])
            if z.real > 1e-12:
                key = (tuple(abs(c) for c in a.coords), a.coords)
                if key not in seen:
                    seen[key] = (a, idx)
    if not seen:
        return unit, e.chosen_index
    return seen[min(seen)]


def _zeta_order(zeta: OrderElement) -> int:
    k = nu.is_root_of_unity(zeta)
    if not k:
        raise CatalogError("zeta is not a root of unity")
    return k


@dataclass(frozen=True)
class VerificationReport:
    field_id: str
    ok: bool
    failures: tuple[str, ...]
    checks: tuple[str, ...]


def verify_catalog_entry(entry: CatalogEntry,
                         precision_bits: int | None = None) -> VerificationReport:
    """Re-derive the entry's claims; mismatches become a structured report."""
    prec = precision_bits or nu.default_precision()
    failures = []
    checks = []
    f, u = entry.field, entry.unit_data
    if abs(u.unit.norm()) == 1:
        checks.append("unit norm is +-1")
    else:
        failures.append(f"|norm(unit)| = {abs(u.unit.norm())} != 1")
    verdict = nu.classify_pisot(u.base(), u.embedding)
    if verdict.verdict == "complex_pisot":
        checks.append(f"base is complex Pisot (|main| = {verdict.modulus_main:.6f})")
    else:
        failures.append(f"base verdict {verdict.verdict}")
    if f.mu > 2:
        try:
            _check_zeta(f.zeta, f.mu)
            checks.append(f"zeta has exact order {f.mu}")
        except CatalogError as exc:
            failures.append(str(exc))
    expected = f.expected or {}
    printed = expected.get("eps_tilde")
    if printed is not None:
        with mp.workprec(prec):
            z = complex(nu.embed(u.unit, u.embedding))
        target = complex(printed[0], printed[1])
        if abs(z - target) <= 5e-4:
            checks.append(f"eps-tilde embedding matches printed {target}")
        else:
            failures.append(f"eps-tilde {z} differs from printed {target}")
    return VerificationReport(f.id, not failures, tuple(failures), tuple(checks))


def iter_table(table: int, precision_bits: int | None = None):
    for entry in load_catalog(precision_bits):
        if entry.field.table == table:
            yield entry
