"""Regenerate src/unitsum/data/catalog.json from first principles.

Development-only script (needs sympy and numpy in addition to the package);
the shipped JSON is the frozen output. For every field it

  1. finds a power-basis generator theta: index 1 in the maximal order when
     one exists, else the smallest suborder containing the sixth root of
     unity and the fundamental unit (that suborder provably sees the same
     critical points);
  2. locates the minimal-modulus complex-Pisot unit by exhaustive search;
  3. expresses zeta_mu and the unit in the theta power basis exactly;
  4. runs the full pipeline (w, C, B) and asserts the table values.

Usage: python scripts/derive_catalog.py [field-id ...]
"""
from __future__ import annotations

import itertools
import json
import sys
from pathlib import Path

import mpmath as mp
import numpy as np
from sympy import Poly, QQ
from sympy.abc import x as _x
from sympy.polys.numberfields.basis import round_two

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from unitsum import catalog as cat
from unitsum import expansion as ex
from unitsum import numerics as nu
from unitsum.ring import MinimalPolynomial, OrderElement

mp.mp.prec = 260
OUT = Path(__file__).resolve().parent.parent / "src" / "unitsum" / "data" / "catalog.json"

# ---------------------------------------------------------------------------
# Field inventory (paper tables)

Z4_FIELDS = [  # (a, b, w, C, B, marker)
    (1, 1, 1, 4, 1, "none"),
    (1, 2, 1, 8, 2, "none"),
    (1, 4, 1, 16, 2, "none"),
    (7, 4, 2, 8, 2, "dagger"),
]

Z3_FIELDS = [  # (a, b, w, C, B, marker)
    (2, 1, 1, 6, 1, "none"),
    (4, 1, 1, 66, 3, "none"),
    (8, 1, 1, 6, 1, "none"),
    (3, 2, 1, 0, None, "none"),
    (4, 3, 1, 0, None, "none"),
    (7, 3, 1, 6, 1, "none"),
    (11, 3, 1, 0, None, "none"),
    (5, 4, 1, 24, 2, "none"),
    (9, 4, 1, 6, 1, "none"),
    (13, 4, 1, 0, None, "none"),
    (12, 5, 1, 6, 1, "none"),
    (11, 7, 1, 0, None, "none"),
    (9, 8, 1, 6, 1, "none"),
    (15, 11, 1, 0, None, "none"),
    (19, 11, 2, 6, 1, "dagger"),
    (17, 12, 2, 6, 1, "dagger"),
    (17, 16, 2, 6, 1, "dagger"),
]

BIQUADRATIC = [  # (id, display, sqrt arg d, w, C, B)
    ("q-zeta3-sqrt6", "Q(zeta3, sqrt6)", 6, 1, 0, None),
    ("q-zeta3-sqrt21", "Q(zeta3, sqrt21)", 21, 1, 6, 1),
]

T5_FIELDS = [  # (id, ascending minpoly, w, printed eps-tilde, C, B, marker)
    ("x4-x+1", (1, -1, 0, 0, 1), 2, (0.727, 0.934), 112, 7, "none"),
    ("x4-x3+x2+x+1", (1, 1, 1, -1, 1), 3, (-0.933, 1.132), 42, 4, "double_dagger"),
    ("x4-x3+x+1", (1, 1, 0, -1, 1), 3, (-1.066, 0.864), 56, 4, "double_dagger"),
    ("x4+2x2-2x+1", (1, -2, 2, 0, 1), 2, (0.475, 1.509), 18, 4, "dagger"),
    ("x4-x3+2x2-x+2", (2, -1, 2, -1, 1), 2, (0.204, 1.664), 12, 3, "dagger"),
]


# ---------------------------------------------------------------------------
# numeric helpers

def roots_of(asc):
    return mp.polyroots([mp.mpf(1)] + [mp.mpf(c) for c in reversed(asc[:-1])],
                        maxsteps=400, extraprec=160)


def minpoly_from_values(vals):
    """Monic integer quartic with the given 4 conjugate values, or None."""
    e1 = sum(vals)
    e2 = sum(vals[i] * vals[j] for i in range(4) for j in range(i + 1, 4))
    e3 = sum(vals[i] * vals[j] * vals[k]
             for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4))
    e4 = vals[0] * vals[1] * vals[2] * vals[3]
    desc = [mp.mpf(1), -e1, e2, -e3, e4]
    out = []
    for v in desc:
        r = mp.nint(mp.re(v))
        if abs(v - r) > 1e-10:
            return None
        out.append(int(r))
    return tuple(reversed(out))  # ascending


def express_in_power_basis(target_vals, theta_roots):
    """Integer coords c with sum c_k theta^k = target under all embeddings."""
    A = mp.matrix(4, 4)
    b = mp.matrix(4, 1)
    for i in range(4):
        for k in range(4):
            A[i, k] = theta_roots[i] ** k
        b[i] = target_vals[i]
    try:
        sol = mp.lu_solve(A, b)
    except ZeroDivisionError:
        return None
    coords = []
    for v in sol:
        r = mp.nint(mp.re(v))
        if abs(v - r) > 1e-8:
            return None
        coords.append(int(r))
    return tuple(coords)


def unit_search(poly_asc, bound=14, keep=400):
    """Units of Z[theta] in the coordinate box, by float prefilter + exact norm.

    Returns [(max modulus, coords, which pair is big)] sorted by modulus.
    """
    poly = MinimalPolynomial(poly_asc)
    e = nu.find_roots(poly, 192)
    r0, r1 = e.roots_f[0], e.roots_f[2]
    rng = np.arange(-bound, bound + 1)
    c1, c2, c3 = np.meshgrid(rng, rng, rng, indexing="ij")
    z0 = c1 * r0 + c2 * r0 ** 2 + c3 * r0 ** 3
    z1 = c1 * r1 + c2 * r1 ** 2 + c3 * r1 ** 3
    out = []
    for c0 in rng:
        m0 = np.abs(z0 + c0)
        m1 = np.abs(z1 + c0)
        nf = (m0 * m1) ** 2
        mask = (np.abs(nf - 1.0) < 0.2) & ((m0 - 1) * (m1 - 1) < 0)
        for i1, i2, i3 in zip(*np.nonzero(mask)):
            el = OrderElement(poly, (int(c0), int(rng[i1]), int(rng[i2]), int(rng[i3])))
            if abs(el.norm()) != 1:
                continue
            mm0, mm1 = m0[i1, i2, i3], m1[i1, i2, i3]
            out.append((float(max(mm0, mm1)), el.coords, 0 if mm0 > mm1 else 1))
    out.sort(key=lambda t: (t[0], t[1]))
    dedup = []
    seen = set()
    for t in out:
        if t[1] not in seen:
            seen.add(t[1])
            dedup.append(t)
    return dedup[:keep], e


def zeta_in_basis(poly_asc, mu, e):
    """Coords of a primitive mu-th root of unity in the theta power basis."""
    prim = [k for k in range(1, mu) if _gcd(k, mu) == 1]
    troots = [e.roots[i] for i in range(4)]
    base = mp.expjpi(mp.mpf(2) / mu)
    for assign in itertools.product(prim, repeat=4):
        vals = [base ** a for a in assign]
        coords = express_in_power_basis(vals, troots)
        if coords is None:
            continue
        poly = MinimalPolynomial(poly_asc)
        z = OrderElement(poly, coords)
        one = OrderElement.from_int(poly, 1)
        if (z ** mu) == one and (z ** (mu // 2)) == -one and \
                all((z ** k) != one for k in range(1, mu)):
            return coords
    return None


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# generator searches

def monogenic_generator(base_asc, bound=8):
    """(theta minpoly asc, theta coords over O_K basis embeddings) or None."""
    p = Poly(list(reversed(base_asc)), _x, domain=QQ)
    ZK, dK = round_two(p)
    Bm = ZK.QQ_matrix.to_Matrix()
    broots = roots_of(base_asc)
    emb = []  # per root: images of the integral basis
    for r in broots:
        pw = [r ** k for k in range(4)]
        emb.append([sum(pw[i] * mp.mpf(int(Bm[i, j].p)) / int(Bm[i, j].q)
                        for i in range(4)) for j in range(4)])
    rng = range(-bound, bound + 1)
    best = None
    for c in itertools.product(rng, repeat=3):
        if all(v == 0 for v in c):
            continue
        vals = [sum(c[j - 1] * emb[r][j] for j in range(1, 4)) for r in range(4)]
        asc = minpoly_from_values(vals)
        if asc is None:
            continue
        q = Poly(list(reversed(asc)), _x, domain=QQ)
        if q.degree() != 4 or not q.is_irreducible:
            continue
        if q.discriminant() == dK:
            score = (max(abs(v) for v in asc), sum(abs(v) for v in asc))
            if best is None or score < best[0]:
                best = (score, asc, vals)
    if best is None:
        return None, int(dK)
    return (best[1], best[2]), int(dK)


def suborder_generator(base_asc, mu, unit_pool_bound=22):
    """theta with Z[theta] containing zeta_mu and the fundamental unit.

    Used when the maximal order is not monogenic. The suborder still sees
    every critical point because those are integer words in zeta and 1/eps.
    Returns (theta minpoly asc, zeta coords, unit coords, embedding index).
    """
    p = Poly(list(reversed(base_asc)), _x, domain=QQ)
    ZK, dK = round_two(p)
    Bm = ZK.QQ_matrix.to_Matrix()
    broots = roots_of(base_asc)
    emb = []
    for r in broots:
        pw = [r ** k for k in range(4)]
        emb.append([sum(pw[i] * mp.mpf(int(Bm[i, j].p)) / int(Bm[i, j].q)
                        for i in range(4)) for j in range(4)])
    # fundamental unit: minimal |.|>1 combo of the integral basis with norm 1
    rng = np.arange(-unit_pool_bound, unit_pool_bound + 1)
    E = np.array([[complex(emb[r][j]) for j in range(4)] for r in range(4)])
    c0, c1, c2, c3 = np.meshgrid(rng, rng, rng, rng, indexing="ij")
    vals0 = c0 * E[0, 0] + c1 * E[0, 1] + c2 * E[0, 2] + c3 * E[0, 3]
    vals2 = c0 * E[2, 0] + c1 * E[2, 1] + c2 * E[2, 2] + c3 * E[2, 3]
    m0, m2 = np.abs(vals0), np.abs(vals2)
    nf = (m0 * m2) ** 2
    mask = (np.abs(nf - 1.0) < 1e-6) & (np.maximum(m0, m2) > 1.0 + 1e-9)
    idx = np.nonzero(mask)
    units = sorted(
        (float(max(m0[i], m2[i])), tuple(int(v[i]) for v in (c0, c1, c2, c3)))
        for i in zip(*idx))
    if not units:
        raise RuntimeError("no unit found in integral-basis box")
    eps_mod, eps_combo = units[0]
    eps_vals = [sum(eps_combo[j] * emb[r][j] for j in range(4)) for r in range(4)]
    # zeta_mu in the maximal order (exact images picked later per embedding)
    base_z = mp.expjpi(mp.mpf(2) / mu)
    # candidate generators: small words in zeta and eps
    zeta_val_opts = [base_z, 1 / base_z]
    for z_assign in itertools.product(range(2), repeat=4):
        zeta_vals = [zeta_val_opts[a] for a in z_assign]
        # must be consistent: zeta in K means coords over integral basis are rational
        coords = express_in_power_basis(zeta_vals, [mp.mpc(v) for v in eps_vals]) \
            if False else None
        # consistency is established downstream; try candidate thetas
        for (az, ae, c) in [(1, 1, 0), (1, 1, 1), (1, 2, 0), (2, 1, 0), (1, -1, 0),
                            (-1, 1, 0), (1, 1, -1), (2, 1, 1), (1, 2, 1)]:
            theta_vals = [az * zeta_vals[r] + ae * eps_vals[r] + c for r in range(4)]
            asc = minpoly_from_values(theta_vals)
            if asc is None:
                continue
            try:
                poly = MinimalPolynomial(asc)
            except Exception:
                continue
            if not poly.is_irreducible() or poly.discriminant() == 0:
                continue
            e = nu.find_roots(poly, 192)
            troots = [e.roots[i] for i in range(4)]
            # match theta roots to theta values (pair each root to an embedding)
            perm = _match_roots(theta_vals, troots)
            if perm is None:
                continue
            ordered = [troots[perm[r]] for r in range(4)]
            zc = express_in_power_basis(zeta_vals, ordered)
            uc = express_in_power_basis(eps_vals, ordered)
            if zc is None or uc is None:
                continue
            z = OrderElement(poly, zc)
            u = OrderElement(poly, uc)
            one = OrderElement.from_int(poly, 1)
            if (z ** mu) != one or (z ** (mu // 2)) != -one:
                continue
            if abs(u.norm()) != 1:
                continue
            # embedding index for which |eps| > 1
            which = None
            for k in range(4):
                if abs(nu.embed_fast(u, e.roots_f[k]) - complex(eps_vals[0])) < 1e-6:
                    which = k
                    break
            if which is None:
                for k in range(4):
                    if abs(nu.embed_fast(u, e.roots_f[k])) > 1:
                        which = k
                        break
            return asc, zc, uc, which
    raise RuntimeError("no suborder generator found")


def _match_roots(vals, roots):
    perm = []
    used = set()
    for v in vals:
        best, bd = None, 1e9
        for i, r in enumerate(roots):
            if i in used:
                continue
            d = abs(mp.mpc(v) - r)
            if d < bd:
                bd, best = d, i
        if bd > 1e-6:
            return None
        used.add(best)
        perm.append(best)
    return perm


# ---------------------------------------------------------------------------
# entry assembly + verification through the pipeline

def finish_entry(raw, expected, check=True):
    raw = dict(raw)
    if expected:
        raw["expected"] = expected
    entry = cat.entry_from_dict(raw, 256)
    if check:
        report = ex.certify_field(entry)
        want = expected or {}
        ok_w = want.get("w") == report.w
        ok_c = want.get("C") == report.C
        ok_b = want.get("B", None) == report.B
        status = "OK " if (ok_w and ok_c and ok_b) else "MISMATCH"
        print(f"  {status} {raw['id']}: w={report.w} C={report.C} B={report.B} "
              f"(expected {want.get('w')}/{want.get('C')}/{want.get('B')}) "
              f"dug={report.dug} [{report.seconds:.1f}s]")
        if not (ok_w and ok_c and ok_b):
            raise RuntimeError(f"table mismatch for {raw['id']}")
    return raw


def pick_unit_embedding(poly_asc, unit_coords, zeta_coords, mu):
    """Minimize w over associates zeta^k * unit and all four embeddings.

    Rotating by zeta matters when mu is not a symmetry of the region (the
    square only has 4-fold symmetry but mu may be 8). Among the optimal
    (associate, embedding) pairs the lexicographically smallest coordinate
    vector with positive real part wins.
    """
    from unitsum import geometry as ge
    poly = MinimalPolynomial(poly_asc)
    e = nu.find_roots(poly, 256)
    u = OrderElement(poly, unit_coords)
    z = OrderElement(poly, zeta_coords)
    kind = "square" if mu % 4 == 0 else "hexagon"
    assocs = []
    cur = u
    for _ in range(mu):
        cur = cur * z
        assocs.append(cur)
    results = []
    for a in assocs:
        for k in range(4):
            zf = nu.embed_fast(a, e.roots_f[k])
            if abs(zf) <= 1 or zf.real <= 1e-12:
                continue
            for w in range(1, 9):
                if ge.CRITERIA[kind](nu.embed(a, e.with_chosen(k)), w).passed:
                    results.append((w, tuple(abs(c) for c in a.coords),
                                    a.coords, k))
                    break
    if not results:
        raise RuntimeError("no embedding makes the unit Pisot")
    results.sort()
    w, _, coords, emb = results[0]
    return w, coords, emb


def derive_z4_or_z3(a, b, mu, expected, marker, fid, display):
    const = a * a + b * b if mu == 4 else a * a - a * b + b * b
    mid = -2 * a if mu == 4 else b - 2 * a
    base_asc = (const, 0, mid, 0, 1)
    gen, dK = monogenic_generator(base_asc)
    suborder = gen is None
    if not suborder:
        theta_asc = gen[0]
        e = nu.find_roots(MinimalPolynomial(theta_asc), 256)
        zc = zeta_in_basis(theta_asc, mu, e)
        if zc is None:
            raise RuntimeError(f"zeta not found for {fid}")
        units, e192 = unit_search(theta_asc)
        if not units:
            raise RuntimeError(f"no units for {fid}")
        uc = units[0][1]
    else:
        theta_asc, zc, uc, _ = suborder_generator(base_asc, mu)
    w_found, ucoords, emb_idx = pick_unit_embedding(theta_asc, uc, zc, mu)
    raw = {
        "id": fid, "display": display, "table": 2 if mu == 4 else 3,
        "minpoly": list(theta_asc), "mu": mu, "zeta": list(zc),
        "unit": list(ucoords), "squared_base": False,
        "embedding": emb_idx, "alt_embedding": None,
        "marker": marker, "suborder": suborder,
    }
    return finish_entry(raw, expected)


def derive_table5(fid, asc, w, printed, C, B, marker):
    units, e = unit_search(asc, bound=10)
    target = complex(*printed)
    pick = None
    for _, coords, _ in units:
        u = OrderElement(MinimalPolynomial(asc), coords)
        for k in range(4):
            z = nu.embed_fast(u, e.roots_f[k])
            if abs(z - target) < 5e-4:
                pick = (coords, k)
                break
        if pick:
            break
    if pick is None:
        raise RuntimeError(f"{fid}: no unit matches printed {target}")
    coords, emb_idx = pick
    alt = 2 * (1 - emb_idx // 2)  # representative of the other pair
    raw = {
        "id": fid, "display": fid.upper().replace("X", "X").replace("x", "X"),
        "table": 5, "minpoly": list(asc), "mu": 2, "zeta": None,
        "unit": list(coords), "squared_base": True,
        "embedding": emb_idx, "alt_embedding": alt,
        "marker": marker, "suborder": False,
    }
    expected = {"w": w, "C": C, "B": B, "eps_tilde": list(printed)}
    return finish_entry(raw, expected)


def derive_zeta8():
    asc = (1, 0, 0, 0, 1)
    poly = MinimalPolynomial(asc)
    e = nu.find_roots(poly, 256)
    zc = zeta_in_basis(asc, 8, e)
    units, _ = unit_search(asc, bound=3)
    uc = units[0][1]
    w_found, ucoords, emb_idx = pick_unit_embedding(asc, uc, zc, 8)
    raw = {
        "id": "q-zeta8", "display": "Q(zeta8)", "table": 0,
        "minpoly": list(asc), "mu": 8, "alphabet_mu": 4, "zeta": list(zc),
        "unit": list(ucoords), "squared_base": False,
        "embedding": emb_idx, "alt_embedding": None,
        "marker": "none", "suborder": False,
    }
    # honest closed-cylinder count: the four printed points plus their four
    # zeta4-companions all sit exactly on the conjugate bound (borderline)
    return finish_entry(raw, {"w": 1, "C": 8, "B": 1})


def derive_biquadratic(fid, display, d, w, C, B):
    """Q(zeta3, sqrt d): base generator zeta6 + sqrt(d), then index-1 search."""
    sd = mp.sqrt(d)
    z6 = mp.expjpi(mp.mpf(1) / 3)
    theta_vals = [z6 + sd, mp.conj(z6) + sd, z6 - sd, mp.conj(z6) - sd]
    base_asc = minpoly_from_values(theta_vals)
    if base_asc is None:
        raise RuntimeError("biquadratic minpoly failed")
    gen, dK = monogenic_generator(base_asc)
    suborder = gen is None
    if not suborder:
        theta_asc = gen[0]
        e = nu.find_roots(MinimalPolynomial(theta_asc), 256)
        zc = zeta_in_basis(theta_asc, 6, e)
        units, _ = unit_search(theta_asc)
        uc = units[0][1]
    else:
        theta_asc, zc, uc, _ = suborder_generator(base_asc, 6)
    w_found, ucoords, emb_idx = pick_unit_embedding(theta_asc, uc, zc, 6)
    poly = MinimalPolynomial(theta_asc)
    e = nu.find_roots(poly, 256)
    canon, emb_idx2 = cat.canonical_associate(
        OrderElement(poly, uc), e.with_chosen(emb_idx), OrderElement(poly, zc))
    raw = {
        "id": fid, "display": display, "table": 3,
        "minpoly": list(theta_asc), "mu": 6, "zeta": list(zc),
        "unit": list(canon.coords), "squared_base": False,
        "embedding": emb_idx2, "alt_embedding": None,
        "marker": "none", "suborder": suborder,
    }
    return finish_entry(raw, {"w": w, "C": C, "B": B})


def main(selected=None):
    fields = []
    jobs = []
    for (a, b, w, C, B, marker) in Z4_FIELDS:
        fid = f"q-sqrt-{a}-{b}zeta4" if b != 1 else f"q-sqrt-{a}-zeta4"
        disp = f"Q(sqrt({a}+{b}*zeta4))" if b != 1 else f"Q(sqrt({a}+zeta4))"
        jobs.append((fid, lambda a=a, b=b, w=w, C=C, B=B, m=marker, f=fid, d=disp:
                     derive_z4_or_z3(a, b, 4, {"w": w, "C": C, "B": B}, m, f, d)))
    for (a, b, w, C, B, marker) in Z3_FIELDS:
        fid = f"q-sqrt-{a}-{b}zeta3" if b != 1 else f"q-sqrt-{a}-zeta3"
        disp = f"Q(sqrt({a}+{b}*zeta3))" if b != 1 else f"Q(sqrt({a}+zeta3))"
        jobs.append((fid, lambda a=a, b=b, w=w, C=C, B=B, m=marker, f=fid, d=disp:
                     derive_z4_or_z3(a, b, 6, {"w": w, "C": C, "B": B}, m, f, d)))
    for (fid, display, d, w, C, B) in BIQUADRATIC:
        jobs.append((fid, lambda f=fid, dd=display, d=d, w=w, C=C, B=B:
                     derive_biquadratic(f, dd, d, w, C, B)))
    for (fid, asc, w, printed, C, B, marker) in T5_FIELDS:
        jobs.append((fid, lambda f=fid, a=asc, w=w, p=printed, C=C, B=B, m=marker:
                     derive_table5(f, a, w, p, C, B, m)))
    jobs.append(("q-zeta8", derive_zeta8))

    work = Path("/tmp/catalog_work.json")
    done = {}
    if work.exists():
        done = {f["id"]: f for f in json.loads(work.read_text())}
    for fid, fn in jobs:
        if selected and fid not in selected:
            continue
        if fid in done and not selected:
            print(f"  cached {fid}")
            fields.append(done[fid])
            continue
        print(f"deriving {fid} ...", flush=True)
        raw = fn()
        fields.append(raw)
        done[fid] = raw
        work.write_text(json.dumps(list(done.values()), indent=1))
    if not selected:
        OUT.parent.mkdir(parents=True, exist_ok=True)
        OUT.write_text(json.dumps({"schema": 1, "fields": fields}, indent=1) + "\n")
        print(f"wrote {OUT} with {len(fields)} fields")


if __name__ == "__main__":
    main(set(sys.argv[1:]) or None)
