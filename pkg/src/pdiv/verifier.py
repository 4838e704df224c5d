"""Executable theorem checks over a catalog of Dieudonne modules.

Every check produces a record with a verdict in {"pass", "fail",
"inconclusive", "n/a"}.  A report is green only when nothing failed and
nothing was inconclusive.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import centralizer as cz
from .centralizer import FULL, LieConstraint, PointCountCache, Schedule
from .dieudonne import (DieudonneModule, SlopeData, a_number, as_matrix, direct_sum, dual,
                        from_matrix, from_slopes, newton_slopes, s_height, slope_data, twist)
from .errors import ExtractionError, HypothesisError, InconclusiveError, PdivError
from .explog import (SigmaDomain, block_upper_triangular, conjugation_equivariance_check,
                     endo_preservation_check, exp_sigma, log_sigma, random_invertible, sigma_member)
from .galois_ring import gr_ctx

PASS, FAIL, INCONCLUSIVE, NA = "pass", "fail", "inconclusive", "n/a"


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    id: str
    statement: str
    verdict: str
    values: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    name: str
    p: int
    checks: list[Check] = field(default_factory=list)

    def add(self, cid, statement, ok, values=None, evidence=None):
        verdict = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        self.checks.append(Check(cid, statement, verdict, values or {}, evidence or {}))
        return verdict

    def extend(self, other: "VerificationReport"):
        self.checks.extend(other.checks)
        return self

    @property
    def green(self) -> bool:
        return all(c.verdict in (PASS, NA) for c in self.checks)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, NA: 0}
        for c in self.checks:
            out[c.verdict] += 1
        return out

    def to_json(self) -> dict:
        return {"name": self.name, "p": self.p, "green": self.green,
                "checks": [asdict(c) for c in self.checks]}

    def to_text(self) -> str:
        lines = [f"{self.name} (p={self.p}): {'GREEN' if self.green else 'RED'}"]
        for c in self.checks:
            lines.append(f"  [{c.verdict:>12}] {c.id}: {c.statement}")
            if c.verdict in (FAIL, INCONCLUSIVE):
                lines.append(f"                 values={json.dumps(c.values, default=str)}")
        return "\n".join(lines)


@dataclass(frozen=True)
class VerifyOptions:
    schedule: Schedule = cz.DEFAULT_SCHEDULE
    cache: PointCountCache | None = field(default=None, compare=False)
    seed: int = 0
    samples: int = 12
    explog_samples: int = 8


# ---------------------------------------------------------------------------
# catalog


def _stable_seed(*parts) -> int:
    text = ":".join(str(x) for x in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def twist_matrix(p: int, r: int, seed: int, mode: str) -> list[list[int]]:
    """Seeded invertible integer matrix.

    generic: uniform in GL_r(F_p), lifted with entries in [0, p);
    monomial: a permutation matrix plus p times a random matrix.
    """
    rng = random.Random(seed)
    ctx = gr_ctx(p, 1, 1)
    while True:
        if mode == "generic":
            g = [[rng.randrange(p) for _ in range(r)] for _ in range(r)]
        elif mode == "monomial":
            perm = list(range(r))
            rng.shuffle(perm)
            g = [[int(perm[i] == j) + p * rng.randrange(p) for j in range(r)] for i in range(r)]
        elif mode == "unipotent":
            g = [[int(i == j) + p * rng.randrange(p) for j in range(r)] for i in range(r)]
        else:
            raise ValueError(f"unknown twist mode {mode!r}")
        if ctx.det(ctx.scalar_matrix(g))[0] % p:
            return g


def construction_cd(cons: dict) -> tuple[int, int]:
    """(c, d) of a construction without building it."""
    kind = cons["type"]
    if kind == "slopes":
        sd = SlopeData(tuple(tuple(s) for s in _summands(cons)))
        return sd.c, sd.d
    if kind == "twist":
        return construction_cd(cons["base"])
    if kind == "dual":
        c, d = construction_cd(cons["base"])
        return d, c
    if kind in ("direct_sum", "pairing"):
        parts = cons["parts"] if kind == "direct_sum" else [cons["base"], {"type": "dual", "base": cons["base"]}]
        cs = [construction_cd(x) for x in parts]
        return sum(c for c, _ in cs), sum(d for _, d in cs)
    if kind == "matrix":
        D = build_module(cons, cons.get("p", 2))
        return D.c, D.d
    raise ValueError(f"unknown construction type {kind!r}")


def _summands(cons):
    return [(int(s[0]), int(s[1]), int(s[2]) if len(s) > 2 else 1) for s in cons["summands"]]


def build_module(cons: dict, p: int, m_work: int | None = None) -> DieudonneModule:
    kind = cons["type"]
    if kind == "slopes":
        sd = SlopeData(tuple(_summands(cons)))
        return from_slopes(p, sd, m_work or cons.get("m_work") or sd.d + 1)
    if kind == "matrix":
        m = int(cons.get("m_work") or m_work)
        return from_matrix(p, int(cons.get("e", 1)), cons["A"], m, cons.get("B"))
    if kind == "twist":
        base = build_module(cons["base"], p, m_work)
        if "g" in cons:
            g = cons["g"]
        else:
            g = twist_matrix(p, base.r, int(cons["seed"]), cons.get("mode", "generic"))
        return twist(base, g)
    if kind == "direct_sum":
        parts = [build_module(x, p, m_work) for x in cons["parts"]]
        out = parts[0]
        for x in parts[1:]:
            out = direct_sum(out, x)
        return out
    if kind == "dual":
        return dual(build_module(cons["base"], p, m_work))
    if kind == "pairing":
        base = build_module(cons["base"], p, m_work)
        return direct_sum(base, dual(base))
    raise ValueError(f"unknown construction type {kind!r}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    construction: dict
    m_max: int | None = None
    constraint: dict | None = None
    expect: dict | None = None

    def lie_constraint(self, r: int | None = None) -> LieConstraint:
        if self.construction["type"] == "pairing" and self.constraint is None:
            if r is None:
                raise ValueError("height needed for the default pairing")
            return LieConstraint.hyperbolic(r // 2)
        return LieConstraint.from_json(self.constraint)

    def default_m_work(self) -> int:
        if "m_work" in self.construction:
            return int(self.construction["m_work"])
        c, d = construction_cd(self.construction)
        return max(c * d + 3, max(c, d) + 2, (self.m_max or 0) + 1)

    def build(self, p: int, m_work: int | None = None) -> DieudonneModule:
        if "m_work" in self.construction:
            m_work = None
        return build_module(self.construction, p, max(self.default_m_work(), m_work or 0))

    def to_json(self) -> dict:
        out = {"name": self.name, "construction": self.construction}
        if self.m_max is not None:
            out["m_max"] = self.m_max
        if self.constraint is not None:
            out["constraint"] = self.constraint
        if self.expect is not None:
            out["expect"] = self.expect
        return out

    @classmethod
    def from_json(cls, obj) -> "CatalogEntry":
        return cls(obj["name"], obj["construction"], obj.get("m_max"), obj.get("constraint"), obj.get("expect"))


@dataclass(frozen=True)
class Catalog:
    p: int
    entries: tuple[CatalogEntry, ...]

    def to_json(self) -> dict:
        return {"p": self.p, "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "Catalog":
        return cls(int(obj["p"]), tuple(CatalogEntry.from_json(e) for e in obj["entries"]))

    @classmethod
    def load(cls, path) -> "Catalog":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


def simple_summands(rmax: int) -> list[tuple[int, int]]:
    return [(c, r - c) for r in range(1, rmax + 1) for c in range(r + 1) if math.gcd(c, r - c) == 1]


def slope_types(rmax: int) -> list[tuple[tuple[int, int, int], ...]]:
    """All isogeny types of height <= rmax as grouped summand lists."""
    simple = simple_summands(rmax)
    out = []

    def rec(rem, start, acc):
        if acc:
            grouped: dict[tuple[int, int], int] = {}
            for s in acc:
                grouped[s] = grouped.get(s, 0) + 1
            out.append(tuple((c, d, k) for (c, d), k in grouped.items()))
        for k in range(start, len(simple)):
            c, d = simple[k]
            if c + d <= rem:
                rec(rem - c - d, k, acc + [(c, d)])

    rec(rmax, 0, [])
    return sorted(out, key=lambda t: (sum((c + d) * k for c, d, k in t), t))


def _slope_label(summands) -> str:
    return "+".join(f"{c}.{d}x{k}" for c, d, k in summands)


def _slopes_cons(*summands):
    return {"type": "slopes", "summands": [list(s) for s in summands]}


SS = (1, 1, 1)
ETALE = (1, 0, 1)
MULT = (0, 1, 1)


def default_catalog(p: int, seed: int = 0, rmax: int = 4, twists: bool = True,
                    relative: bool = True) -> Catalog:
    entries = []
    types = slope_types(rmax)
    for t in types:
        sd = SlopeData(t)
        label = _slope_label(t)
        expect = {"slopes": [str(x) for x in sd.slopes()], "s_D": s_height(sd)}
        entries.append(CatalogEntry(f"slopes:{label}", _slopes_cons(*t), expect=expect))
    entries.append(CatalogEntry("slopes:2.1x1+1.2x1", _slopes_cons((2, 1, 1), (1, 2, 1)),
                                expect={"s_D": 6, "gamma_1": 6}))
    if twists:
        for t in types:
            label = _slope_label(t)
            for mode in ("generic", "monomial"):
                cons = {"type": "twist", "base": _slopes_cons(*t), "mode": mode,
                        "seed": _stable_seed(seed, p, label, mode) % (1 << 31)}
                entries.append(CatalogEntry(f"twist-{mode}:{label}", cons))
    if relative:
        ss = _slopes_cons(SS)
        entries += [
            CatalogEntry("hom:ss|ss", {"type": "direct_sum", "parts": [ss, ss]},
                         constraint={"kind": "hom", "r1": 2, "r2": 2}),
            CatalogEntry("hom:etale|mult", {"type": "direct_sum",
                                            "parts": [_slopes_cons(ETALE), _slopes_cons(MULT)]},
                         constraint={"kind": "hom", "r1": 1, "r2": 1}),
            CatalogEntry("hom:2.1|ss", {"type": "direct_sum", "parts": [_slopes_cons((2, 1, 1)), ss]},
                         constraint={"kind": "hom", "r1": 3, "r2": 2}),
            CatalogEntry("parabolic:ord+ss", _slopes_cons(ETALE, MULT, SS),
                         constraint={"kind": "parabolic", "filtration": [2]}),
            CatalogEntry("parabolic:ord+ss-extension",
                         {"type": "twist", "base": _slopes_cons(ETALE, MULT, SS),
                          "g": [[1, 0, 1, 1], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]]},
                         constraint={"kind": "parabolic", "filtration": [2]}),
            CatalogEntry("pairing:ss+dual", {"type": "pairing", "base": ss},
                         constraint={"kind": "pairing", "half": 2, "alternating": True}),
        ]
    return Catalog(p, tuple(entries))


# ---------------------------------------------------------------------------
# helpers


def auto_m_max(D: DieudonneModule, slopes: SlopeData | None = None) -> int:
    """Smallest level range that can exhibit the plateau if n_D <= s_D + 1 - a_D^2."""
    if D.c * D.d == 0:
        return 2
    sd = slopes or slope_data(D)
    a = a_number(D)
    bound = 1 if a == 0 else s_height(sd) + 1 - a * a
    return min(max(2, bound + 1), D.m_work)


def _safe(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs), None
    except (ExtractionError, InconclusiveError) as exc:
        return None, exc


def _evidence(exc):
    return {"error": str(exc), "evidence": getattr(exc, "evidence", [])}


def _nilpotent(res, X, r) -> bool:
    P = X
    for _ in range(r - 1):
        P = res.matmul(P, X)
    return not np.any(P)


def _matrix_order(ctx, b, cap: int) -> int | None:
    """Smallest k with b^(p^k) = I, or None if k > cap."""
    I = ctx.identity(b.shape[0])
    x = b
    for k in range(cap + 1):
        if np.array_equal(x, I):
            return k
        y = x
        for _ in range(ctx.p - 1):
            y = ctx.matmul(y, x)
        x = y
    return None


# ---------------------------------------------------------------------------
# full-context checks


def verify_growth(D: DieudonneModule, m_max: int, options: VerifyOptions | None = None,
                       seq: cz.CentralizingSequence | None = None, name: str = "") -> VerificationReport:
    options = options or VerifyOptions()
    rep = VerificationReport(name, D.p)
    if seq is None:
        seq, exc = _safe(cz.gamma_sequence, D, m_max, FULL, options.schedule, options.cache, strict=False)
        if seq is None:
            for cid in ("growth.concave", "growth.strict", "growth.plateau"):
                rep.add(cid, "centralizing sequence", INCONCLUSIVE, evidence=_evidence(exc))
            return rep
    g = seq.gamma
    vals = {"gamma": list(g), "n_D": seq.n_D}
    # (a): gamma(i+l) - gamma(i) is a decreasing sequence of naturals in i
    bad = []
    for l in range(1, len(g)):
        diffs = [g[i + l] - g[i] for i in range(len(g) - l)]
        if any(x < 0 for x in diffs) or any(diffs[i + 1] > diffs[i] for i in range(len(diffs) - 1)):
            bad.append(l)
    rep.add("growth.concave", "gamma(i+l) - gamma(i) is non-negative and non-increasing in i", not bad,
            dict(vals, bad_l=bad))
    cd = D.c * D.d
    if cd == 0:
        rep.add("growth.strict", "a_D^2 <= gamma(1) < ... < gamma(n_D) (needs cd > 0)", NA, vals)
        ok = all(x == 0 for x in g)
        rep.add("growth.plateau", "gamma constant from n_D = 0 (cd = 0)", ok, vals)
        return rep
    a = a_number(D)
    vals["a_D"] = a
    if seq.n_D is None:
        rep.add("growth.strict", "a_D^2 <= gamma(1) < ... < gamma(n_D)", INCONCLUSIVE, vals)
        rep.add("growth.plateau", "gamma(i) = gamma(n_D) <= cd for i >= n_D", INCONCLUSIVE, vals)
        return rep
    n = seq.n_D
    strict = all(g[i] < g[i + 1] for i in range(1, n))
    rep.add("growth.strict", "a_D^2 <= gamma(1) < ... < gamma(n_D)", a * a <= g[1] and strict, vals)
    const = all(g[i] == g[n] for i in range(n, len(g)))
    rep.add("growth.plateau", "gamma(i) = gamma(n_D) <= cd for i >= n_D", const and g[n] <= cd, dict(vals, cd=cd))
    return rep


def _restriction_checks(rep, D, seq, n_value, constraint, options, tag, statement):
    """Image of End(D[p^l]) -> End(D[p^i]): dimension and finiteness."""
    g = seq.gamma
    rows = []
    ok = True
    for l in range(2, len(g)):
        for i in range(1, l):
            gv, exc = _safe(cz.restriction_growth, D, l, i, constraint, options.schedule)
            if gv is None:
                rep.add(tag, statement, INCONCLUSIVE, {"l": l, "i": i}, _evidence(exc))
                return None
            expected = g[l] - g[l - i]
            finite = gv.value == 0
            row = {"l": l, "i": i, "dim": gv.value, "expected": expected, "finite": finite}
            good = gv.value == expected
            if n_value is not None:
                lo, hi = n_value if isinstance(n_value, tuple) else (n_value, n_value)
                # finite iff l - i >= n; with n only bracketed, test what is decided
                if l - i >= hi:
                    good = good and finite
                elif l - i < lo:
                    good = good and not finite
            # exactness: |image| = |level l| / |level l - i| at one degree
            N = gv.evidence[0][0]
            direct = gv.evidence[0][1]
            f_l = cz.end_log_size(D, l, N, constraint, cache=options.cache)
            f_li = cz.end_log_size(D, l - i, N, constraint, cache=options.cache)
            row["exact"] = direct == f_l - f_li
            good = good and row["exact"]
            rows.append(row)
            ok = ok and good
    rep.add(tag, statement, ok, {"pairs": rows})
    return rows


def _nilpotent_part(ctx, x, r: int):
    """x - x^(p^K) with K a multiple of n * lcm(1..r) and p^K >= r.

    Over the residue field x^(p^K) is the semisimple part of x, so the
    difference reduces to the nilpotent part; it is a polynomial in x and
    therefore stays in any ring of endomorphisms containing x.
    """
    K = ctx.n * math.lcm(*range(1, r + 1))
    while ctx.p ** K < r:
        K *= 2
    y = x
    for _ in range(K):
        z = y
        for _ in range(ctx.p - 1):
            z = ctx.matmul(z, y)
        y = z
    return ((x.astype(object) - y.astype(object)) % ctx.q).astype(ctx.dtype)


def _unipotent_samples(D, level, i, constraint, options, want_nonzero=True):
    """Elements b = I + p^(i - level) e over GR(p^i, N), e a level solution with e mod p nilpotent."""
    found = []
    for mult in (2, 3, 4):
        N = mult * D.e
        es = cz.solution_samples(D, level, N, options.samples, options.seed, constraint)
        lctx = gr_ctx(D.p, level, N)
        if constraint.stable_under_products():
            es = es + [_nilpotent_part(lctx, e, D.r) for e in es]
        res = gr_ctx(D.p, 1, N)
        ctx = gr_ctx(D.p, i, N)
        s = i - level
        found = []
        for e in es:
            ebar = (e % D.p).astype(res.dtype)
            if not _nilpotent(res, ebar, D.r):
                continue
            if want_nonzero and not np.any(ebar):
                continue
            b = (ctx.identity(D.r) + (D.p ** s) * e.astype(object)) % ctx.q
            found.append((b.astype(ctx.dtype), e))
        if found:
            return ctx, found
    return None, found


def verify_corollaries(D: DieudonneModule, m_max: int, options: VerifyOptions | None = None,
                       seq: cz.CentralizingSequence | None = None, name: str = "",
                       sum_check: bool = True) -> VerificationReport:
    options = options or VerifyOptions()
    rep = VerificationReport(name, D.p)
    if seq is None:
        seq, exc = _safe(cz.gamma_sequence, D, m_max, FULL, options.schedule, options.cache, strict=False)
        if seq is None:
            rep.add("corollaries", "centralizing sequence", INCONCLUSIVE, evidence=_evidence(exc))
            return rep
    g, n = seq.gamma, seq.n_D
    cd = D.c * D.d
    a = a_number(D)
    sd = slope_data(D)
    s_D = s_height(sd)
    vals = {"gamma": list(g), "n_D": n, "a_D": a, "cd": cd, "s_D": s_D}

    # duality
    Dt = dual(D)
    a_t = a_number(Dt)
    rep.add("a_dual", "a_D = a_{D^t}", a == a_t, {"a_D": a, "a_dual": a_t})
    slopes_t = newton_slopes(Dt)
    rep.add("dual_slopes", "slopes of D^t are 1 - slopes of D",
            sorted(1 - x for x in newton_slopes(D)) == slopes_t,
            {"slopes": [str(x) for x in newton_slopes(D)], "dual": [str(x) for x in slopes_t]})
    rep.add("slope_sum", "sum of Newton slopes = d", sum(sd.slopes()) == D.d, {"d": D.d})

    if n is None:
        for cid in ("n.cd_bound", "n.s_bound", "s.slope_formula", "n.sigma_bound", "restriction.image", "restriction.last", "n.direct_sum", "aut.exponent", "aut.commute"):
            rep.add(cid, "needs n_D", INCONCLUSIVE, vals)
        return rep
    ordinary = a == 0
    s_obs = g[n]
    rep.add("s.slope_formula", "gamma(n_D) = cd - (1/2) sum |c_s d_t - c_t d_s|", s_obs == s_D, vals)
    ok = n <= cd and (ordinary or n <= cd + 1 - a * a <= cd)
    rep.add("n.cd_bound", "n_D <= cd; non-ordinary: n_D <= cd + 1 - a_D^2 <= cd", ok, vals)
    if ordinary:
        rep.add("n.s_bound", "n_D <= s_D + 1 - a_D^2 <= s_D (non-ordinary only)", NA, vals)
        rep.add("n.sigma_bound", "n_D <= 1 + cd - a_D^2 - sigma <= cd - sigma (non-ordinary only)", NA, vals)
    else:
        rep.add("n.s_bound", "n_D <= s_D + 1 - a_D^2 <= s_D", n <= s_obs + 1 - a * a <= s_obs, vals)
        sigma_term = cd - s_D
        rep.add("n.sigma_bound", "n_D <= 1 + cd - a_D^2 - sigma <= cd - sigma",
                n <= 1 + cd - a * a - sigma_term <= cd - sigma_term, dict(vals, sigma=sigma_term))

    rows = _restriction_checks(rep, D, seq, n, FULL, options, "restriction.image",
                               "image of End(D[p^l]) -> End(D[p^i]) has dim gamma(l) - gamma(l-i), finite iff l-i >= n_D")
    if ordinary or cd == 0:
        rep.add("restriction.last", "greatest n with positive-dimensional image to level 1 is n_D (non-ordinary)", NA)
    elif rows is None or n + 1 >= len(g):
        rep.add("restriction.last", "greatest n with positive-dimensional image to level 1 is n_D", INCONCLUSIVE, vals)
    else:
        dims = {row["l"]: row["dim"] for row in rows if row["i"] == 1}
        positive = [l for l, dim in dims.items() if dim > 0]
        # level n itself maps onto a positive-dimensional image when gamma(1) > 0
        greatest = max(positive + ([1] if g[1] > 0 else []))
        rep.add("restriction.last", "greatest n with positive-dimensional image to level 1 is n_D",
                greatest == n, dict(vals, dims=dims))

    if sum_check:
        DD = direct_sum(D, D)
        top = min(len(g) - 1, n + 1) if cd else 2
        seq2, exc = _safe(cz.gamma_sequence, DD, max(top, 2), FULL, options.schedule, options.cache, strict=False)
        if seq2 is None:
            rep.add("n.direct_sum", "n_{D+D} = n_D", INCONCLUSIVE, evidence=_evidence(exc))
        else:
            rep.add("n.direct_sum", "n_{D+D} = n_D", seq2.n_D == n,
                    {"n_D": n, "n_DD": seq2.n_D, "gamma_DD": list(seq2.gamma)})

    _aut_checks(rep, D, n, ordinary or cd == 0, options, vals)
    _charpoly_check(rep, D, options)
    return rep


def _aut_checks(rep, D, n, trivial, options, vals):
    if trivial:
        rep.add("aut.exponent", "exponent of sampled identity-component points is p^{n_D} (non-ordinary)", NA)
        rep.add("aut.commute", "sampled identity-component points commute for i >= 2 n_D (non-ordinary)", NA)
        return
    i = n + 1
    if i > D.m_work:
        rep.add("aut.exponent", "exponent p^{n_D}", NA, {"reason": "level above working precision"})
    else:
        ctx, found = _unipotent_samples(D, n, i, FULL, options)
        if ctx is None:
            rep.add("aut.exponent", "exponent of sampled points b = I + p^{i-n_D} e is p^{n_D}", INCONCLUSIVE,
                    dict(vals, reason="no nonzero nilpotent samples"))
        else:
            orders = [_matrix_order(ctx, b, n + 2) for b, _ in found]
            ok = all(k is not None and k <= n for k in orders) and max(orders) == n
            rep.add("aut.exponent", "exponent of sampled points b = I + p^{i-n_D} e is p^{n_D} (partial)", ok,
                    dict(vals, level=i, orders=orders))
    i = max(2 * n, n + 1)
    if i > D.m_work:
        rep.add("aut.commute", "sampled points commute for i >= 2 n_D", NA, {"reason": "level above working precision"})
        return
    ctx, found = _unipotent_samples(D, n, i, FULL, options, want_nonzero=False)
    if ctx is None:
        rep.add("aut.commute", "sampled points commute for i >= 2 n_D", INCONCLUSIVE, vals)
        return
    bs = [b for b, _ in found]
    ok = all(np.array_equal(ctx.matmul(x, y), ctx.matmul(y, x)) for x in bs for y in bs)
    rep.add("aut.commute", "sampled points b = I + p^{i-n_D} e commute for i >= 2 n_D (partial)", ok,
            {"level": i, "samples": len(bs)})


def _charpoly_check(rep, D, options):
    """Mod-p endomorphisms: char poly over F_p; nilpotent char poly means nilpotent."""
    N = 3 * D.e
    es = cz.solution_samples(D, 1, N, options.samples, options.seed + 1)
    ctx = gr_ctx(D.p, 1, N)
    rational = True
    nilpotent_ok = True
    n_nil = 0
    for e in es:
        cp = ctx.charpoly(e)
        if not np.array_equal(ctx.frob(cp), cp):
            rational = False
        if not np.any(cp[1:]):
            n_nil += 1
            if not _nilpotent(ctx, e, D.r):
                nilpotent_ok = False
    rep.add("end.charpoly", "char poly of every mod-p endomorphism has F_p coefficients; T^r forces nilpotence",
            rational and nilpotent_ok, {"samples": len(es), "nilpotent_charpoly": n_nil, "N": N})


# ---------------------------------------------------------------------------
# relative contexts


def verify_relative(D: DieudonneModule, constraint: LieConstraint, m_max: int,
                    options: VerifyOptions | None = None, full_seq: cz.CentralizingSequence | None = None,
                    name: str = "") -> VerificationReport:
    options = options or VerifyOptions()
    rep = VerificationReport(name, D.p)
    try:
        cz.check_compatible(D, constraint)
    except HypothesisError as exc:
        rep.add("rel.context", f"module compatible with the {constraint.kind} context", FAIL, {"error": str(exc)})
        return rep
    rep.add("rel.context", f"module compatible with the {constraint.kind} context", PASS)
    if full_seq is None:
        full_seq, exc = _safe(cz.gamma_sequence, D, m_max, FULL, options.schedule, options.cache, strict=False)
        if full_seq is None:
            rep.add("rel.full", "full centralizing sequence", INCONCLUSIVE, evidence=_evidence(exc))
            return rep
    n_D = full_seq.n_D
    top = max(m_max, (n_D or 0) + 2)
    top = min(top, D.m_work)
    seq, exc = _safe(cz.relative_suite, D, constraint, top, options.schedule, options.cache)
    if seq is None:
        rep.add("rel.sequence", "relative sequence", INCONCLUSIVE, evidence=_evidence(exc))
        return rep
    g = seq.gamma
    vals = {"gamma_g": list(g), "n_D": n_D, "n_bounds": seq.n_bounds, "note": seq.note}
    full_top = full_seq.gamma
    rep.add("rel.sub", "gamma^g(l) <= gamma(l)", all(g[l] <= full_top[l] for l in range(min(len(g), len(full_top)))),
            dict(vals, gamma=list(full_top)))
    rep.add("rel.increasing", "gamma^g is increasing", all(g[i] <= g[i + 1] for i in range(len(g) - 1)), vals)
    if n_D is None:
        rep.add("rel.stable", "gamma^g(l+1) = gamma^g(l) for l >= n_D", INCONCLUSIVE, vals)
    else:
        rep.add("rel.stable", "gamma^g(l+1) = gamma^g(l) for l >= n_D",
                all(g[l + 1] == g[l] for l in range(n_D, len(g) - 1)), vals)
    applies, reason = cz.plateau_rule_applies(D, constraint)
    vals["hypotheses"] = reason
    if not applies:
        for cid in ("rel.concave", "rel.strict", "rel.n_bound", "rel.restriction", "rel.commute"):
            rep.add(cid, f"needs the product or Cayley hypotheses ({reason})", NA, vals)
        if n_D is None:
            rep.add("rel.weak_bound", "n^G <= n_D + 1 (gamma^g constant from n_D + 1)", INCONCLUSIVE, vals)
        else:
            ok = all(g[l] == g[n_D + 1] for l in range(n_D + 1, len(g)))
            rep.add("rel.weak_bound", "n^G <= n_D + 1 (gamma^g constant from n_D + 1; bound only)", ok, vals)
        return rep
    inc = [g[i + 1] - g[i] for i in range(len(g) - 1)]
    rep.add("rel.concave", "gamma^G(i+1) - gamma^G(i) is non-increasing", all(inc[i + 1] <= inc[i] for i in range(len(inc) - 1)),
            vals)
    if seq.n_bounds is None:
        for cid in ("rel.strict", "rel.n_bound", "rel.restriction", "rel.commute"):
            rep.add(cid, "needs n^G", INCONCLUSIVE, vals)
        return rep
    lo, hi = seq.n_bounds
    strict = all(g[i] < g[i + 1] for i in range(1, lo))
    const = all(g[i] == g[hi] for i in range(hi, len(g)))
    rep.add("rel.strict", "gamma^G(1) < ... < gamma^G(n^G), constant afterwards", strict and const, vals)
    rep.add("rel.n_bound", "n^G <= n_D", n_D is not None and hi <= n_D, vals)
    _restriction_checks(rep, D, seq, (lo, hi), constraint, options, "rel.restriction",
                        "image of End^g(D[p^l]) -> End^g(D[p^i]) has dim gamma^g(l) - gamma^g(l-i), finite iff l-i >= n^G")
    nG = max(hi, 1)
    i = 2 * nG
    if i > D.m_work:
        rep.add("rel.commute", "sampled G-points commute for i >= 2 n^G", NA)
        return rep
    ctx, found = _unipotent_samples(D, nG, i, constraint, options, want_nonzero=False)
    if ctx is None:
        rep.add("rel.commute", "sampled G-points commute for i >= 2 n^G", INCONCLUSIVE, vals)
        return rep
    bs = [b for b, _ in found]
    ok = all(np.array_equal(ctx.matmul(x, y), ctx.matmul(y, x)) for x in bs for y in bs)
    rep.add("rel.commute", "sampled points b = I + p^{i-n^G} e, e in g, commute for i >= 2 n^G (partial)", ok,
            {"level": i, "samples": len(bs)})
    return rep


# ---------------------------------------------------------------------------
# exponential and logarithm


def explog_domains(p: int, r: int) -> list[SigmaDomain]:
    doms = [SigmaDomain.OneT(1), SigmaDomain.OneT(r)]
    if p > 2:
        doms += [SigmaDomain.S(s) for s in range(1, (p - 1) // 2 + 1)]
    return doms


def verify_explog(D: DieudonneModule, m_max: int, options: VerifyOptions | None = None, name: str = "",
                  constraint: LieConstraint = FULL) -> VerificationReport:
    options = options or VerifyOptions()
    rep = VerificationReport(name, D.p)
    m = max(1, min(m_max, D.m_work, 3))
    N = 2 * D.e
    ctx = gr_ctx(D.p, m, N)
    rng = random.Random(_stable_seed(options.seed, D.hash, "explog"))
    es = cz.solution_samples(D, m, N, options.explog_samples, options.seed + 2, constraint)
    roundtrip = equivariant = preserved = True
    tested = 0
    steps = constraint.filtration if constraint.kind == "parabolic" else ()
    graph_ok = True
    zero = ctx.zeros((D.r, D.r))
    rep.add("explog.zero", "exp(0) = I and log(I) = 0",
            all(np.array_equal(exp_sigma(ctx, zero, dom), ctx.identity(D.r))
                and np.array_equal(log_sigma(ctx, ctx.identity(D.r), dom), zero)
                for dom in explog_domains(D.p, D.r)))
    for e in es:
        for dom in explog_domains(D.p, D.r):
            # push the sample into the domain: multiply by p until it lands there
            X = e.astype(object)
            for _ in range(3):
                if sigma_member(ctx, X, dom):
                    break
                X = (D.p * X) % ctx.q
            X = X.astype(ctx.dtype)
            if not sigma_member(ctx, X, dom):
                continue
            tested += 1
            Y = exp_sigma(ctx, X, dom)
            L = log_sigma(ctx, Y, dom)
            roundtrip &= bool(np.array_equal(L, X))
            roundtrip &= bool(np.array_equal(exp_sigma(ctx, log_sigma(ctx, (ctx.identity(D.r) + X) % ctx.q, dom), dom),
                                             (ctx.identity(D.r) + X) % ctx.q))
            preserved &= endo_preservation_check(D, m, X, dom)
            g = random_invertible(ctx, D.r, rng)
            equivariant &= conjugation_equivariance_check(ctx, X, g, dom)
            if steps:
                graph_ok &= block_upper_triangular(Y - ctx.identity(D.r), steps) and block_upper_triangular(
                    log_sigma(ctx, (ctx.identity(D.r) + X) % ctx.q, dom), steps)
    vals = {"level": m, "N": N, "tested": tested}
    rep.add("explog.roundtrip", "log(exp X) = X and exp(log(I+X)) = I+X on kernel samples", roundtrip, vals)
    rep.add("explog.endo", "exp and log of endomorphisms are endomorphisms", preserved, vals)
    rep.add("explog.conj", "exp and log commute with conjugation", equivariant, vals)
    if steps:
        rep.add("explog.filtration", "exp and log preserve the filtration", graph_ok, vals)
    return rep


# ---------------------------------------------------------------------------
# entries and catalogs


def _route_check(rep, D, constraint, options):
    if not D.is_defined_over_prime_ring():
        rep.add("routes", "normal-basis and power-basis counts agree", NA, {"reason": "module not over Z_p"})
        return
    pts = [(1, 1), (1, 2), (2, 2)] if D.r <= 4 else [(1, 2)]
    rows = []
    for m, N in pts:
        if m > D.m_work:
            continue
        a = cz.end_log_size(D, m, N, constraint, route="normal")
        b = cz.end_log_size(D, m, N, constraint, route="power")
        rows.append({"m": m, "N": N, "normal": a, "power": b})
    rep.add("routes", "normal-basis and power-basis counts agree", all(r["normal"] == r["power"] for r in rows),
            {"rows": rows})


def verify_entry(entry: CatalogEntry, p: int, options: VerifyOptions | None = None,
                 sum_check: bool | None = None) -> VerificationReport:
    options = options or VerifyOptions()
    rep = VerificationReport(entry.name, p)
    try:
        D = entry.build(p)
    except PdivError as exc:
        rep.add("construction", "entry builds a Dieudonne module", FAIL, {"error": str(exc)})
        return rep
    rep.add("construction", "entry builds a Dieudonne module", PASS,
            {"r": D.r, "c": D.c, "d": D.d, "e": D.e, "m_work": D.m_work, "hash": D.hash[:16]})
    sd = slope_data(D)
    constraint = entry.lie_constraint(D.r)
    m_max = entry.m_max or auto_m_max(D, sd)
    _check_expect(rep, entry, D, sd)
    _route_check(rep, D, constraint if constraint.kind != "full" else FULL, options)
    seq, exc = _safe(cz.gamma_sequence, D, m_max, FULL, options.schedule, options.cache, strict=False)
    if seq is None:
        rep.add("gamma", "centralizing sequence extracted", INCONCLUSIVE, evidence=_evidence(exc))
        return rep
    if "gamma_1" in (entry.expect or {}):
        rep.add("expect.gamma_1", "gamma(1) matches the expected value", seq.gamma[1] == entry.expect["gamma_1"],
                {"gamma": list(seq.gamma)})
    if constraint.kind == "full":
        rep.extend(verify_growth(D, m_max, options, seq, entry.name))
        if sum_check is None:
            sum_check = D.r <= 4
        rep.extend(verify_corollaries(D, m_max, options, seq, entry.name, sum_check=sum_check))
    else:
        rep.extend(verify_relative(D, constraint, m_max, options, seq, entry.name))
    rep.extend(verify_explog(D, m_max, options, entry.name, constraint))
    return rep


def _check_expect(rep, entry, D, sd):
    exp = entry.expect or {}
    if "slopes" in exp:
        got = [str(x) for x in sd.slopes()]
        rep.add("expect.slopes", "Newton slopes match the construction", got == list(exp["slopes"]),
                {"got": got, "expected": exp["slopes"]})
    if "a_D" in exp:
        rep.add("expect.a_D", "a-number matches", a_number(D) == exp["a_D"], {"got": a_number(D)})
    if "s_D" in exp:
        rep.add("expect.s_D", "slope formula value matches", s_height(sd) == exp["s_D"], {"got": s_height(sd)})


def _verify_job(args):
    entry, p, options = args
    return verify_entry(entry, p, options)


def verify_catalog(catalog: Catalog, options: VerifyOptions | None = None, jobs: int = 1) -> list[VerificationReport]:
    options = options or VerifyOptions()
    jobs_args = [(e, catalog.p, options) for e in catalog.entries]
    if jobs > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(jobs) as pool:
            return pool.map(_verify_job, jobs_args, chunksize=1)
    return [_verify_job(a) for a in jobs_args]
