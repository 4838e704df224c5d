import json

import pytest

from pdiv import centralizer as cz
from pdiv.dieudonne import SlopeData, a_number, from_slopes, newton_slopes, twist
from pdiv.verifier import (FAIL, INCONCLUSIVE, NA, PASS, Catalog, CatalogEntry, VerificationReport,
                           VerifyOptions, auto_m_max, build_module, default_catalog, slope_types,
                           twist_matrix, verify_catalog, verify_corollaries, verify_entry,
                           verify_relative, verify_growth)

OPTS = VerifyOptions(samples=6, explog_samples=4)


def entry(cat, name):
    return next(e for e in cat.entries if e.name == name)


def ids(rep):
    return {c.id: c.verdict for c in rep.checks}


def test_slope_types_up_to_height_four():
    types = slope_types(4)
    assert len(types) == 29
    assert ((1, 1, 1),) in types and ((0, 1, 1), (1, 0, 1)) in types
    for t in types:
        assert 1 <= sum((c + d) * k for c, d, k in t) <= 4


def test_default_catalog_shape_and_json_roundtrip(tmp_path):
    cat = default_catalog(2)
    names = [e.name for e in cat.entries]
    assert len(names) == len(set(names)) == 94
    assert "slopes:2.1x1+1.2x1" in names
    assert sum(n.startswith("twist-generic:") for n in names) == 29
    assert sum(n.startswith("twist-monomial:") for n in names) == 29
    path = tmp_path / "cat.json"
    cat.dump(path)
    again = Catalog.load(path)
    assert again.to_json() == cat.to_json()
    # rebuilding an entry gives the identical module
    for e in again.entries[:10]:
        assert e.build(2).hash == entry(cat, e.name).build(2).hash
    assert len(default_catalog(3, relative=False).entries) < len(default_catalog(3).entries)


def test_twist_matrices_are_invertible_and_reproducible():
    for p in (2, 3, 5):
        for mode in ("generic", "monomial", "unipotent"):
            g = twist_matrix(p, 4, 17, mode)
            assert g == twist_matrix(p, 4, 17, mode)
            D = twist(from_slopes(p, SlopeData.of((1, 1)), 4), twist_matrix(p, 2, 17, mode))
            assert (D.c, D.d) == (1, 1)
    with pytest.raises(ValueError):
        twist_matrix(2, 2, 0, "bogus")


def test_build_module_recipes():
    D = build_module({"type": "slopes", "summands": [[1, 1, 1]]}, 3)
    assert D == from_slopes(3, SlopeData.of((1, 1)), D.m_work)
    M = build_module({"type": "matrix", "A": [[0, 2], [1, 0]]}, 2, 4)
    assert a_number(M) == 1 and newton_slopes(M) == newton_slopes(from_slopes(2, SlopeData.of((1, 1)), 3))
    S = build_module({"type": "direct_sum", "parts": [{"type": "slopes", "summands": [[1, 0, 1]]},
                                                       {"type": "slopes", "summands": [[0, 1, 1]]}]}, 2, 3)
    assert (S.r, S.c, S.d) == (2, 1, 1)
    dual = build_module({"type": "dual", "base": {"type": "slopes", "summands": [[1, 0, 1]]}}, 2, 3)
    assert (dual.c, dual.d) == (0, 1)
    P = build_module({"type": "pairing", "base": {"type": "slopes", "summands": [[1, 1, 1]]}}, 3, 4)
    assert P.r == 4


def test_auto_m_max_covers_the_plateau():
    assert auto_m_max(from_slopes(2, SlopeData.of((1, 0)), 3)) == 2
    assert auto_m_max(from_slopes(2, SlopeData.of((1, 1)), 4)) == 2
    assert auto_m_max(from_slopes(2, SlopeData.of((1, 0), (0, 1)), 4)) == 2


def test_report_verdicts():
    rep = VerificationReport("x", 2)
    rep.add("a", "ok", True)
    rep.add("b", "skipped", NA)
    assert rep.green
    rep.add("c", "unknown", INCONCLUSIVE, evidence=[(1, 2)])
    assert not rep.green
    rep.add("d", "bad", False, {"v": 1})
    assert rep.counts() == {PASS: 1, NA: 1, INCONCLUSIVE: 1, FAIL: 1}
    text = rep.to_text()
    assert text.startswith("x (p=2): RED") and "] d: bad" in text
    assert json.loads(json.dumps(rep.to_json()))["name"] == "x"


@pytest.mark.parametrize("name,gam,s_bound", [("slopes:1.1x1", (0, 1, 1), PASS),
                                          # the a_D bound only concerns non-ordinary modules
                                          ("slopes:0.1x1+1.0x1", (0, 0, 0), NA)])
def test_theorem_suite_on_small_modules(name, gam, s_bound):
    cat = default_catalog(2, twists=False, relative=False)
    e = entry(cat, name)
    rep = verify_entry(e, 2, OPTS)
    assert rep.green, rep.to_text()
    D = e.build(2)
    seq = cz.gamma_sequence(D, 2)
    assert seq.gamma == gam
    checks = ids(verify_growth(D, 2, OPTS, seq, name))
    assert checks and all(v in (PASS, NA) for v in checks.values())
    checks = ids(verify_corollaries(D, 2, OPTS, seq, name, sum_check=False))
    assert checks["n.cd_bound"] == PASS and checks["n.s_bound"] == s_bound and checks["s.slope_formula"] == PASS


def test_split_height_six_entry():
    cat = default_catalog(2, twists=False, relative=False)
    e = entry(cat, "slopes:2.1x1+1.2x1")
    assert e.expect["s_D"] == 6 and e.expect["gamma_1"] == 6
    D = e.build(2)
    seq = cz.gamma_sequence(D, 2, schedule=cz.Schedule(n_cap=24))
    assert seq.gamma == (0, 6, 6)
    checks = ids(verify_growth(D, 2, OPTS, seq, e.name))
    assert all(v in (PASS, NA) for v in checks.values())


def test_relative_entries_p3():
    cat = default_catalog(3, twists=False)
    for name in ("hom:etale|mult", "parabolic:ord+ss", "pairing:ss+dual"):
        rep = verify_entry(entry(cat, name), 3, OPTS)
        assert rep.green, rep.to_text()


def test_pairing_at_two_is_bound_only():
    cat = default_catalog(2, twists=False)
    e = entry(cat, "pairing:ss+dual")
    D = e.build(2)
    seq = cz.gamma_sequence(D, 2, strict=False)
    rep = verify_relative(D, e.lie_constraint(D.r), 2, OPTS, seq, e.name)
    checks = ids(rep)
    assert checks["rel.weak_bound"] == PASS
    for k in ("rel.concave", "rel.strict", "rel.n_bound", "rel.restriction", "rel.commute"):
        assert checks[k] == NA


def test_corrupted_entry_fails_construction():
    # supersingular A with a B that violates A sigma(B) = p I
    bad = CatalogEntry("bad", {"type": "matrix", "A": [[0, 2], [1, 0]], "B": [[1, 0], [0, 1]], "m_work": 3})
    rep = verify_entry(bad, 2, OPTS)
    assert not rep.green
    assert ids(rep) == {"construction": FAIL}
    assert "error" in rep.checks[0].values


def test_reports_are_deterministic_and_parallel_safe():
    cat = default_catalog(2, twists=False, relative=False)
    small = Catalog(2, tuple(entry(cat, n) for n in ("slopes:1.0x1", "slopes:1.1x1", "slopes:0.1x2")))
    one = [r.to_json() for r in verify_catalog(small, OPTS, jobs=1)]
    two = [r.to_json() for r in verify_catalog(small, OPTS, jobs=2)]
    assert one == two
