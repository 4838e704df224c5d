import json
import subprocess
import sys

import pytest

from pdiv.cli import main, parse_slope_label, run, sweep_header
from pdiv.dieudonne import SlopeData
from pdiv.verifier import Catalog, CatalogEntry, default_catalog


def write_catalog(path, p, entries):
    Catalog(p, tuple(entries)).dump(path)
    return str(path)


def slopes(name, *summands, **kw):
    return CatalogEntry(name, {"type": "slopes", "summands": [list(s) for s in summands]}, **kw)


def test_parse_slope_label():
    assert parse_slope_label("1.1x2+0.1x1").slopes() == SlopeData.of((1, 1), (1, 1), (0, 1)).slopes()
    assert parse_slope_label("1.1x2+0.1x1").summands == ((1, 1, 2), (0, 1, 1))
    assert parse_slope_label("2.1") == SlopeData.of((2, 1))


@pytest.mark.parametrize("label,a,slopes_,j,s", [
    ("1.1x1", 1, ["1/2", "1/2"], 1, 1),
    ("0.1x1+1.0x1", 0, ["0", "1"], 1, 0),
    ("1.0x1", 0, ["0"], 0, 0),
])
def test_invariants(label, a, slopes_, j, s):
    code, out = run(["invariants", label, "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert (rep["a"], rep["slopes"], rep["j"], rep["s_D"]) == (a, slopes_, j, s)
    assert rep["m_work"] >= 1
    code, out = run(["invariants", label])
    assert code == 0 and "s_D" in out


def test_invariants_reports_construction_errors(capsys):
    assert main(["invariants", "2.2x1"]) == 2
    assert "ConstructionError" in capsys.readouterr().err


def test_gamma_supersingular_and_ordinary():
    code, out = run(["gamma", "1.1x1", "--m-max", "3", "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["gamma"] == [0, 1, 1, 1] and rep["n"] == 1
    # evidence: (N, log size) pairs for every level
    assert set(rep["evidence"]) == {"0", "1", "2", "3"} and rep["evidence"]["1"]
    code, out = run(["gamma", "0.1x1+1.0x1", "--m-max", "3", "--format", "json"])
    assert json.loads(out)["gamma"] == [0, 0, 0, 0]
    code, out = run(["gamma", "1.1x1", "--m-max", "2", "--format", "csv"])
    assert out.splitlines()[0] == "level,N,log_size"


def test_gamma_hom_block():
    code, out = run(["gamma", "hom:etale|mult", "--m-max", "3", "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["constraint"]["kind"] == "hom" and rep["gamma"] == [0, 0, 0, 0]
    assert rep["n_bounds"] == [0, 1]
    code, out = run(["gamma", "hom:etale|mult", "--m-max", "2"])
    assert "bounds (0, 1)" in out


def test_gamma_inconclusive_exit(capsys):
    code = main(["gamma", "2.1x1", "--m-max", "2", "--n-cap", "4"])
    assert code == 3
    assert "N=" in capsys.readouterr().err


def test_sweep_one_entry(tmp_path):
    cat = write_catalog(tmp_path / "c.json", 2, [slopes("ss", (1, 1, 1))])
    code, out = run(["sweep", "--catalog", cat, "--format", "csv", "--m-max", "3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# run_config: {")
    assert lines[1] == ",".join(sweep_header(3))
    assert lines[2] == "ss,2,1,2,1,1,1,1,1,0,1,1,1,1,ok"
    assert len(lines) == 3


def test_sweep_row_count_matches_catalog(tmp_path):
    cat = default_catalog(3, twists=False)
    path = write_catalog(tmp_path / "c.json", 3, cat.entries)
    code, out = run(["sweep", "--catalog", path, "--format", "csv", "--m-max", "2"])
    rows = out.splitlines()[2:]
    assert len(rows) == len(cat.entries)
    assert [r.split(",")[0] for r in rows] == [e.name for e in cat.entries]
    assert code == 0, out


def test_sweep_records_failures_in_row(tmp_path):
    bad = CatalogEntry("bad", {"type": "matrix", "A": [[0, 2], [1, 0]], "B": [[1, 0], [0, 1]], "m_work": 3})
    cat = write_catalog(tmp_path / "c.json", 2, [bad, slopes("ss", (1, 1, 1))])
    code, out = run(["sweep", "--catalog", cat, "--format", "csv", "--m-max", "2"])
    rows = out.splitlines()[2:]
    assert rows[0].startswith("bad,2,") and rows[0].endswith("error:ConstructionError")
    assert rows[1].endswith(",ok")
    assert code == 1


def test_sweep_json_and_table(tmp_path):
    cat = write_catalog(tmp_path / "c.json", 2, [slopes("ord", (1, 0, 1), (0, 1, 1))])
    code, out = run(["sweep", "--catalog", cat, "--format", "json", "--m-max", "2"])
    obj = json.loads(out)
    assert obj["run_config"]["p"] == 2 and obj["rows"][0]["gamma_2"] == "0"
    code, out = run(["sweep", "--catalog", cat, "--m-max", "2"])
    assert out.splitlines()[1].split()[0] == "name"


def test_verify_exit_codes(tmp_path):
    good = write_catalog(tmp_path / "good.json", 2, [slopes("ss", (1, 1, 1)), slopes("et", (1, 0, 1))])
    code, out = run(["verify", "--catalog", good, "--samples", "4"])
    assert code == 0 and out.strip().endswith("2/2 entries green")
    bad = CatalogEntry("bad", {"type": "matrix", "A": [[0, 2], [1, 0]], "B": [[1, 0], [0, 1]], "m_work": 3})
    path = write_catalog(tmp_path / "bad.json", 2, [bad])
    code, out = run(["verify", "--catalog", path, "--format", "csv"])
    assert code == 1 and "bad,2,construction,fail" in out


def test_environment_variables_mirror_flags(monkeypatch, tmp_path):
    monkeypatch.setenv("PDIV_P", "3")
    monkeypatch.setenv("PDIV_FORMAT", "json")
    code, out = run(["invariants", "1.1x1"])
    assert json.loads(out)["p"] == 3
    cat = write_catalog(tmp_path / "c.json", 3, [slopes("ss", (1, 1, 1))])
    monkeypatch.setenv("PDIV_CATALOG", cat)
    monkeypatch.setenv("PDIV_M_MAX", "2")
    code, out = run(["sweep", "--format", "csv"])
    assert code == 0 and out.splitlines()[2].startswith("ss,3,")
    cfg = json.loads(out.splitlines()[0].split(": ", 1)[1])
    assert cfg["m_max"] == 2 and cfg["catalog"] == cat


def test_catalog_command():
    code, out = run(["catalog", "--p", "5"])
    obj = json.loads(out)
    assert obj["p"] == 5 and len(obj["entries"]) == len(default_catalog(5).entries)


def test_cache_commands_and_warm_rerun(tmp_path):
    cache = str(tmp_path / "counts.jsonl")
    assert main(["cache", "info"]) == 2
    cat = write_catalog(tmp_path / "c.json", 2, [slopes("ss", (1, 1, 1)), slopes("a", (2, 1, 1))])
    args = ["sweep", "--catalog", cat, "--cache", cache, "--format", "csv", "--m-max", "2"]
    _, cold = run(args)
    code, info = run(["cache", "info", "--cache", cache])
    n = int(info.split(": ")[1].split()[0])
    assert n > 0
    _, warm = run(args)
    assert cold == warm
    _, info2 = run(["cache", "info", "--cache", cache])
    assert info2 == info
    code, out = run(["cache", "clear", "--cache", cache])
    assert code == 0 and "removed" in out
    _, info3 = run(["cache", "info", "--cache", cache])
    assert ": 0 records" in info3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pdiv", "invariants", "1.1x1", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["s_D"] == 1
