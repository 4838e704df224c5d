"""Command-line front end.

    pdiv invariants ENTRY      a-number, slopes, j-number, s_D
    pdiv gamma ENTRY           centralizing sequence with point-count evidence
    pdiv sweep                 one CSV/JSON row per catalog entry
    pdiv verify                theorem checks; exit status 0 iff all green
    pdiv cache info|clear      inspect or remove the point-count cache

ENTRY is a catalog entry name or a slope label such as 1.1x2+0.1x1
(summands c.dxk of codimension c, dimension d, multiplicity k).
Every flag can also be set through an environment variable PDIV_<FLAG>,
e.g. PDIV_P=3 or PDIV_M_MAX=4.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import centralizer as cz
from .centralizer import FULL, LieConstraint, PointCountCache, Schedule
from .dieudonne import SlopeData, a_number, j_number, newton_slopes, s_height, slope_data
from .errors import ExtractionError, InconclusiveError, PdivError
from .verifier import Catalog, CatalogEntry, VerifyOptions, default_catalog, verify_catalog

ENV_PREFIX = "PDIV_"


@dataclass(frozen=True)
class RunConfig:
    p: int
    m_max: int | None
    n_cap: int
    deltas: tuple[int, ...]
    n0: int | None
    seed: int
    catalog: str | None
    cache: str | None
    format: str
    jobs: int

    @property
    def schedule(self) -> Schedule:
        return Schedule(self.n_cap, self.deltas, self.n0)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def open_cache(self) -> PointCountCache | None:
        return PointCountCache(self.cache) if self.cache else None


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _parse_deltas(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=int(_env("p", 2)), help="the prime (default 2)")
    m_env = _env("m_max")
    common.add_argument("--m-max", type=int, default=int(m_env) if m_env else None,
                        help="top level; default is per entry, or 3 for sweeps")
    common.add_argument("--n-cap", type=int, default=int(_env("n_cap", cz.DEFAULT_SCHEDULE.n_cap)),
                        help="largest extension degree N used for point counts")
    common.add_argument("--deltas", type=_parse_deltas,
                        default=_parse_deltas(_env("deltas", ",".join(map(str, cz.DEFAULT_SCHEDULE.deltas)))),
                        help="comma-separated progression steps")
    n0 = _env("n0")
    common.add_argument("--n0", type=int, default=int(n0) if n0 else None, help="first degree of the schedule")
    common.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    common.add_argument("--catalog", default=_env("catalog"), help="catalog JSON (default: built-in catalog)")
    common.add_argument("--cache", default=_env("cache"), help="point-count cache file (JSONL)")
    common.add_argument("--format", choices=("table", "csv", "json"), default=_env("format", "table"))
    common.add_argument("--jobs", type=int, default=int(_env("jobs", 1)))

    parser = argparse.ArgumentParser(prog="pdiv", description="Invariants of truncated p-divisible groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("invariants", parents=[common], help="a-number, slopes, j-number, s_D")
    s.add_argument("entry")
    s = sub.add_parser("gamma", parents=[common], help="centralizing sequence")
    s.add_argument("entry")
    s.add_argument("--constraint", help="constraint JSON; default: the entry's own constraint")
    s = sub.add_parser("sweep", parents=[common], help="CSV/JSON rows over a catalog")
    s.add_argument("--entry", action="append", help="restrict to these entry names")
    s = sub.add_parser("verify", parents=[common], help="run the theorem checks")
    s.add_argument("--entry", action="append", help="restrict to these entry names")
    s.add_argument("--samples", type=int, default=int(_env("samples", 12)))
    s = sub.add_parser("catalog", parents=[common], help="print the catalog as JSON")
    s = sub.add_parser("cache", parents=[common], help="inspect or clear the cache")
    s.add_argument("action", choices=("info", "clear"))
    return parser


def run_config(args) -> RunConfig:
    return RunConfig(args.p, args.m_max, args.n_cap, tuple(args.deltas), args.n0, args.seed,
                     args.catalog, args.cache, args.format, args.jobs)


def load_catalog(cfg: RunConfig) -> Catalog:
    if cfg.catalog:
        cat = Catalog.load(cfg.catalog)
        return cat
    return default_catalog(cfg.p, cfg.seed)


def parse_slope_label(label: str) -> SlopeData:
    summands = []
    for part in label.split("+"):
        cd, _, k = part.partition("x")
        c, _, d = cd.partition(".")
        summands.append((int(c), int(d), int(k or 1)))
    return SlopeData(tuple(summands))


def resolve_entry(cfg: RunConfig, name: str) -> tuple[CatalogEntry, int]:
    cat = load_catalog(cfg)
    for e in cat.entries:
        if e.name == name:
            return e, cat.p
    try:
        sd = parse_slope_label(name)
    except ValueError:
        raise SystemExit(f"pdiv: no catalog entry named {name!r} and not a slope label") from None
    cons = {"type": "slopes", "summands": [list(s) for s in sd.summands]}
    return CatalogEntry(f"slopes:{name}", cons), cfg.p


def _select(cat: Catalog, names) -> Catalog:
    if not names:
        return cat
    missing = set(names) - {e.name for e in cat.entries}
    if missing:
        raise SystemExit(f"pdiv: unknown entries {sorted(missing)}")
    return Catalog(cat.p, tuple(e for e in cat.entries if e.name in names))


# ---------------------------------------------------------------------------
# invariants


def invariants_report(entry: CatalogEntry, p: int) -> dict:
    D = entry.build(p)
    sd = slope_data(D)
    return {"name": entry.name, "p": p, "e": D.e, "r": D.r, "c": D.c, "d": D.d,
            "a": a_number(D), "slopes": [str(x) for x in newton_slopes(D)],
            "j": j_number(D.c, D.d), "s_D": s_height(sd), "m_work": D.m_work}


def cmd_invariants(cfg: RunConfig, name: str, out) -> int:
    entry, p = resolve_entry(cfg, name)
    try:
        rep = invariants_report(entry, p)
    except PdivError as exc:
        print(f"pdiv: construction error: {exc}", file=sys.stderr)
        return 2
    if cfg.format == "json":
        out.write(json.dumps(rep, sort_keys=True) + "\n")
    elif cfg.format == "csv":
        keys = ["name", "p", "e", "r", "c", "d", "a", "slopes", "j", "s_D", "m_work"]
        out.write(",".join(keys) + "\n")
        out.write(",".join(" ".join(rep[k]) if k == "slopes" else str(rep[k]) for k in keys) + "\n")
    else:
        for k, v in rep.items():
            out.write(f"{k:>8}: {' '.join(v) if k == 'slopes' else v}\n")
    return 0


# ---------------------------------------------------------------------------
# gamma


def cmd_gamma(cfg: RunConfig, name: str, constraint_json: str | None, out) -> int:
    entry, p = resolve_entry(cfg, name)
    try:
        D = entry.build(p, (cfg.m_max or 0) + 1)
    except PdivError as exc:
        print(f"pdiv: construction error: {exc}", file=sys.stderr)
        return 2
    constraint = LieConstraint.from_json(json.loads(constraint_json)) if constraint_json else entry.lie_constraint(D.r)
    from .verifier import auto_m_max

    m_max = cfg.m_max or auto_m_max(D)
    cache = cfg.open_cache()
    try:
        if constraint.kind == "full":
            seq = cz.gamma_sequence(D, m_max, FULL, cfg.schedule, cache, strict=False)
        else:
            seq = cz.relative_suite(D, constraint, m_max, cfg.schedule, cache)
    except (ExtractionError, InconclusiveError) as exc:
        print(f"pdiv: inconclusive: {exc}", file=sys.stderr)
        for N, v in getattr(exc, "evidence", []):
            print(f"  N={N} log_size={v}", file=sys.stderr)
        return 3
    rep = {"name": entry.name, "p": p, "constraint": constraint.to_json(), "gamma": list(seq.gamma),
           "n": seq.n_D, "n_bounds": list(seq.n_bounds) if seq.n_bounds else None, "note": seq.note,
           "evidence": {str(k): [list(x) for x in v] for k, v in sorted(seq.evidence.items())}}
    if cfg.format == "json":
        out.write(json.dumps(rep, sort_keys=True) + "\n")
    elif cfg.format == "csv":
        out.write("level,N,log_size\n")
        for level, ev in sorted(seq.evidence.items()):
            for N, v in ev:
                out.write(f"{level},{N},{v}\n")
    else:
        out.write(f"{entry.name} (p={p}, {constraint.kind})\n")
        out.write(f"gamma = {tuple(seq.gamma)}\n")
        out.write(f"n = {seq.n_D}" + (f"  bounds {seq.n_bounds}" if seq.n_bounds and seq.n_bounds[0] != seq.n_bounds[1] else "")
                  + (f"  ({seq.note})" if seq.note else "") + "\n")
        for level, ev in sorted(seq.evidence.items()):
            if ev:
                out.write(f"  level {level}: " + " ".join(f"{N}:{v}" for N, v in ev) + "\n")
    return 0


# ---------------------------------------------------------------------------
# sweep


def sweep_header(m_max: int) -> list[str]:
    return (["name", "p", "e", "r", "c", "d", "a", "j", "s_D"]
            + [f"gamma_{i}" for i in range(m_max + 1)] + ["n_D", "verdicts"])


def sweep_row(entry: CatalogEntry, p: int, m_max: int, schedule: Schedule, cache) -> list[str]:
    blank = [""] * (len(sweep_header(m_max)) - 3)
    try:
        D = entry.build(p, m_max + 1)
        sd = slope_data(D)
        a = a_number(D)
    except PdivError as exc:
        return [entry.name, str(p)] + blank + [f"error:{type(exc).__name__}"]
    head = [entry.name, str(p), str(D.e), str(D.r), str(D.c), str(D.d), str(a),
            str(j_number(D.c, D.d)), str(s_height(sd))]
    constraint = entry.lie_constraint(D.r)
    try:
        if constraint.kind == "full":
            seq = cz.gamma_sequence(D, m_max, FULL, schedule, cache, strict=False)
        else:
            seq = cz.relative_suite(D, constraint, m_max, schedule, cache)
    except (ExtractionError, InconclusiveError):
        return head + [""] * (m_max + 2) + ["inconclusive"]
    verdicts = []
    if seq.violations():
        verdicts.append("violation")
    if seq.n_bounds is None:
        n_field = ""
        # no plateau rule for this context: only the upper bound is checkable
        bound_only = constraint.kind != "full" and not cz.plateau_rule_applies(D, constraint)[0]
        verdicts.append("bound-only" if bound_only else "n-undetermined")
    elif seq.n_bounds[0] == seq.n_bounds[1]:
        n_field = str(seq.n_bounds[0])
    else:
        n_field = f"{seq.n_bounds[0]}..{seq.n_bounds[1]}"
    if constraint.kind == "full" and seq.n_D is not None and seq.gamma[seq.n_D] != s_height(sd):
        verdicts.append("s_D-mismatch")
    return head + [str(x) for x in seq.gamma] + [n_field, ";".join(verdicts) or "ok"]


def _sweep_job(args):
    return sweep_row(*args)


def cmd_sweep(cfg: RunConfig, names, out) -> int:
    cat = _select(load_catalog(cfg), names)
    m_max = cfg.m_max or 3
    cache = cfg.open_cache()
    jobs = [(e, cat.p, m_max, cfg.schedule, cache) for e in cat.entries]
    if cfg.jobs > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(cfg.jobs) as pool:
            rows = pool.map(_sweep_job, jobs, chunksize=1)
    else:
        rows = [_sweep_job(j) for j in jobs]
    header = sweep_header(m_max)
    if cfg.format == "json":
        obj = {"run_config": json.loads(cfg.to_json()), "rows": [dict(zip(header, r)) for r in rows]}
        out.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    elif cfg.format == "csv":
        out.write(f"# run_config: {cfg.to_json()}\n")
        out.write(",".join(header) + "\n")
        for r in rows:
            out.write(",".join(r) + "\n")
    else:
        out.write(f"# run_config: {cfg.to_json()}\n")
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
        out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() + "\n")
    return 0 if all(r[-1] in ("ok", "bound-only") for r in rows) else 1


# ---------------------------------------------------------------------------
# verify


def cmd_verify(cfg: RunConfig, names, samples: int, out) -> int:
    cat = _select(load_catalog(cfg), names)
    options = VerifyOptions(cfg.schedule, cfg.open_cache(), cfg.seed, samples)
    if cfg.m_max:
        cat = Catalog(cat.p, tuple(CatalogEntry(e.name, e.construction, e.m_max or cfg.m_max, e.constraint, e.expect)
                                   for e in cat.entries))
    reports = verify_catalog(cat, options, jobs=cfg.jobs)
    green = all(r.green for r in reports)
    if cfg.format == "json":
        obj = {"run_config": json.loads(cfg.to_json()), "green": green, "reports": [r.to_json() for r in reports]}
        out.write(json.dumps(obj, sort_keys=True, indent=1, default=str) + "\n")
    elif cfg.format == "csv":
        out.write(f"# run_config: {cfg.to_json()}\n")
        out.write("name,p,check,verdict\n")
        for r in reports:
            for c in r.checks:
                out.write(f"{r.name},{r.p},{c.id},{c.verdict}\n")
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
        n_green = sum(r.green for r in reports)
        out.write(f"{n_green}/{len(reports)} entries green\n")
    return 0 if green else 1


def cmd_cache(cfg: RunConfig, action: str, out) -> int:
    if not cfg.cache:
        print("pdiv: no cache path given (--cache or PDIV_CACHE)", file=sys.stderr)
        return 2
    if action == "clear":
        for path in (cfg.cache, cfg.cache + ".lock"):
            if os.path.exists(path):
                os.remove(path)
        out.write(f"removed {cfg.cache}\n")
        return 0
    cache = PointCountCache(cfg.cache)
    out.write(f"{cfg.cache}: {len(cache)} records\n")
    return 0


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = run_config(args)
    out = out or sys.stdout
    try:
        if args.command == "invariants":
            return cmd_invariants(cfg, args.entry, out)
        if args.command == "gamma":
            return cmd_gamma(cfg, args.entry, args.constraint, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.entry, out)
        if args.command == "verify":
            return cmd_verify(cfg, args.entry, args.samples, out)
        if args.command == "catalog":
            out.write(json.dumps(load_catalog(cfg).to_json(), indent=1) + "\n")
            return 0
        return cmd_cache(cfg, args.action, out)
    except PdivError as exc:
        print(f"pdiv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout (used by tests)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
