"""``zaremba-lab`` command line.

Every verb builds a :class:`RunConfig`, dispatches to the owning module and
emits a :class:`Report`.  Reports are deterministic for a fixed config: keys
are sorted, floats are rounded to 12 significant digits and the wall-clock
time is only included with ``--timing``.

Exit status: 0 on success, 1 on usage or input errors, 2 when an asserted
invariant fails.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .errors import ZarembaLabError

SCHEMA = "zaremba-lab/report/1"
VERBS = (
    "expand", "search", "exists", "count", "minsum", "decompose",
    "dimension", "discrepancy", "verify-lemma", "stats", "report",
)
EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    verb: str
    q: Optional[int] = None
    q_min: Optional[int] = None
    q_max: Optional[int] = None
    a: Optional[int] = None
    M: int = 5
    theta: Optional[float] = None
    t: Optional[float] = None
    M_tilde: int = 2
    t_grid: Optional[str] = None
    name: Optional[str] = None
    op: str = "intersect"
    kind: str = "larcher"
    count: int = 100
    length: int = 300
    N: int = 1000
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None
    format: str = "json"
    timing: bool = False
    size: Optional[int] = None
    list_checks: bool = False
    all_checks: bool = False

    def validate(self) -> None:
        if self.verb not in VERBS:
            raise UsageError(f"unknown verb {self.verb!r}")
        if self.theta is not None and not 0 < self.theta <= 0.5:
            raise UsageError(f"theta must lie in (0, 0.5], got {self.theta}")
        if self.q_min is not None and self.q_max is not None and self.q_min > self.q_max:
            raise UsageError(f"empty range [{self.q_min}, {self.q_max}]")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")

    def t_for(self, q: int) -> float:
        """``t`` from ``--t`` or from ``t = floor(q^theta)``."""
        if self.t is not None:
            return float(self.t)
        if self.theta is not None:
            return float(math.floor(q**self.theta))
        raise UsageError("give --t or --theta")

    def q_range(self) -> range:
        if self.q is not None:
            return range(self.q, self.q + 1)
        if self.q_max is None:
            raise UsageError("give --q or --q-max")
        return range(self.q_min if self.q_min is not None else 2, self.q_max + 1)

    def echo(self) -> dict:
        """The config keys that influence this verb's output."""
        d = dataclasses.asdict(self)
        keys = ("verb", "format") + _RELEVANT.get(self.verb, ())
        return {k: d[k] for k in keys if d[k] is not None}


_RANGE = ("q", "q_min", "q_max")
_RELEVANT = {
    "expand": ("a", "q"),
    "search": _RANGE + ("M",),
    "exists": _RANGE + ("M",),
    "count": _RANGE + ("M",),
    "minsum": _RANGE,
    "decompose": _RANGE + ("M", "theta", "t"),
    "dimension": ("M", "t_grid"),
    "discrepancy": ("a",) + _RANGE,
    "verify-lemma": ("name", "q_max", "size", "seed", "list_checks", "all_checks"),
    "stats": ("q", "op", "count", "length", "N", "seed"),
    "report": ("kind",) + _RANGE,
}


@dataclass
class Report:
    config: dict
    results: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    ok: bool = True
    wall_clock: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"schema": SCHEMA, "version": __version__, "config": self.config,
             "results": self.results, "summary": self.summary, "ok": self.ok}
        if self.wall_clock is not None:
            d["wall_clock"] = self.wall_clock
        return _plain(d)


def _plain(v: Any) -> Any:
    """JSON-ready copy: fractions become ``"p/q"``, floats are rounded."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return int(v)
    if hasattr(v, "item"):  # numpy scalars
        return _plain(v.item())
    if isinstance(v, float):
        return float(f"{v:.12g}") if math.isfinite(v) else str(v)
    return str(v)


def export(report: Report, fmt: str) -> str:
    """Serialise a report as pretty JSON or as CSV rows of ``results``."""
    doc = report.to_dict()
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    rows = doc["results"]
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([json.dumps(r[c]) if isinstance(r.get(c), (list, dict)) else ("" if r.get(c) is None else r[c]) for c in cols])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


# config file ---------------------------------------------------------------


def _coerce(value: str) -> Any:
    v = value.strip()
    if len(v) >= 2 and v[0] == v[-1] and v[0] in "\"'":
        return v[1:-1]
    if v.lower() in ("true", "false"):
        return v.lower() == "true"
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes in keys
    become underscores."""
    out = {}
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = line.split("=", 1)
            k = k.strip().replace("-", "_")
            if k not in fields:
                raise UsageError(f"{path}:{lineno}: unknown key {k!r}")
            out[k] = _coerce(v)
    return out


# verbs ---------------------------------------------------------------------


def _expand(cfg: RunConfig) -> Report:
    from .cf_core import expand, max_quotient, sum_quotients

    if cfg.a is None or cfg.q is None:
        raise UsageError("expand needs --a and --q")
    d = expand(cfg.a, cfg.q)
    res = {"a": cfg.a, "q": cfg.q, "digits": list(d.digits)}
    if d.digits:
        res.update(M=max_quotient(d), S=sum_quotients(d))
    return Report(cfg.echo(), [res])


def _search(cfg: RunConfig) -> Report:
    from .zaremba import find_numerators

    rows = []
    for q in cfg.q_range():
        r = find_numerators(q, cfg.M)
        rows.append({"q": q, "M": cfg.M, "count": r.count, "predicted_scale": r.predicted_scale,
                     "numerators": list(r.numerators)})
    return Report(cfg.echo(), rows)


def _exists_chunk(args):
    from .zaremba import exists_zaremba

    lo, hi, M = args
    return [(q, exists_zaremba(q, M)) for q in range(lo, hi)]


def _sharded(fn, qr: range, M: int, workers: int):
    if workers == 1 or len(qr) < 2 * workers:
        return fn((qr.start, qr.stop, M))
    step = -(-len(qr) // (4 * workers))
    chunks = [(s, min(s + step, qr.stop), M) for s in range(qr.start, qr.stop, step)]
    with ProcessPoolExecutor(workers) as ex:
        return [row for part in ex.map(fn, chunks) for row in part]


def _exists(cfg: RunConfig) -> Report:
    found = _sharded(_exists_chunk, cfg.q_range(), cfg.M, cfg.workers)
    rows = [{"q": q, "M": cfg.M, "found": a is not None, "a": a} for q, a in found]
    missing = [r["q"] for r in rows if not r["found"]]
    return Report(cfg.echo(), rows, {"checked": len(rows), "missing": missing}, ok=not missing)


def _count(cfg: RunConfig) -> Report:
    from .zaremba import count_numerators

    rows = []
    for q in cfg.q_range():
        n, ratio = count_numerators(q, cfg.M)
        rows.append({"q": q, "M": cfg.M, "count": n, "ratio": ratio})
    return Report(cfg.echo(), rows)


def _minsum(cfg: RunConfig) -> Report:
    from .zaremba import min_sum_table, moser_envelope

    qr = cfg.q_range()
    table = min_sum_table(qr.start, qr.stop - 1)
    rows, bad = [], []
    for q, a, s in table.tolist():
        env = moser_envelope(q, 5)
        rows.append({"q": q, "a": a, "S": s, "envelope": env, "S_per_log": s / math.log(q)})
        if s > env:
            bad.append(q)
    return Report(cfg.echo(), rows, {"checked": len(rows), "above_envelope": bad}, ok=not bad)


def _decompose(cfg: RunConfig) -> Report:
    import numpy as np

    from .cantor import decompose_ZM, membership_mask

    rows, ok = [], True
    for q in cfg.q_range():
        t = cfg.t_for(q)
        U = decompose_ZM(q, cfg.M, t)
        same = bool(np.array_equal(U.mask(), membership_mask(q, cfg.M, t)[:q]))
        ok &= same
        L = U.lengths
        rows.append({
            "q": q, "M": cfg.M, "t": t, "size": U.size, "intervals": len(U.intervals),
            "min_length": min(L) if L else None, "max_length": max(L) if L else None,
            "length_floor": q // int(t * t) if t >= 1 else None,
            "length_cap": 8 * (cfg.M + 1) * q / (t * t) + 1,
            "matches_membership": same,
            "runs": [list(iv) for iv in U.intervals],
        })
    return Report(cfg.echo(), rows, ok=ok)


def _dimension(cfg: RunConfig) -> Report:
    from .cantor import estimate_dimension

    if cfg.t_grid:
        grid = [float(x) for x in cfg.t_grid.split(",")]
    else:
        grid = [2.0**k for k in range(6, 11)]
    est = estimate_dimension(cfg.M, grid)
    res = {"M": cfg.M, "slope": est.slope, "w_fit": est.w_fit, "w_hensley": est.w_hensley,
           "error": est.error, "samples": [list(s) for s in est.samples]}
    return Report(cfg.echo(), [res])


def _discrepancy(cfg: RunConfig) -> Report:
    from .discrepancy import lattice_points, star_discrepancy_exact

    if cfg.a is not None and cfg.q is not None:
        rep = star_discrepancy_exact(lattice_points(cfg.a, cfg.q), a=cfg.a)
        x, y, closed = rep.witness_box
        res = {"a": cfg.a, "q": cfg.q, "exact": rep.exact_value, "value": rep.value,
               "witness": {"x": x, "y": y, "closed": closed},
               "zaremba_bound": rep.zaremba_bound, "digit_sum_bound": rep.larcher_bound}
        ok = rep.exact_value <= min(1, rep.zaremba_bound)
        return Report(cfg.echo(), [res], ok=ok)
    from . import _kernels

    qr = cfg.q_range()
    total, trivial, grid, exact, bad = _kernels.zaremba_bound_sweep(qr.start, qr.stop - 1)
    rows = [{"q": int(q), "a": int(a), "status": "violated"} for q, a in bad]
    summ = {"pairs": int(total), "trivial": int(trivial), "grid": int(grid), "exact": int(exact)}
    return Report(cfg.echo(), rows, summ, ok=not rows)


def _verify_one(args):
    from .verify import run_check

    name, n, seed = args
    return run_check(name, n, seed).to_dict()


def _verify(cfg: RunConfig) -> Report:
    from .verify import REGISTRY

    if cfg.list_checks:
        rows = [{"name": c.name, "module": c.module, "statement": c.statement,
                 "size": c.size, "default_n": c.default_n, "asserting": c.asserting} for c in REGISTRY.values()]
        return Report(cfg.echo(), rows)
    if cfg.all_checks:
        names = list(REGISTRY)
    elif cfg.name:
        names = [n.strip() for n in cfg.name.split(",")]
    else:
        raise UsageError("verify-lemma needs --name, --all or --list")
    for n in names:
        if n not in REGISTRY:
            raise UsageError(f"unknown check {n!r}; see --list")
    # --size wins; --q-max only resizes checks whose size is a modulus bound
    jobs = [(n, cfg.size if cfg.size is not None else (cfg.q_max if REGISTRY[n].size == "q" else None), cfg.seed)
            for n in names]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            rows = list(ex.map(_verify_one, jobs))
    else:
        rows = [_verify_one(j) for j in jobs]
    failed = [r["name"] for r in rows if not r["passed"]]
    return Report(cfg.echo(), rows, {"checks": len(rows), "failed": failed}, ok=not failed)


def _stats(cfg: RunConfig) -> Report:
    from . import modular_stats as ms

    if cfg.q is None:
        raise UsageError("stats needs --q")
    q = cfg.q
    A = ms.random_interval_union(q, cfg.count, cfg.length, cfg.seed)
    B = ms.random_interval_union(q, cfg.count, cfg.length, cfg.seed + 1)
    if cfg.op == "intersect":
        rep = ms.intersect_inverse(A, A, q, seed=cfg.seed)
    elif cfg.op == "intersect-pair":
        rep = ms.intersect_inverse(A, B, q, seed=cfg.seed)
    elif cfg.op == "t-action":
        rep = ms.count_T_action(A, B, cfg.N, q, seed=cfg.seed)
    elif cfg.op == "sigma":
        rep = ms.sigma_star(A, q)
        if rep.observed != rep.params["mobius_sum"]:
            return Report(cfg.echo(), [rep.to_dict()], ok=False)
    else:
        raise UsageError(f"unknown stats op {cfg.op!r}")
    return Report(cfg.echo(), [rep.to_dict()])


def _report(cfg: RunConfig) -> Report:
    if cfg.kind == "larcher":
        from .zaremba import larcher_report

        rows = [
            {"q": r.q, "minS": r.min_S, "minS_per_logq": r.per_log,
             "minS_per_logq_sqrtloglogq": r.per_log_sqrtloglog,
             "minS_phi_scaled": r.totient_scaled, "a": r.a}
            for r in larcher_report(cfg.q_range())
        ]
        return Report(cfg.echo(), rows)
    if cfg.kind == "harvest":
        from .independence import default_k2_harvest

        rows = [dataclasses.asdict(i) for i in default_k2_harvest()]
        return Report(cfg.echo(), rows, {"instances": len(rows)})
    raise UsageError(f"unknown report kind {cfg.kind!r}")


DISPATCH = {
    "expand": _expand, "search": _search, "exists": _exists, "count": _count,
    "minsum": _minsum, "decompose": _decompose, "dimension": _dimension,
    "discrepancy": _discrepancy, "verify-lemma": _verify, "stats": _stats,
    "report": _report,
}


def run(verb: str, cfg: RunConfig) -> Report:
    cfg.validate()
    start = time.perf_counter()
    rep = DISPATCH[verb](cfg)
    if cfg.timing:
        rep.wall_clock = round(time.perf_counter() - start, 3)
    return rep


# argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="flat key = value file; flags override it")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--workers", type=int, default=S)
    common.add_argument("--out", default=S, help="write the report here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=S)
    common.add_argument("--timing", action="store_true", default=S, help="include wall-clock seconds")
    common.add_argument("--q", type=int, default=S)
    common.add_argument("--q-min", dest="q_min", type=int, default=S)
    common.add_argument("--q-max", dest="q_max", type=int, default=S)
    common.add_argument("--a", type=int, default=S)
    common.add_argument("--M", type=int, default=S)
    common.add_argument("--theta", type=float, default=S, help="t = floor(q^theta), theta in (0, 0.5]")
    common.add_argument("--t", type=float, default=S)
    common.add_argument("--M-tilde", dest="M_tilde", type=int, default=S)

    p = _Parser(prog="zaremba-lab", description="Bounded partial quotient experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    helps = {
        "expand": "continued fraction digits of a/q",
        "search": "all numerators with digits <= M",
        "exists": "first numerator with digits <= M",
        "count": "number of admissible numerators",
        "minsum": "minimal digit sum per q",
        "decompose": "Z_M(t) as a union of runs",
        "dimension": "fit the growth exponent of Q_M(t)",
        "discrepancy": "exact star discrepancy of X(a, q) or a bound sweep",
        "verify-lemma": "run invariant checks",
        "stats": "modular statistics on random interval unions",
        "report": "tabular reports (larcher, harvest)",
    }
    subs = {v: sub.add_parser(v, parents=[common], help=h) for v, h in helps.items()}
    subs["dimension"].add_argument("--t-grid", dest="t_grid", default=S, help="comma-separated t values")
    v = subs["verify-lemma"]
    v.add_argument("--name", default=S, help="check name(s), comma-separated")
    v.add_argument("--size", type=int, default=S, help="size parameter of each check (see --list)")
    v.add_argument("--list", dest="list_checks", action="store_true", default=S)
    v.add_argument("--all", dest="all_checks", action="store_true", default=S)
    s = subs["stats"]
    s.add_argument("--op", choices=("intersect", "intersect-pair", "t-action", "sigma"), default=S)
    s.add_argument("--count", type=int, default=S, help="number of intervals")
    s.add_argument("--length", type=int, default=S, help="interval length")
    s.add_argument("--N", type=int, default=S)
    subs["report"].add_argument("--kind", choices=("larcher", "harvest"), default=S)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values: dict = {}
    args = vars(ns).copy()
    cfg_path = args.pop("config", None)
    if cfg_path:
        values.update(read_config(cfg_path))
    values.update(args)
    values["verb"] = ns.verb
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # --help and usage errors
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        rep = run(cfg.verb, cfg)
        text = export(rep, cfg.format)
        if cfg.out:
            write_atomic(cfg.out, text)
        else:
            sys.stdout.write(text)
    except (UsageError, ZarembaLabError, ValueError) as exc:
        print(f"zaremba-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"zaremba-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if rep.ok else EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
