"""Command line front end: ``mixsig {analyze,table,verify}``.

Exit codes: 0 success, 1 an inequality failed, 2 unknown field label,
3 malformed catalog, 4 enumeration budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import reproduce_table, render_table
from .checks import FieldAnalysis, analyze_field, inequality_checks, random_integer_lattice
from .core import Precision
from .errors import CatalogError, EnumerationBudgetExceeded, FieldSpecError, MixsigError
from .minima import DEFAULT_CELL_BUDGET, DEFAULT_TOL
from .numberfield import default_catalog_path, load_catalog_documents, parse_field_document
from .reduction import DEFAULT_NODE_BUDGET

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_MISSING, EXIT_CATALOG, EXIT_BUDGET = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    tolerance: float = DEFAULT_TOL
    cell_budget: int = DEFAULT_CELL_BUDGET
    enumeration_budget: int = DEFAULT_NODE_BUDGET
    workers: int = 1
    seed: int = 0
    output_format: str = "text"
    random_lattices: int = 20

    def __post_init__(self):
        if min(self.cell_budget, self.enumeration_budget, self.workers) < 1:
            raise ValueError("budgets and workers must be positive")


def _config(args) -> RunConfig:
    return RunConfig(
        precision_bits=args.precision,
        tolerance=args.tol,
        cell_budget=args.cell_budget,
        enumeration_budget=args.enum_budget,
        workers=args.workers,
        seed=args.seed,
        output_format=args.format,
        random_lattices=getattr(args, "random_lattices", 20),
    )


def _emit(doc: dict, text: str, cfg: RunConfig, out) -> None:
    out = sys.stdout if out is None else out
    if cfg.output_format == "structured":
        out.write(json.dumps({"schema_version": SCHEMA_VERSION, **doc}, sort_keys=True, indent=1) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _estimate_record(e) -> dict:
    return {
        "lower": e.lower,
        "upper": e.upper,
        "lower_certified": e.lower_certified,
        "upper_certified": e.upper_certified,
        "status": e.status,
        "witnesses": [list(w) for w in e.witnesses],
        "effort": dict(sorted(e.effort.items())),
    }


def analysis_record(res: FieldAnalysis) -> dict:
    s = res.search
    return {
        "label": res.label,
        "signature": [res.signature.r, res.signature.s],
        "d_K": res.d_K,
        "det": res.det,
        "minima": {"mu": list(res.profile.mu), "witnesses": [list(w) for w in res.profile.witnesses]},
        "m": _estimate_record(res.m),
        "M": _estimate_record(res.M),
        "flow": {
            "mode": s.mode,
            "converged": s.converged,
            "ratio": s.ratio,
            "log_coords": list(s.g_star.log_coords),
            "mu": list(s.profile.mu),
            "span_dim": s.span_dim,
            "evaluations": s.evaluations,
        },
        "bounds": [e.as_record() for e in res.bounds.entries],
        "best_bound": {"a": res.best_a, "value": res.best_value},
        "checks": [c.as_record() for c in res.checks],
        "passed": res.passed,
    }


def analysis_text(res: FieldAnalysis) -> str:
    sig = res.signature
    M, s = res.M, res.search
    flag = lambda ok: "certified" if ok else "heuristic"
    lines = [
        f"field {res.label}: signature ({sig.r},{sig.s}), d_K = {res.d_K}, det = {res.det:.10g}",
        "  successive minima: " + ", ".join(f"{x:.10g}" for x in res.profile.mu),
        f"  m = {res.m.upper:.10g} ({flag(res.m.lower_certified)})",
        f"  M in [{M.lower:.10g} ({flag(M.lower_certified)}), {M.upper:.10g} (certified)]  status {M.status}",
        f"  flow ({s.mode}): ratio - 1 = {s.ratio - 1:.3g}, span_dim {s.span_dim}, "
        f"{'converged' if s.converged else 'not converged'}",
        f"  best main bound: a = {res.best_a}, {res.best_value:.10g}",
    ]
    for e in res.bounds.entries:
        val = "unknown constant" if e.value is None else f"{e.value:.10g}"
        lines.append(f"    {e.name:<26} {val:>18}  d^{e.exponent}  [{e.status}]")
    for c in res.checks:
        lines.append(f"  {'PASS' if c.holds else 'FAIL'} {c.name}: {c.lhs:.10g} <= {c.rhs:.10g}")
    lines.append(f"  result: {'PASS' if res.passed else 'FAIL'}")
    return "\n".join(lines)


def _analyze_doc(args):
    doc, cfg = args
    spec = parse_field_document(doc)
    return analyze_field(
        spec, Precision(cfg.precision_bits), cfg.tolerance, cfg.cell_budget, cfg.enumeration_budget
    )


def cmd_analyze(args, out=None) -> int:
    cfg = _config(args)
    docs = load_catalog_documents(args.catalog)
    labels = [d["label"] for d in docs]
    chosen = [d for d in docs if args.field is None or d["label"] == args.field]
    if not chosen:
        sys.stderr.write(f"unknown field {args.field!r}; catalog has {', '.join(labels)}\n")
        return EXIT_MISSING
    try:
        if cfg.workers > 1 and len(chosen) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_analyze_doc, [(d, cfg) for d in chosen]))
        else:
            results = [_analyze_doc((d, cfg)) for d in chosen]
    except FieldSpecError as exc:
        sys.stderr.write(f"malformed catalog entry: {exc}\n")
        return EXIT_CATALOG
    doc = {"command": "analyze", "fields": [analysis_record(r) for r in results]}
    _emit(doc, "\n".join(analysis_text(r) for r in results), cfg, out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_table(args, out=None) -> int:
    cfg = _config(args)
    rows = reproduce_table(args.max_degree)
    doc = {"command": "table", "rows": [r.as_record() for r in rows]}
    _emit(doc, render_table(rows), cfg, out)
    return EXIT_OK


def _verify_field(args):
    doc, cfg = args
    label = doc.get("label", "?")
    try:
        spec = parse_field_document(doc)
        res = analyze_field(
            spec, Precision(cfg.precision_bits), cfg.tolerance, cfg.cell_budget, cfg.enumeration_budget
        )
    except (MixsigError, ValueError) as exc:
        return label, None, f"{type(exc).__name__}: {exc}"
    return label, [c.as_record() for c in res.checks], None


def _verify_random(args):
    index, cfg = args
    rng = np.random.default_rng([cfg.seed, index])
    lat = random_integer_lattice(rng)
    checks = inequality_checks(lat, cfg.tolerance, cell_budget=cfg.cell_budget, enum_budget=cfg.enumeration_budget)
    return [c.as_record() for c in checks]


def cmd_verify(args, out=None) -> int:
    cfg = _config(args)
    docs = load_catalog_documents(args.catalog)
    jobs_f = [(d, cfg) for d in docs]
    jobs_r = [(i, cfg) for i in range(cfg.random_lattices)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            fields = list(pool.map(_verify_field, jobs_f))
            randoms = list(pool.map(_verify_random, jobs_r))
    else:
        fields = [_verify_field(j) for j in jobs_f]
        randoms = [_verify_random(j) for j in jobs_r]

    counts: dict[str, list[int]] = {}

    def tally(checks):
        for c in checks:
            k = counts.setdefault(c["name"], [0, 0])
            k[0] += c["holds"]
            k[1] += 1

    field_docs = []
    errors = 0
    for label, checks, err in fields:
        if err is not None:
            errors += 1
            field_docs.append({"label": label, "error": err})
            continue
        tally(checks)
        field_docs.append({"label": label, "passed": all(c["holds"] for c in checks), "checks": checks})
    for checks in randoms:
        tally(checks)
    ok = errors == 0 and all(p == t for p, t in counts.values())

    lines = []
    for f in field_docs:
        if "error" in f:
            lines.append(f"{f['label']:<14} ERROR {f['error']}")
        else:
            lines.append(f"{f['label']:<14} {'PASS' if f['passed'] else 'FAIL'}")
    lines.append(f"random lattices: {len(randoms)} (seed {cfg.seed})")
    for name in sorted(counts):
        p, t = counts[name]
        lines.append(f"  {name:<40} {p}/{t}")
    lines.append("all checks passed" if ok else "FAILURES present")
    doc = {
        "command": "verify",
        "seed": cfg.seed,
        "fields": field_docs,
        "random_lattices": len(randoms),
        "counts": {k: {"passed": v[0], "total": v[1]} for k, v in sorted(counts.items())},
        "passed": ok,
    }
    _emit(doc, "\n".join(lines), cfg, out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", default=None, help="field catalog (default: $MIXSIG_CATALOG or the bundled one)")
    common.add_argument("--precision", type=int, default=128, help="mantissa bits for high precision work")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative gap for the minimum estimators")
    common.add_argument("--cell-budget", type=int, default=DEFAULT_CELL_BUDGET)
    common.add_argument("--enum-budget", type=int, default=DEFAULT_NODE_BUDGET)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "structured"), default="text")

    p = argparse.ArgumentParser(prog="mixsig", description="Minima and Euclidean-minimum bounds for mixed signature lattices.")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="run the full pipeline on catalog fields")
    a.add_argument("--field", default=None, help="label of one catalog field (default: all)")
    t = sub.add_parser("table", parents=[common], help="print the table of main bounds")
    t.add_argument("--max-degree", type=int, default=5)
    v = sub.add_parser("verify", parents=[common], help="check every inequality on the catalog and random lattices")
    v.add_argument("--random-lattices", type=int, default=20)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.catalog is None:
        args.catalog = str(default_catalog_path())
    handler = {"analyze": cmd_analyze, "table": cmd_table, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except CatalogError as exc:
        sys.stderr.write(f"malformed catalog: {exc}\n")
        return EXIT_CATALOG
    except EnumerationBudgetExceeded as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
