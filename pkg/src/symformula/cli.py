"""Command-line front end.

Subcommands: ``build``, ``verify``, ``decompose``, ``bounds``, ``selftest`` and
``table``.  Exit codes: 0 success, 1 property or bound failure, 2 usage or
precondition error, 3 parse error.  An optional JSON config file supplies
defaults for any flag; explicit flags win.  ``SYMFORMULA_LOG_LEVEL`` sets the
logging level.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bounds, constructions, decomposition, suite
from .formula_ir import (
    PROPERTY_NAMES,
    FormulaParseError,
    StructuralError,
    analyze,
    binarize,
    expand,
    parse,
    serialize,
    verify_properties,
)
from .polynomial import NEG_INF

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3

log = logging.getLogger("symformula")

DEFAULTS = {"seed": 0, "format": "text", "noncommutative": False, "out": None, "jobs": 1}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int
    format: str
    noncommutative: bool
    out: Optional[str]
    jobs: int


def _int_range(text) -> list:
    """``"8"`` -> [8]; ``"2:5"`` -> [2, 3, 4, 5]; ``"5:2"`` -> []."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(v) for v in text]
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 2:
            return list(range(int(parts[0]), int(parts[1]) + 1))
    except ValueError:
        pass
    raise UsageError(f"bad range {text!r}; use N or LO:HI")


def _single(value, flag: str) -> int:
    vals = _int_range(value)
    if len(vals) != 1:
        raise UsageError(f"{flag} needs a single integer")
    return vals[0]


def _weights(text: Optional[str]) -> Optional[dict]:
    if not text:
        return None
    w = {}
    try:
        for item in text.split(","):
            v, _, wt = item.partition(":")
            w[int(v)] = int(wt)
    except ValueError:
        raise UsageError(f"bad weights {text!r}; use VAR:WEIGHT,...") from None
    if any(x < 1 for x in w.values()):
        raise UsageError("weights must be positive integers")
    return w


# output ---------------------------------------------------------------------

def _flat(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flat(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render(payload: dict, rows: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    flat = [_flat(r) for r in rows]
    if fmt == "csv":
        cols: list = []
        for r in flat:
            cols.extend(c for c in r if c not in cols)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\r\n")
        w.writeheader()
        for r in flat:
            w.writerow(r)
        return buf.getvalue()
    lines = []
    for r in flat:
        lines.append("  ".join(f"{k}={v}" for k, v in r.items()))
    return "\n".join(lines) + ("\n" if lines else "")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_formula(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e}") from None
    return parse(text)


# commands -------------------------------------------------------------------

def _shape(root) -> dict:
    a = analyze(root)
    return {"size": a.size, "nodes": root.n_nodes, "depth": a.depth, "product_depth": a.product_depth}


def _props(report) -> dict:
    return {name: getattr(report, name) for name in PROPERTY_NAMES}


def cmd_build(args, cfg: RunConfig):
    name = args.construction
    n = _single(args.n, "--n")
    k = _single(args.k, "--k")
    commutative = not cfg.noncommutative
    if not commutative and name not in ("ben-or", "monotone"):
        raise UsageError(f"{name} is only defined over a commutative ring")
    try:
        root = constructions.CONSTRUCTIONS[name](n, k)
    except constructions.PreconditionError as e:
        raise UsageError(str(e)) from None
    target = suite.oracle_for(name, n, k, commutative)
    match = expand(root, commutative) == target
    report = verify_properties(root)
    bad = suite.promised_ok(name, root, report)
    record = {
        "construction": name, "n": n, "k": k,
        "mode": "commutative" if commutative else "noncommutative",
        **_shape(root),
        "properties": _props(report),
        "promised_failures": bad,
        "oracle_match": match,
    }
    if name == "newton" and k >= 3:
        fit = constructions.newton_size_fit(k, n)
        record["size_fit"] = {"a": round(fit["a"], 6), "b": round(fit["b"], 6),
                              "model": "log2(size/n) = a*log2(k)^2 + b*log2(k)"}
    record["formula"] = serialize(root)
    return record, [record], EXIT_OK if match and not bad else EXIT_FAIL


def cmd_verify(args, cfg: RunConfig):
    root = _read_formula(args.file)
    w = _weights(args.w)
    report = verify_properties(root, w)
    props = _props(report)
    deg = expand(root).degree
    record = {**_shape(root), "degree": None if deg == NEG_INF else deg, "properties": props,
              "first_offender": dict(report.first_offender)}
    expected = [p for p in (args.expect or "").split(",") if p]
    missing = [p for p in expected if not props.get(p)]
    unknown = [p for p in expected if p not in props]
    if unknown:
        raise UsageError(f"unknown properties {unknown}")
    record["missing"] = missing
    return record, [record], EXIT_FAIL if missing else EXIT_OK


def cmd_decompose(args, cfg: RunConfig):
    root = _read_formula(args.file)
    try:
        if args.mode == "balanced":
            root = binarize(root)
            cert = decomposition.balanced_decompose(root)
            rep = decomposition.validate_balanced(cert, root)
        else:
            if args.q is None or args.d is None:
                raise UsageError("form mode needs --q and --d")
            cert = decomposition.form_decompose(root, args.q, args.d)
            ell = cert.params.get("ell", Fraction(1))
            rep = decomposition.validate_form(cert, root, args.q, ell)
    except decomposition.DecompositionError as e:
        raise UsageError(str(e)) from None
    payload = {"certificate": cert.as_dict(), "validation": rep.as_dict()}
    rows = [{"part": i, "degrees": list(p.degrees), "minvar": p.minvar}
            for i, p in enumerate(cert.parts)]
    rows.append({"part": "total", "degrees": [], "minvar": cert.minvar_total,
                 "valid": rep.passed, "size": root.leaves})
    return payload, rows, EXIT_OK if rep.passed else EXIT_FAIL


def _alpha(text) -> Optional[Fraction]:
    if text is None or text == "":
        return None
    try:
        return Fraction(str(text))
    except ValueError:
        raise UsageError(f"bad alpha {text!r}; use a rational like 1/2") from None


def cmd_bounds(args, cfg: RunConfig):
    reps = []
    for n in _int_range(args.n):
        for k in _int_range(args.k):
            if n < 1 or k < 1:
                raise UsageError("--n and --k must be positive")
            alpha = _alpha(args.alpha)
            reps.extend(bounds.reports_for(n, k, args.d, alpha))
    dicts = [r.as_dict() for r in reps]
    ok = all(r.passed for r in reps)
    return {"reports": dicts, "passed": ok}, dicts, EXIT_OK if ok else EXIT_FAIL


def _pool_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futures = [ex.submit(fn, *it) for it in items]
        return [f.result() for f in futures]


def cmd_selftest(args, cfg: RunConfig):
    n_max = _single(args.n, "--n") if args.n is not None else 6
    items = [(i, cfg.seed, n_max) for i in range(len(suite.SECTIONS))]
    results = sorted(_pool_map(suite.run_section, items, cfg.jobs), key=lambda r: r.name)
    dicts = [r.as_dict() for r in results]
    ok = all(r.passed for r in results)
    payload = {"seed": cfg.seed, "n_max": n_max, "sections": dicts, "passed": ok}
    return payload, dicts, EXIT_OK if ok else EXIT_FAIL


def table_rows(n: int, k: int, d: Optional[int]) -> list:
    """Per-model rows at ``(n, k)``: measured construction size, upper and lower bounds."""
    ben = constructions.ben_or(n, k).leaves
    newton = constructions.newton_homogeneous_formula(n, k).leaves
    mono = constructions.monotone_dc(n, k)
    dep4 = constructions.depth4_formula(n, k).leaves
    lb = bounds.lower_bound_size(n, k)
    rows = [
        {"model": "depth three", "construction": "ben-or", "measured": ben,
         "upper": 4 * (n + 1) ** 2, "lower": None, "lower_trivial": None},
        {"model": "homogeneous", "construction": "newton", "measured": newton,
         "upper": None, "lower": None, "lower_trivial": None},
        {"model": "homogeneous multilinear", "construction": "monotone", "measured": mono.leaves,
         "upper": float(bounds.monotone_upper_bound(n, k).hi) if k >= 2 else None,
         "lower": float(lb.value), "lower_trivial": lb.trivial},
        {"model": "homogeneous depth four", "construction": "depth4", "measured": dep4,
         "upper": bounds.partition_function(k) * (k * n + 1), "lower": None, "lower_trivial": None},
    ]
    if d is not None:
        lbd = bounds.lower_bound_size_depth(n, k, d)
        rows.append({"model": f"homogeneous multilinear product-depth {d}", "construction": "monotone",
                     "measured": mono.leaves if mono.product_depth <= d else None, "upper": None,
                     "lower": float(lbd.value), "lower_trivial": lbd.trivial})
    for r in rows:
        r["n"], r["k"] = n, k
        r["within"] = ((r["upper"] is None or r["measured"] is None or r["measured"] <= r["upper"])
                       and (r["lower"] is None or r["measured"] is None or r["lower"] <= r["measured"]))
    return rows


def cmd_table(args, cfg: RunConfig):
    grid = [(n, k, args.d) for n in _int_range(args.n) for k in _int_range(args.k) if 1 <= k <= n]
    chunks = _pool_map(table_rows, grid, cfg.jobs)
    rows = sorted((r for c in chunks for r in c), key=lambda r: (r["n"], r["k"]))
    cols = ("n", "k", "model", "construction", "measured", "upper", "lower", "lower_trivial", "within")
    rows = [{c: r[c] for c in cols} for r in rows]
    ok = all(r["within"] for r in rows)
    return {"rows": rows, "passed": ok}, rows, EXIT_OK if ok else EXIT_FAIL


def render_table_text(rows: list) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[str(c) for c in cols]] + [["-" if r[c] is None else (f"{r[c]:.6g}" if isinstance(r[c], float)
                                                                   else str(r[c])) for c in cols]
                                        for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    return "".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n" for row in cells)


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--format", choices=("text", "json", "csv"), default=None)
    common.add_argument("--noncommutative", action="store_true", default=None,
                        help="expand in the ordered-monomial ring")
    common.add_argument("--out", default=None, help="write output to PATH")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps")
    common.add_argument("--config", default=None, help="JSON file with flag defaults")

    p = argparse.ArgumentParser(prog="symformula", description="Formulas for elementary symmetric polynomials.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="build a construction and check it")
    b.add_argument("construction", choices=sorted(constructions.CONSTRUCTIONS))
    b.add_argument("--n", default=None)
    b.add_argument("--k", default=None)

    v = sub.add_parser("verify", parents=[common], help="property report for a formula file")
    v.add_argument("file")
    v.add_argument("--w", default=None, help="weights VAR:WEIGHT,... for w-homogeneity")
    v.add_argument("--expect", default=None, help="comma-separated properties that must hold")

    dcp = sub.add_parser("decompose", parents=[common], help="balanced or form decomposition")
    dcp.add_argument("file")
    dcp.add_argument("--mode", choices=("balanced", "form"), default="balanced")
    dcp.add_argument("--q", type=int, default=None)
    dcp.add_argument("--d", type=int, default=None)

    bd = sub.add_parser("bounds", parents=[common], help="evaluate bounds at (n, k)")
    bd.add_argument("--n", default=None)
    bd.add_argument("--k", default=None)
    bd.add_argument("--d", type=int, default=None)
    bd.add_argument("--alpha", default=None, help="fixed alpha for the g recurrence (rational)")

    st = sub.add_parser("selftest", parents=[common], help="run the seeded self-test suite")
    st.add_argument("--n", default=None, help="largest n of the oracle grids (default 6)")

    tb = sub.add_parser("table", parents=[common], help="summary table over (n, k) ranges")
    tb.add_argument("--n", default=None)
    tb.add_argument("--k", default=None)
    tb.add_argument("--d", type=int, default=None)
    return p


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "decompose": cmd_decompose,
            "bounds": cmd_bounds, "selftest": cmd_selftest, "table": cmd_table}


def _config(args) -> RunConfig:
    file_cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"bad config file: {e}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        for key in ("n", "k", "d", "q", "w", "alpha"):
            if key in file_cfg and getattr(args, key, None) is None and hasattr(args, key):
                setattr(args, key, file_cfg[key])
    vals = {}
    for key, default in DEFAULTS.items():
        cli = getattr(args, key)
        vals[key] = cli if cli is not None else file_cfg.get(key, default)
    for key in ("n", "k"):
        if args.command in ("build", "bounds", "table") and getattr(args, key) is None:
            raise UsageError(f"--{key} is required (on the command line or in --config)")
    if vals["format"] not in ("text", "json", "csv"):
        raise UsageError(f"bad format {vals['format']!r}")
    if not 0 <= int(vals["seed"]) < 2 ** 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return RunConfig(int(vals["seed"]), vals["format"], bool(vals["noncommutative"]), vals["out"],
                     max(1, int(vals["jobs"])))


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SYMFORMULA_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and EXIT_USAGE
    try:
        cfg = _config(args)
        payload, rows, code = COMMANDS[args.command](args, cfg)
    except FormulaParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, StructuralError, bounds.BoundPreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.format == "text" and args.command == "table":
        text = render_table_text(rows)
    elif cfg.format == "text" and args.command == "build":
        text = render(payload, [{k: v for k, v in payload.items() if k != "formula"}], "text") + payload["formula"] + "\n"
    else:
        text = render(payload, rows, cfg.format)
    _emit(text, cfg.out)
    log.info("%s exited with %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
