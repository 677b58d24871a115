"""The ``gridlab`` command line."""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from fractions import Fraction
from typing import Callable, List, Optional

from . import catalog
from .cache import ResultCache, cache_key, dumps
from .complexes import FLAVORS, ComplexError, check_tables, crossing_package, differential_map, graded_package_reports
from .algebra import compose
from .grid import GridDiagram, GridFormatError, NotAKnotError, detect_cross_commutation, parse_grid, trace_components
from .homology import (
    CertificateError,
    default_depth,
    homology_table,
    lbound,
    load_certificate,
    tilde_bigraded,
    tilde_dim,
    torsion_order,
)
from .states import StateCapError, gradings, nwo_state, set_state_cap, state_list


class UsageError(Exception):
    """Bad input file, unknown catalog entry or exceeded cap: exit code 2."""


class Failure(Exception):
    """A verification failed; the message goes to stdout, exit code 1."""

    def __init__(self, doc: dict):
        super().__init__("verification failed")
        self.doc = doc


# ------------------------------------------------------------------ inputs

def read_grid_text(arg: str) -> str:
    if os.path.exists(arg):
        try:
            with open(arg) as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc}") from None
    try:
        return catalog.text(os.path.basename(arg))
    except KeyError:
        raise UsageError(f"no such file or catalog grid: {arg}") from None


def load_grid(arg: str, args) -> GridDiagram:
    try:
        g = parse_grid(read_grid_text(arg))
    except GridFormatError as exc:
        raise UsageError(f"{arg}: {exc}") from None
    if g.n > args.max_n:
        raise UsageError(f"{arg}: n={g.n} exceeds the cap {args.max_n} (use --max-n)")
    return g


def _num(a: Fraction):
    return int(a) if a.denominator == 1 else str(a)


def _cached(args, op: str, grids: List[GridDiagram], params: dict, compute: Callable[[], dict]) -> dict:
    cache = ResultCache(enabled=not args.no_cache)
    key = cache_key(op, [g.serialize() for g in grids], params)
    text, _ = cache.fetch(key, lambda: dumps(compute()))
    return json.loads(text)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> dict:
    try:
        g = parse_grid(read_grid_text(args.grid))
    except GridFormatError as exc:
        raise Failure({"ok": False, "error": str(exc), "line": exc.line, "field": exc.field}) from None
    k = trace_components(g)
    return {"ok": True, "n": g.n, "components": k, "knot": k == 1}


def text_validate(doc: dict) -> str:
    if not doc["ok"]:
        return f"INVALID: {doc['error']}"
    what = "knot" if doc["knot"] else f"link with {doc['components']} components"
    return f"OK: {what}, n={doc['n']}"


def cmd_gradings(args) -> dict:
    g = load_grid(args.grid, args)
    if args.state:
        try:
            x = tuple(int(t) for t in args.state.split(","))
        except ValueError:
            raise UsageError(f"bad state {args.state!r}") from None
        if sorted(x) != list(range(g.n)):
            raise UsageError(f"state {args.state!r} is not a permutation of 0..{g.n - 1}")
        xs = [x]
    else:
        xs = list(state_list(g))
    rows = []
    for x in xs:
        mo, mx, a = gradings(g, x)
        rows.append({"state": list(x), "M": mo, "M_X": mx, "A": _num(a)})
    return {"grid_hash": g.digest(), "gradings": rows}


def text_gradings(doc: dict) -> str:
    out = ["state\tM\tM_X\tA"]
    for r in doc["gradings"]:
        out.append(f"{','.join(map(str, r['state']))}\t{r['M']}\t{r['M_X']}\t{r['A']}")
    return "\n".join(out)


def cmd_states(args) -> dict:
    g = load_grid(args.grid, args)
    hist = Counter()
    for x in state_list(g):
        mo, _, a = gradings(g, x)
        hist[(mo, a)] += 1
    nwo = nwo_state(g)
    mo, _, a = gradings(g, nwo)
    return {
        "grid_hash": g.digest(),
        "count": len(state_list(g)),
        "nwo": {"state": list(nwo), "M": mo, "A": _num(a)},
        "bigradings": [[m, _num(a), k] for (m, a), k in sorted(hist.items())],
    }


def text_states(doc: dict) -> str:
    nwo = doc["nwo"]
    out = [f"states: {doc['count']}",
           f"NWO: {','.join(map(str, nwo['state']))} M={nwo['M']} A={nwo['A']}",
           "M\tA\tcount"]
    out += [f"{m}\t{a}\t{k}" for m, a, k in doc["bigradings"]]
    return "\n".join(out)


def cmd_check_d2(args) -> dict:
    g = load_grid(args.grid, args)
    flavors = FLAVORS if args.flavor == "all" else (args.flavor,)

    def compute() -> dict:
        checks = []
        for fl in flavors:
            _progress(f"[check d2] {fl}")
            d = differential_map(g, fl, jobs=args.jobs)
            dd = compose(d, d)
            checks.append({"flavor": fl, "terms": sum(len(c) for c in d.cols.values()), "passed": dd.is_zero()})
        return {"grid_hash": g.digest(), "checks": checks, "passed": all(c["passed"] for c in checks)}

    doc = _cached(args, "check-d2", [g], {"flavors": list(flavors)}, compute)
    if not doc["passed"]:
        raise Failure(doc)
    return doc


def text_check_d2(doc: dict) -> str:
    return "\n".join(f"d^2 = 0 [{c['flavor']}]: {'PASS' if c['passed'] else 'FAIL'} ({c['terms']} terms)"
                     for c in doc["checks"])


def cmd_crossing_check(args) -> dict:
    a = load_grid(args.grid_a, args)
    b = load_grid(args.grid_b, args)
    if detect_cross_commutation(a, b) is None:
        raise UsageError("the two grids are not related by a cross-commutation")

    def compute() -> dict:
        _progress("[crossing] building maps and running checks")
        pkg = crossing_package(a, b, strict=False)
        doc = pkg.report_json()
        extra = [check_tables(pkg.cd)] + graded_package_reports(pkg)
        doc["checks"] += [r.to_json() for r in extra]
        doc["plus_is_first"] = pkg.cd.plus_is_a
        doc["passed"] = all(c["passed"] for c in doc["checks"])
        return doc

    doc = _cached(args, "crossing-check", [a, b], {}, compute)
    if not doc["passed"]:
        raise Failure(doc)
    return doc


def text_crossing_check(doc: dict) -> str:
    first = "first" if doc["plus_is_first"] else "second"
    out = [f"cross-commutation at column {doc['column']}; G+ is the {first} grid; "
           f"V1 is the variable of O row {doc['v1_row']}"]
    for c in doc["checks"]:
        line = f"{c['name']}: {'PASS' if c['passed'] else 'FAIL'}"
        if c["detail"]:
            line += f" ({c['detail']})"
        if c["histogram"]:
            line += " shifts " + " ".join(f"({k}):{v}" for k, v in c["histogram"].items())
        if c["witness"]:
            line += f" witness={json.dumps(c['witness'], sort_keys=True)}"
        out.append(line)
    out.append("ALL PASS" if doc["passed"] else "FAILED")
    return "\n".join(out)


def _knot(g: GridDiagram, arg: str) -> None:
    if trace_components(g) != 1:
        raise UsageError(f"{arg}: a knot is required, got a link")


def cmd_homology(args) -> dict:
    g = load_grid(args.grid, args)
    _knot(g, args.grid)
    floor, _ = default_depth(g, args.engine)
    s_lo = floor - args.rows if args.s_lo is None else args.s_lo

    def compute() -> dict:
        t = homology_table(g, s_lo, engine=args.engine, progress=True, jobs=args.jobs)
        doc = t.to_json()
        doc["grid_hash"] = g.digest()
        doc["s_lo"] = s_lo
        return doc

    return _cached(args, "homology", [g], {"engine": args.engine, "s_lo": s_lo}, compute)


def text_homology(doc: dict) -> str:
    ranks = {(d, s): k for d, s, k in doc["u_ranks"]}
    out = [f"engine: {doc['engine']}; rows s >= {doc['s_lo']}", "d\ts\tdim\trank U"]
    for d, s, k in sorted(doc["dims"], key=lambda r: (-r[1], -r[0])):
        u = ranks.get((d, s), 0) if s > doc["s_lo"] else "-"
        out.append(f"{d}\t{s}\t{k}\t{u}")
    return "\n".join(out)


def cmd_torsion(args) -> dict:
    g = load_grid(args.grid, args)
    _knot(g, args.grid)

    def compute() -> dict:
        t = torsion_order(g, engine=args.engine, max_B=args.max_b, progress=True,
                          full_window=args.full_window, jobs=args.jobs)
        doc = t.to_json()
        doc["grid_hash"] = g.digest()
        return doc

    params = {"engine": args.engine, "max_b": args.max_b, "full_window": args.full_window}
    doc = _cached(args, "torsion", [g], params, compute)
    if doc["status"] != "ok":
        raise Failure(doc)
    return doc


def text_torsion(doc: dict) -> str:
    if doc["status"] != "ok":
        return f"torsion order: inconclusive (no stabilization up to B={doc['B']})"
    out = [f"torsion order: {doc['torsion_order']}",
           f"engine: {doc['engine']}; window s in [{doc['window'][0]}, {doc['window'][1]}], "
           f"source floor {doc['source_floor']}, B={doc['B']}"]
    for d, s, k, order in doc["torsion"]:
        out.append(f"torsion at (d,s)=({d},{s}): dim {k}, order {order}")
    st = doc["stabilization"]
    rows = ", ".join(f"s={s}:{v}" for s, v in st["rows"].items())
    out.append(f"stabilization: expected {st['expected_towers']} per row; {rows}")
    return "\n".join(out)


def cmd_tilde(args) -> dict:
    g = load_grid(args.grid, args)

    def compute() -> dict:
        _progress("[tilde] computing")
        doc = {"grid_hash": g.digest(), "n": g.n, "dim": tilde_dim(g),
               "unknot_dim": 2 ** (g.n - 1)}
        doc["unknot"] = trace_components(g) == 1 and doc["dim"] == doc["unknot_dim"]
        if args.bigraded:
            doc["bigraded"] = [[m, a, k] for (m, a), k in sorted(tilde_bigraded(g).items())]
        return doc

    return _cached(args, "tilde", [g], {"bigraded": args.bigraded}, compute)


def text_tilde(doc: dict) -> str:
    out = [f"tilde homology: dim {doc['dim']} (unknot value 2^(n-1) = {doc['unknot_dim']}; "
           f"{'passes' if doc['unknot'] else 'fails'} the unknot test)"]
    for m, a, k in doc.get("bigraded", []):
        out.append(f"(M,A)=({m},{a}): {k}")
    return "\n".join(out)


def _read_certificate(arg: str):
    path = arg
    if not os.path.exists(path):
        try:
            path = str(catalog.certificate_path(os.path.basename(arg)))
        except KeyError:
            raise UsageError(f"no such file or catalog certificate: {arg}") from None
    try:
        with open(path) as fh:
            text = fh.read()
        cert = load_certificate(text, os.path.dirname(os.path.abspath(path)))
    except (OSError, ValueError, KeyError, TypeError, GridFormatError) as exc:
        if isinstance(exc, CertificateError):
            raise
        raise UsageError(f"{arg}: unreadable certificate ({exc})") from None
    return cert


def cmd_lbound(args) -> dict:
    try:
        cert = _read_certificate(args.certificate)
    except CertificateError as exc:
        raise Failure({"error": str(exc)}) from None
    for g in cert.grids:
        if g.n > args.max_n:
            raise UsageError(f"n={g.n} exceeds the cap {args.max_n} (use --max-n)")

    def compute() -> dict:
        try:
            rep = lbound(cert, engine=args.engine, progress=True, jobs=args.jobs)
        except (CertificateError, NotAKnotError) as exc:
            return {"error": str(exc)}
        return rep.to_json()

    params = {"engine": args.engine, "direction": cert.directions}
    doc = _cached(args, "lbound", cert.grids, params, compute)
    if "error" in doc or doc["falsification"] or doc["lower"] is None:
        raise Failure(doc)
    return doc


def text_lbound(doc: dict) -> str:
    if "error" in doc:
        return f"certificate rejected: {doc['error']}"
    if doc["lower"] is None:
        return "torsion order inconclusive; no lower bound"
    if doc["falsification"]:
        return f"FALSIFICATION: torsion order {doc['lower']} exceeds the certified bound {doc['upper']}"
    ev = doc["evidence"]
    verdict = f"l = {doc['lower']} (exact)" if doc["exact"] else f"{doc['lower']} <= l <= {doc['upper']}"
    return "\n".join([verdict,
                      f"composite residual zero: {ev['residual_zero']}; monomial {ev['monomial']}",
                      f"torsion window s in [{ev['torsion_window'][0]}, {ev['torsion_window'][1]}]"])


def cmd_catalog_list(args) -> dict:
    entries = []
    for name in catalog.names():
        g = catalog.load(name)
        entries.append({"name": name, "n": g.n, "description": catalog.DESCRIPTIONS[name]})
    return {"grids": entries}


def text_catalog_list(doc: dict) -> str:
    return "\n".join(f"{e['name']}\tn={e['n']}\t{e['description']}" for e in doc["grids"])


def cmd_catalog_show(args) -> dict:
    try:
        text = catalog.text(args.name)
    except KeyError:
        raise UsageError(f"no catalog grid {args.name!r}") from None
    return {"name": args.name, "grid": text}


def text_catalog_show(doc: dict) -> str:
    return doc["grid"].rstrip("\n")


# ------------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser, top: bool) -> None:
    dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=dflt(False), help="machine-readable output")
    p.add_argument("--max-n", type=int, default=dflt(7), help="cap on the grid number (default 7)")
    p.add_argument("--no-cache", action="store_true", default=dflt(False), help="bypass the result cache")
    p.add_argument("--jobs", type=int, default=dflt(1), help="worker processes for state parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridlab", description="Grid homology and crossing-change checks.")
    _common(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(parent, name, func, text, help_):
        p = parent.add_parser(name, help=help_)
        _common(p, False)
        p.set_defaults(func=func, text=text)
        return p

    p = add(sub, "validate", cmd_validate, text_validate, "parse a grid file")
    p.add_argument("grid")
    p = add(sub, "gradings", cmd_gradings, text_gradings, "Maslov and Alexander gradings of states")
    p.add_argument("grid")
    p.add_argument("--state", help="one state as comma-separated rows")
    p = add(sub, "states", cmd_states, text_states, "state count and bigrading histogram")
    p.add_argument("grid")

    check = sub.add_parser("check", help="consistency checks")
    csub = check.add_subparsers(dest="check", required=True)
    p = add(csub, "d2", cmd_check_d2, text_check_d2, "verify d^2 = 0")
    p.add_argument("grid")
    p.add_argument("--flavor", choices=("all",) + FLAVORS, default="all")

    crossing = sub.add_parser("crossing", help="crossing-change maps")
    xsub = crossing.add_subparsers(dest="crossing", required=True)
    p = add(xsub, "check", cmd_crossing_check, text_crossing_check, "build and verify the crossing package")
    p.add_argument("grid_a")
    p.add_argument("grid_b")

    p = add(sub, "homology", cmd_homology, text_homology, "bigraded homology slices")
    p.add_argument("grid")
    p.add_argument("--engine", choices=("multivariable", "collapsed"), default="multivariable")
    p.add_argument("--s-lo", type=int, help="lowest Alexander row")
    p.add_argument("--rows", type=int, default=2, help="rows below the source floor (default 2)")

    p = add(sub, "torsion", cmd_torsion, text_torsion, "U-torsion order")
    p.add_argument("grid")
    p.add_argument("--engine", choices=("multivariable", "collapsed"), default="multivariable")
    p.add_argument("--max-b", type=int, help="largest window depth before giving up")
    p.add_argument("--full-window", action="store_true", help="start the sources at the lowest Alexander grading")

    p = add(sub, "tilde", cmd_tilde, text_tilde, "tilde homology dimension")
    p.add_argument("grid")
    p.add_argument("--bigraded", action="store_true")

    p = add(sub, "lbound", cmd_lbound, text_lbound, "certified interval for the crossing-change bound")
    p.add_argument("certificate")
    p.add_argument("--engine", choices=("multivariable", "collapsed"), default="multivariable")

    cat = sub.add_parser("catalog", help="bundled grids")
    ksub = cat.add_subparsers(dest="catalog", required=True)
    add(ksub, "list", cmd_catalog_list, text_catalog_list, "list catalog grids")
    p = add(ksub, "show", cmd_catalog_show, text_catalog_show, "print a catalog grid")
    p.add_argument("name")
    return parser


def _emit(args, doc: dict) -> None:
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        sys.stdout.write(args.text(doc) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1 or args.max_n < 1:
        parser.error("--jobs and --max-n must be positive")
    set_state_cap(args.max_n)
    try:
        doc = args.func(args)
    except Failure as f:
        _emit(args, f.doc)
        return 1
    except (UsageError, StateCapError) as exc:
        print(f"gridlab: error: {exc}", file=sys.stderr)
        return 2
    except ComplexError as exc:
        print(f"gridlab: {exc}", file=sys.stderr)
        return 1
    _emit(args, doc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
