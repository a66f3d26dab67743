"""Command-line front end.

Exit codes: 0 success, 1 input could not be parsed, 2 some computation
failed, 64 usage error.  Batch output is JSON lines with sorted keys,
written in input order.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .errors import InputError, KRLError

EXIT_OK, EXIT_PARSE, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2, 64
P_MAX_GUARD = 1000

PLOT_HELP = """CSV columns: layer,x,y.  Layers: reducible_axis (endpoints of the
segment lambda* = 0), dk_points (x = alpha/pi for each root of Delta on the
unit circle), lens_<s> (segment endpoints, two rows per line, of the lines of
slope s through (n/|s|, 0) clipped to 0 <= x <= 1)."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _out(line: str, fh=None):
    (fh or sys.stdout).write(line + "\n")


def _parse_knot(s: str):
    from .knots import parse_knot_spec
    return parse_knot_spec(s)


def _lens_list(s: Optional[str]):
    if not s:
        return ()
    return tuple(int(x) for x in s.split(",") if x.strip())


# ---------------------------------------------------------------------------
# report

def _report_one(args):
    K, n_max, lens = args
    from .report import knot_report
    try:
        return knot_report(K, n_max=n_max, lens=lens)
    except KRLError as e:
        return {"knot": K.label(), "errors": [{"stage": "report", "error": type(e).__name__,
                                               "message": str(e)}]}


def cmd_report(a) -> int:
    from .knots import load_catalog
    from .report import dumps, render_figures
    knots = []
    try:
        for s in a.knot or []:
            knots.append(_parse_knot(s))
        if a.catalog:
            knots.extend(load_catalog(a.catalog))
    except (InputError, ValueError) as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except OSError as e:
        sys.stderr.write(f"cannot read catalog: {e}\n")
        return EXIT_PARSE
    if not knots:
        raise UsageError("report needs --knot or --catalog")
    lens = _lens_list(a.lens)
    jobs = [(K, a.n_max, lens) for K in knots]
    reports = _map(_report_one, jobs, a.workers)
    fh = open(a.out, "w") if a.out else None
    figdir = a.figures
    if figdir is None:
        figdir = os.path.join(os.path.dirname(os.path.abspath(a.out)) if a.out else os.getcwd(),
                              "krl-figures")
    failed = False
    try:
        for K, r in zip(knots, reports):
            if r["errors"]:
                failed = True
            if not a.no_figures:
                r["figures"] = render_figures(K, r, figdir, lens)
            _out(dumps(r), fh)
    finally:
        if fh:
            fh.close()
    return EXIT_COMPUTE if failed else EXIT_OK


def _map(fn, jobs, workers: int):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------------------
# riley and the 2-bridge sweep

def _parse_fraction(s: str):
    p, _, q = s.replace(",", "/").partition("/")
    return int(p), int(q)


def _riley_one(args):
    p, q, prec = args
    from .riley import enhanced_riley_mod2
    try:
        return enhanced_riley_mod2(p, q, prec=prec)
    except KRLError as e:
        return {"p": p, "q": q, "error": type(e).__name__, "message": str(e)}


def cmd_riley(a) -> int:
    from .riley import riley_data
    from .report import dumps
    try:
        p, q = _parse_fraction(a.fraction)
    except ValueError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    try:
        rd = riley_data(p, q)
    except InputError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    out = {"p": p, "q": q, "degree": rd.degree, "real_root_count": len(rd.real_roots)}
    if a.heights or a.mod2:
        r = _riley_one((p, q, a.precision_bits))
        if "error" in r:
            out.update(error=r["error"], message=r["message"])
            _out(dumps(out))
            return EXIT_COMPUTE
        keys = ("heights", "longitude_trace_ok", "precision_bits")
        if a.mod2:
            keys += ("mod2", "conjectured_mod2", "mod2_verdict", "sigma", "mismatched_heights")
        out.update({k: r[k] for k in keys})
    if a.polynomial:
        out["polynomial"] = str(rd.poly)
    _out(dumps(out))
    return EXIT_OK


def cmd_sweep(a) -> int:
    from .knots import two_bridge_representatives
    from .report import dumps
    if a.p_max < 3:
        raise UsageError("--p-max must be at least 3")
    if a.p_max > P_MAX_GUARD and not a.force:
        raise UsageError(f"--p-max above {P_MAX_GUARD} needs --force")
    # p <= p_max; p is odd, so for even p_max this is the same as p < p_max
    reps = list(two_bridge_representatives(a.p_max + 1))
    if a.count_only:
        _out(dumps({"p_max": a.p_max, "representatives": len(reps)}))
        return EXIT_OK
    results = _map(_riley_one, [(p, q, a.precision_bits) for p, q in reps], a.workers)
    fails = [r for r in results if r.get("mod2_verdict") != "pass"]
    if a.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["p", "q", "sigma", "degree", "real_root_count", "mod2_verdict", "precision_bits"])
        for r in results:
            w.writerow([r["p"], r["q"], r.get("sigma"), r.get("degree"), r.get("real_root_count"),
                        r.get("mod2_verdict", r.get("error")), r.get("precision_bits")])
    elif a.verbose:
        for r in results:
            _out(dumps(r))
    _out(dumps({"summary": {"p_max": a.p_max, "knots": len(reps), "passed": len(reps) - len(fails),
                            "failures": [{"p": r["p"], "q": r["q"],
                                          "reason": r.get("error") or r.get("mismatched_heights")}
                                         for r in fails]}}))
    return EXIT_COMPUTE if fails else EXIT_OK


# ---------------------------------------------------------------------------
# lo, plot, verify-geom

def cmd_lo(a) -> int:
    from .report import dumps
    from .knots import TwoBridge, alexander
    from .lin import h_rule, is_known
    from .locus import (branched_refined, branched_threshold, emit_pillowcase_data,
                        first_certified_n, lens_arc_analysis, two_bridge_lo)
    from .signatures import signature_function
    try:
        K = _parse_knot(a.knot)
    except (InputError, ValueError) as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    out = {"knot": K.label()}
    try:
        sf = signature_function(K)
        h, prov = h_rule(K)
        if not sf.is_constant():
            out["branched_threshold"] = branched_threshold(sf)
            out["branched_first_certified_n"] = first_certified_n(sf)
        if is_known(h):
            out["h"] = h
            out["branched_refined"] = sorted(branched_refined(sf, h, a.branched))
        if isinstance(K.presentation, TwoBridge) and sf.at_minus_one() != 0:
            out["two_bridge"] = two_bridge_lo(K.presentation.p, K.presentation.q).to_json()
        lens = _lens_list(a.lens)
        if lens:
            out["lens"] = [lens_arc_analysis(alexander(K), abs(p)).to_json() for p in lens]
        if a.plot:
            emit_pillowcase_data(K, a.plot, lens)
            out["plot"] = a.plot
    except KRLError as e:
        out["error"] = type(e).__name__
        out["message"] = str(e)
        _out(dumps(out))
        return EXIT_COMPUTE
    _out(dumps(out))
    return EXIT_OK


def cmd_plot(a) -> int:
    from .locus import emit_pillowcase_data
    if not a.out:
        raise UsageError("plot needs an output path (--out)")
    try:
        K = _parse_knot(a.knot)
    except (InputError, ValueError) as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    try:
        emit_pillowcase_data(K, a.out, _lens_list(a.lens))
    except OSError as e:
        sys.stderr.write(f"cannot write {a.out}: {e}\n")
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_verify_geom(a) -> int:
    from .geomcore import verify_identities
    from .report import dumps
    rows = verify_identities(a.samples, a.seed, a.workers)
    if a.format == "json":
        for r in rows:
            _out(dumps(r.to_json()))
    else:
        w = max(len(r.name) for r in rows)
        _out(f"{'identity'.ljust(w)}  {'max residual':>12}  {'tol':>8}  result")
        for r in rows:
            _out(f"{r.name.ljust(w)}  {r.max_residual:12.3e}  {r.tolerance:8.0e}  {'pass' if r.ok else 'FAIL'}")
    return EXIT_OK if all(r.ok for r in rows) else EXIT_COMPUTE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="krl", description="Casson-Lin type invariants, signatures and SL2R representations of knots.")
    ap.add_argument("--precision-bits", type=int, default=256, help="starting precision for certified numerics")
    ap.add_argument("--workers", type=int, default=1, help="size of the worker pool for batch commands")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("json", "csv", "table"), default="json")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("report", help="per-knot invariant report (JSON lines) and figures")
    r.add_argument("--knot", action="append", help="knot spec, e.g. torus:2,3 or 2bridge:5/3 or raw:\"t-1+t^-1\"")
    r.add_argument("--catalog", help="JSON-lines catalog of knot descriptors")
    r.add_argument("--out", help="write JSON lines here instead of stdout")
    r.add_argument("--figures", help="directory for figures (default: krl-figures next to the output)")
    r.add_argument("--no-figures", action="store_true")
    r.add_argument("--n-max", type=int, default=40, help="largest n for the refined branched cover check")
    r.add_argument("--lens", help="comma separated p for the lens arc analysis")
    r.set_defaults(func=cmd_report)

    r = sub.add_parser("riley", help="Riley polynomial, real parabolics and heights of K(p/q)")
    r.add_argument("fraction", help="P/Q")
    r.add_argument("--heights", action="store_true")
    r.add_argument("--mod2", action="store_true")
    r.add_argument("--polynomial", action="store_true", help="include the polynomial itself")
    r.set_defaults(func=cmd_riley)

    r = sub.add_parser("sweep-2bridge", help="enhanced Riley check mod 2 over 2-bridge knots with p <= P_MAX")
    r.add_argument("--p-max", type=int, required=True)
    r.add_argument("--count-only", action="store_true", help="only count the canonical representatives")
    r.add_argument("--verbose", action="store_true", help="one JSON line per knot before the summary")
    r.add_argument("--force", action="store_true", help=f"allow --p-max above {P_MAX_GUARD}")
    r.set_defaults(func=cmd_sweep)

    r = sub.add_parser("lo", help="left-orderability consequences: branched covers, lens arcs, 2-bridge")
    r.add_argument("knot")
    r.add_argument("--branched", type=int, default=40, metavar="N", help="check cyclic branched covers up to N")
    r.add_argument("--lens", metavar="P", help="comma separated lens surgery coefficients")
    r.add_argument("--plot", metavar="OUT.csv", help="also write pillowcase CSV data. " + PLOT_HELP)
    r.set_defaults(func=cmd_lo)

    r = sub.add_parser("verify-geom", help="seeded numerical checks of the matrix identities")
    r.add_argument("--samples", type=int, default=1000)
    r.set_defaults(func=cmd_verify_geom)

    r = sub.add_parser("plot", help="pillowcase CSV data", description=PLOT_HELP)
    r.add_argument("knot")
    r.add_argument("--out", help="CSV output path")
    r.add_argument("--lens", help="comma separated line slopes, e.g. 18,19")
    r.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    # global flags may also follow the subcommand
    argv = list(sys.argv[1:] if argv is None else argv)
    a = ap.parse_args(_hoist_globals(argv))
    if not a.command:
        ap.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return a.func(a)
    except UsageError as e:
        sys.stderr.write(f"krl {a.command}: usage error: {e}\n")
        return EXIT_USAGE


_GLOBALS = {"--precision-bits": True, "--workers": True, "--seed": True, "--format": True}
_COMMANDS = ("report", "riley", "sweep-2bridge", "lo", "verify-geom", "plot")


def _hoist_globals(argv):
    """Move global options appearing after the subcommand in front of it."""
    if not any(c in argv for c in _COMMANDS):
        return argv
    i = next(k for k, x in enumerate(argv) if x in _COMMANDS)
    tail, moved = [], []
    rest = argv[i + 1:]
    k = 0
    while k < len(rest):
        x = rest[k]
        key = x.split("=", 1)[0]
        if key in _GLOBALS:
            if "=" in x:
                moved.append(x)
            elif k + 1 < len(rest):
                moved += [x, rest[k + 1]]
                k += 1
            k += 1
            continue
        tail.append(x)
        k += 1
    return argv[:i] + moved + argv[i:i + 1] + tail


if __name__ == "__main__":
    sys.exit(main())
