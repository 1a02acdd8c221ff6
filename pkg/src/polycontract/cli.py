"""Command-line front end.

Exit codes: 0 every check passed, 1 a mathematical check failed,
2 the input could not be used.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .certsearch import DEFAULT_LAMBDA_TOL, reverify, synthesize_almost, synthesize_polynomial
from .contraction import (
    AlmostPolynomialCertificate,
    PolynomialCertificate,
    check_lower_bound_condition,
    verify_almost_contraction,
    verify_almost_polynomial,
    verify_banach,
    verify_kannan,
    verify_polynomial,
)
from .demos import DOCUMENTS, RUNNERS
from .document import KINDS, digest, from_dict, load
from .errors import InputError
from .exprlang import ParseError
from .mapping import TableMap
from .picard import check_bound_against_trace, iterate, sigma_j0
from .rational import format_rational, parse_rational

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _fmt(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


def _resolve(source: str):
    """A path to a problem document, or the name of a built-in example."""
    if not os.path.exists(source) and source in DOCUMENTS:
        return from_dict(DOCUMENTS[source])
    return load(source)


def _report(command: str, doc=None, **body) -> dict:
    rep = {"tool": "polycontract", "version": __version__, "command": command}
    if doc is not None:
        rep["input"] = {"name": doc.name, "kind": doc.kind, "digest": doc.digest}
    rep.update(body)
    return rep


def _metric_section(doc):
    verdict = doc.space.validate()
    section = {"valid": verdict.valid}
    if verdict.violation is not None:
        section["violation"] = verdict.violation.to_dict()
    return verdict.valid, section


def cmd_validate(args) -> tuple:
    doc = _resolve(args.document)
    ok, metric = _metric_section(doc)
    body = {"metric": metric}
    closure = getattr(doc.T, "check_closure", None)
    if closure is not None:
        escape = closure()
        body["map_closed"] = escape is None
        if escape is not None:
            body["map_escape"] = _fmt(list(escape))
            ok = False
    return (EXIT_PASS if ok else EXIT_FAIL), _report("validate", doc, status="valid" if ok else "invalid", **body)


def _verify(doc, kind: str) -> dict:
    X, T, cert = doc.space, doc.T, doc.certificate
    if kind == "banach":
        return {"verdict": verify_banach(X, T).to_dict()}
    if kind == "kannan":
        return {"verdict": verify_kannan(X, T).to_dict()}
    if kind == "almost":
        if not isinstance(cert, tuple):
            raise InputError("kind 'almost' needs a certificate with lambda and ell")
        lam, ell = cert
        return {"verdict": verify_almost_contraction(X, T, lam, ell).to_dict()}
    want = AlmostPolynomialCertificate if kind == "almost-polynomial" else PolynomialCertificate
    if type(cert) is not want:
        raise InputError(f"kind {kind!r} needs a matching certificate")
    v = verify_polynomial(X, T, cert) if kind == "polynomial" else verify_almost_polynomial(X, T, cert)
    lower = check_lower_bound_condition(X, cert.family, cert.witness_j)
    witness_ok = lower is not None and lower >= cert.witness_Aj
    return {
        "verdict": v.to_dict(),
        "lower_bound": {
            "j": cert.witness_j,
            "A_j": format_rational(cert.witness_Aj),
            "observed_min": None if lower is None else format_rational(lower),
            "holds": witness_ok,
        },
    }


def cmd_verify(args) -> tuple:
    doc = _resolve(args.document)
    kind = args.kind or doc.kind
    ok, metric = _metric_section(doc)
    body = {"metric": metric, "check": kind}
    if ok:
        body.update(_verify(doc, kind))
        ok = body["verdict"]["status"] == "pass" and body.get("lower_bound", {}).get("holds", True)
    return (EXIT_PASS if ok else EXIT_FAIL), _report("verify", doc, status="pass" if ok else "fail", **body)


def cmd_iterate(args) -> tuple:
    doc = _resolve(args.document)
    if args.start is None:
        raise InputError("--start is required")
    start = args.start if isinstance(doc.T, TableMap) else parse_rational(args.start)
    trace = iterate(doc.space, doc.T, start, tolerance=args.tolerance, max_iter=args.max_iter)
    body = {"trace": trace.to_dict()}
    ok = trace.converged
    if args.bound_check:
        cert = doc.certificate
        if not isinstance(cert, PolynomialCertificate):
            raise InputError("--bound-check needs a polynomial or almost-polynomial certificate")
        if ok:
            sigma = sigma_j0(doc.space, doc.T, cert.family, cert.witness_j, cert.witness_Aj, trace.iterates[0])
            rep = check_bound_against_trace(trace, cert.witness_j, cert.lam, sigma)
            body["bound"] = rep.to_dict()
            ok = rep.ok
    return (EXIT_PASS if ok else EXIT_FAIL), _report("iterate", doc, status=trace.status, **body)


def cmd_search(args) -> tuple:
    doc = _resolve(args.document)
    if doc.space.kind != "finite":
        raise InputError("search is only supported on finite spaces")
    target = args.target or ("almost" if doc.kind in ("almost", "almost-polynomial") else "polynomial")
    k = args.k if args.k is not None else (doc.family.k if doc.family is not None else 1)
    tol = parse_rational(args.lambda_tol)
    if target == "almost":
        result = synthesize_almost(doc.space, doc.T, k, lambda_tol=tol)
    else:
        result = synthesize_polynomial(doc.space, doc.T, k, mode=args.mode, lambda_tol=tol)
    body = {"target": target, "k": k, "mode": args.mode if target == "polynomial" else None, "result": result.to_dict()}
    ok = result.found
    if ok:
        check = reverify(doc.space, doc.T, result)
        body["reverify"] = check.to_dict()
        ok = check.passed
    return (EXIT_PASS if ok else EXIT_FAIL), _report("search", doc, status=result.status, **body)


def cmd_demo(args) -> tuple:
    if args.name not in RUNNERS:
        raise InputError(f"unknown demo {args.name!r}; choose from {', '.join(RUNNERS)}")
    res = RUNNERS[args.name]()
    raw = DOCUMENTS[args.name]
    body = {
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in res.checks],
        "tables": [{"title": t, "headers": h, "rows": [[str(v) for v in r] for r in rows]} for t, h, rows in res.tables],
    }
    rep = _report("demo", None, status="pass" if res.passed else "fail", demo=args.name, **body)
    rep["input"] = {"name": args.name, "kind": raw["kind"], "digest": digest(raw)}
    return (EXIT_PASS if res.passed else EXIT_FAIL), rep


# human rendering


def _table(headers, rows) -> list:
    cells = [list(map(str, headers))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return lines


def render_human(rep: dict) -> str:
    out = [f"polycontract {rep['version']} {rep['command']}: {rep.get('status', '')}"]
    if "input" in rep:
        i = rep["input"]
        out.append(f"input: {i['name'] or '-'} ({i['kind']}) {i['digest']}")
    if "error" in rep:
        out.append(f"error: {rep['error']}")
    metric = rep.get("metric")
    if metric:
        out.append(f"metric: {'valid' if metric['valid'] else 'INVALID'}")
        v = metric.get("violation")
        if v:
            out.append(f"  {v['kind']} violation at {tuple(v['witness'])}: {v['left']} vs {v['right']}")
    if "map_closed" in rep:
        out.append(f"map stays in space: {rep['map_closed']}" + (f" (escape {rep['map_escape']})" if "map_escape" in rep else ""))
    v = rep.get("verdict")
    if v:
        out.append(f"{v['kind']}: {v['status']} at lambda={v['lambda']} ({v['pairs_checked']} pairs)")
        out.append(f"  worst pair {v['worst_pair']}: lhs {v['lhs']}, rhs {v['rhs']}, bound {v['bound']}")
        out.append(f"  min feasible lambda: {v['min_feasible_lambda']}")
    lb = rep.get("lower_bound")
    if lb:
        out.append(f"lower bound a_{lb['j']} >= {lb['A_j']}: {'holds' if lb['holds'] else 'FAILS'} (min {lb['observed_min']})")
    t = rep.get("trace")
    if t:
        out.append(f"orbit: {' -> '.join(map(str, t['iterates']))}")
        out.append(f"limit: {t['limit']} after {t['steps']} steps")
    b = rep.get("bound")
    if b:
        out.append(f"a-priori bound (j={b['j']}, lambda={b['lambda']}, sigma={b['sigma']}, {b['assertion']}):")
        out.extend("  " + line for line in _table(["n", "observed", "bound"], [[r["n"], r["observed"], r["bound"]] for r in b["rows"]]))
        if b["violations"] or b["step_violations"]:
            out.append(f"  violations at n={b['violations']}, step violations at n={b['step_violations']}")
    r = rep.get("result")
    if r:
        out.append(f"synthesis ({rep['target']}, k={rep['k']}): {r['status']} lambda={r['lambda']} after {len(r['probes'])} probes")
        if r["certificate"]:
            out.append("  certificate: " + json.dumps(r["certificate"], sort_keys=True))
    if "reverify" in rep:
        out.append(f"re-verification: {rep['reverify']['status']}")
    for table in rep.get("tables", []):
        out.append("")
        out.append(table["title"])
        out.extend("  " + line for line in _table(table["headers"], table["rows"]))
    if rep.get("checks"):
        out.append("")
        for c in rep["checks"]:
            out.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
    return "\n".join(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polycontract", description="Exact checks for polynomial contraction certificates.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the metric axioms and document well-formedness")
    s.add_argument("document", help="problem document path or built-in example name")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("verify", parents=[common], help="check a contraction certificate at every pair")
    s.add_argument("document")
    s.add_argument("--kind", choices=KINDS, help="override the document kind")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("iterate", parents=[common], help="run Picard iteration from a start point")
    s.add_argument("document")
    s.add_argument("--start")
    s.add_argument("--tolerance", default="0")
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--bound-check", action="store_true")
    s.set_defaults(func=cmd_iterate)

    s = sub.add_parser("search", parents=[common], help="synthesise a certificate by bisection on lambda")
    s.add_argument("document")
    s.add_argument("--k", type=int)
    s.add_argument("--mode", choices=("constant", "full"), default="full")
    s.add_argument("--target", choices=("polynomial", "almost"))
    s.add_argument("--lambda-tol", default=format_rational(DEFAULT_LAMBDA_TOL))
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("demo", parents=[common], help="run a built-in example end to end")
    s.add_argument("name", help=", ".join(RUNNERS))
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_INPUT
    try:
        code, rep = args.func(args)
    except ParseError as exc:
        code, rep = EXIT_INPUT, _report(args.command, status="input-error", error=str(exc), position=exc.position)
    except (InputError, RecursionError) as exc:
        code, rep = EXIT_INPUT, _report(args.command, status="input-error", error=str(exc) or type(exc).__name__)
    if args.format == "machine":
        sys.stdout.write(json.dumps(rep, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(render_human(rep) + "\n")
    return code
