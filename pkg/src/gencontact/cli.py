"""Command-line front end: ``gencontact SUBCOMMAND [options]``.

Exit status is 0 when everything checked passes, 1 on a verification
failure and 2 on malformed input or usage errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import casebook
from .determining import (
    apply_solved_ansatz,
    determining_system,
    load_paper_equations,
    match_paper_system,
    paper_scope,
    reduce_to_x_odes,
)
from .expr import ParseError, Poly, Var, format_poly, parse, parse_poly, to_poly
from .expr.printer import jet_name
from .files import FormatError, format_system, read_blocks, read_generators, system_from_block
from .jet import prolong, symmetry_residuals
from .lie import ClosureFailure, DependentBasis, closure_check, commutator, format_structure_line
from .reduction import NotLinear, ScalarOde, classify_linear_third_order, scalar_to_system

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, system=True, generator=True):
    if system:
        p.add_argument("--system", metavar="FILE")
    if generator:
        p.add_argument("--generator", metavar="FILE|DIR", action="append", default=[])
    p.add_argument("--param", metavar="NAME=VALUE", action="append", default=[])
    p.add_argument("--json", action="store_true")


def build_parser():
    p = _Parser(prog="gencontact", description="Lie symmetry checks for reduced third-order ODEs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    s = sub.add_parser("parse", help="parse and normalize an expression")
    s.add_argument("expression")
    s.add_argument("--tree", action="store_true", help="also show the unnormalized tree")
    _common(s, system=False, generator=False)
    s = sub.add_parser("check-symmetry", help="symmetry residuals of generators")
    _common(s)
    s = sub.add_parser("prolong", help="extension coefficients of generators")
    _common(s)
    s.add_argument("--order", type=int, default=None)
    s = sub.add_parser("determine", help="determining equations of a system")
    _common(s, generator=False)
    s.add_argument("--ansatz", action="store_true", help="also substitute the solved ansatz")
    s = sub.add_parser("match-paper", help="compare generated and printed determining equations")
    _common(s, generator=False)
    s.add_argument("--equations", metavar="FILE")
    s = sub.add_parser("commutator", help="bracket of two generators")
    _common(s, system=False)
    s = sub.add_parser("closure", help="structure constants of a generator set")
    _common(s, system=False)
    s = sub.add_parser("reduce", help="scalar ODE to first-derivative system")
    _common(s, generator=False)
    s = sub.add_parser("classify", help="verify the case records")
    _common(s, system=False, generator=False)
    s.add_argument("--casebook", default="builtin", metavar="builtin|DIR")
    s.add_argument("--case", action="append", default=[], metavar="ID")
    s.add_argument("--x-odes", action="store_true",
                   help="emit the reduced constraints in x for incomplete cases")
    return p


# -- helpers ------------------------------------------------------------------------

class Report:
    def __init__(self, command):
        self.command = command
        self.items = []
        self.findings = []
        self.lines = []
        self.failed = False
        self.inputs = []
        self.extra = {}

    def item(self, name, kind, residuals, verdict):
        self.items.append({"name": name, "kind": kind,
                           "residuals": [r if isinstance(r, str) else format_poly(r) for r in residuals],
                           "verdict": verdict})

    def emit(self, as_json, out):
        if as_json:
            h = hashlib.sha256()
            for data in self.inputs:
                h.update(data)
            doc = {"command": self.command, "status": "fail" if self.failed else "pass",
                   "items": self.items, "findings": self.findings,
                   "inputs_digest": h.hexdigest()}
            doc.update(self.extra)
            out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        else:
            for line in self.lines:
                out.write(line + "\n")
            for f in self.findings:
                out.write(f"finding: {f}\n")
        return FAIL if self.failed else OK


def _read(path, report):
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    if p.is_file():
        report.inputs.append(p.read_bytes())
    else:
        for f in sorted(p.glob("*.gen")):
            report.inputs.append(f.read_bytes())
    return p


def _params(args):
    out = {}
    for item in args.param:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        out[Var(name.strip())] = parse_poly(value)
    return out


def _load_system(args, report, scope=None):
    if not args.system:
        raise UsageError("--system FILE is required")
    _read(args.system, report)
    blocks = [b for b in read_blocks(args.system) if b.kind == "system"]
    if len(blocks) != 1:
        raise FormatError(f"{args.system}: expected exactly one system block")
    s = system_from_block(blocks[0], scope or paper_scope())
    b = _params(args)
    return s.specialize(b) if b else s


def _load_generators(args, report, variables):
    if not args.generator:
        raise UsageError("--generator FILE|DIR is required")
    gens = []
    for path in args.generator:
        _read(path, report)
        gens += read_generators(path, variables)
    if not gens:
        raise FormatError("no generator blocks found")
    b = _params(args)
    return [g.map(lambda c: c.subs(b)) for g in gens] if b else gens


def _fmt(p: Poly):
    return format_poly(p, args=False)


# -- subcommands -----------------------------------------------------------------------

def cmd_parse(args, r):
    node = parse(args.expression)
    p = to_poly(node)
    b = _params(args)
    if b:
        p = p.subs(b)
    r.item(args.expression, "expression", [p], "zero" if p.is_zero() else "nonzero")
    if args.tree:
        r.lines.append(f"tree: {node!r}")
    r.lines.append(format_poly(p))


def cmd_check_symmetry(args, r):
    sys_ = _load_system(args, r)
    for g in _load_generators(args, r, sys_.variables):
        res = symmetry_residuals(g, sys_)
        ok = all(x.is_zero() for x in res)
        verdict = "SYMMETRY" if ok else "NOT A SYMMETRY"
        r.failed |= not ok
        r.item(g.name, "generator", res, verdict.lower())
        r.lines.append(f"{g.name}: {verdict} (residuals: {', '.join(_fmt(x) for x in res)})")


def cmd_prolong(args, r):
    sys_ = _load_system(args, r)
    k = args.order or sys_.order
    if k < 1:
        raise UsageError("--order must be >= 1")
    for g in _load_generators(args, r, sys_.variables):
        pg = prolong(g, sys_, k)
        coeffs = []
        for j in range(1, k + 1):
            for d in sys_.deps:
                c = pg.coefficient(d, j)
                coeffs.append(c)
                r.lines.append(f"{g.name}: eta[{jet_name(d, j)}] = {_fmt(c)}")
        r.item(g.name, "prolongation", coeffs, "ok")


def cmd_determine(args, r):
    sys_ = _load_system(args, r)
    ds = determining_system(sys_)
    for e in ds.equations:
        r.item(e.label, "determining", [e.residual], "equation")
        r.lines.append(e.line())
    if args.ansatz:
        for e in apply_solved_ansatz(ds):
            r.item(e.label, "specialized", [e.residual], "equation")
            r.lines.append(e.line())


def cmd_match_paper(args, r):
    if args.system:
        sys_ = _load_system(args, r)
    else:
        sys_ = _general_system()
    paper = None
    if args.equations:
        _read(args.equations, r)
        paper = load_paper_equations(Path(args.equations).read_text())
    results = match_paper_system(determining_system(sys_), paper)
    matched = sum(m.matched for m in results)
    for m in results:
        r.lines.append(m.describe())
        resid = [f"{c}*{e.label}" for c, e in m.combination] if m.matched else \
            ([m.nearest.label] if m.nearest else [])
        r.item(m.equation.name, "paper-equation", resid, "matched" if m.matched else "unmatched")
        if not m.matched:
            r.failed = True
            r.findings.append(m.erratum() or m.describe())
    r.lines.append(f"matched {matched}/{len(results)}")


def cmd_commutator(args, r):
    gens = _load_generators(args, r, ("x", "y", "z"))
    if len(gens) != 2:
        raise UsageError(f"commutator needs exactly two generators, got {len(gens)}")
    a, b = gens
    c = commutator(a, b)
    parts = [f"{n}: {_fmt(v)}" for n, v in zip(("xi", *(f"eta[{d}]" for d in c.deps)), c.coefficients)]
    r.item(f"[{a.name},{b.name}]", "bracket", list(c.coefficients), "zero" if c.is_zero() else "nonzero")
    r.lines.append(f"[{a.name},{b.name}] = {{ {'  '.join(parts)} }}")


def cmd_closure(args, r):
    gens = _load_generators(args, r, ("x", "y", "z"))
    res = closure_check(gens)
    if isinstance(res, DependentBasis):
        r.failed = True
        names = [gens[i].name for i in res.indices]
        r.findings.append(f"linearly dependent: {', '.join(names)}")
        r.lines.append(f"DEPENDENT: {', '.join(names)}")
        return
    if isinstance(res, ClosureFailure):
        r.failed = True
        a, b = gens[res.i], gens[res.j]
        r.item(f"[{a.name},{b.name}]", "bracket", list(res.bracket.coefficients), "not in span")
        r.findings.append(f"[{a.name},{b.name}] is not in the span")
        r.lines.append(f"[{a.name},{b.name}] NOT IN SPAN: {res.bracket}")
        return
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            line = format_structure_line(res, i, j)
            r.lines.append(line)
            r.item(f"[{gens[i].name},{gens[j].name}]", "bracket",
                   [line.split(" = ", 1)[1]], "closed")
    r.lines.append(f"closed: dimension {res.dimension}")


def cmd_reduce(args, r):
    sys_ = _load_system(args, r)
    if len(sys_.deps) != 1:
        raise UsageError("reduce expects a scalar equation (one dependent variable)")
    ode = ScalarOde.from_system(sys_)
    red = scalar_to_system(ode)
    text = format_system(red)
    r.lines.extend(text.rstrip("\n").split("\n"))
    r.item("system", "reduced", [f"{jet_name(d, red.order)} = {format_poly(f)}"
                                 for d, f in zip(red.deps, red.rhs)], "ok")
    if ode.order == 3:
        try:
            c = classify_linear_third_order(ode)
        except NotLinear:
            r.findings.append("nonlinear equation: no linear classification")
        else:
            tag = "eligible" if c.eligible else f"not eligible ({c.reason})"
            r.findings.append(f"linear third order: {tag}")
            if c.eligible:
                r.findings.append("canonical reduced system: " + "; ".join(
                    f"{jet_name(d, 2)} = {format_poly(f)}" for d, f in zip(c.system.deps, c.system.rhs)))


def _general_system():
    s = paper_scope()
    return casebook.reduced_system(parse_poly("alpha", s), parse_poly("beta", s))


def _specialized_general():
    return apply_solved_ansatz(determining_system(_general_system()))


def cmd_classify(args, r):
    cases = casebook.builtin_cases(None if args.casebook == "builtin" else args.casebook)
    if args.casebook != "builtin":
        for c in casebook.CASE_ORDER:
            f = Path(args.casebook) / casebook.case_filename(c)
            if f.exists():
                r.inputs.append(f.read_bytes())
    if args.case:
        unknown = set(args.case) - {c.id for c in cases}
        if unknown:
            raise UsageError(f"unknown case id(s): {', '.join(sorted(unknown))}")
        cases = [c for c in cases if c.id in args.case]
    b = {str(k.name): format_poly(v) for k, v in _params(args).items()}
    reports = [casebook.verify_case(c, b or None) for c in cases]
    ds = None
    summary = casebook.classification_report(reports)
    for rep in reports:
        rec = rep.case
        bad = sorted({c.name for c in rep.checks if not c.ok})
        listed = len(rec.generators)
        ok_listed = len({c.name for c in rep.checks if c.kind == "listed"}) - len(
            {c.name for c in rep.checks if c.kind == "listed" and not c.ok})
        closure = {None: "not checked", True: f"closed ({rep.closure_setting})",
                   False: "NOT CLOSED"}[rep.closed]
        r.lines.append(f"{rec.id}: {rep.status} generators {ok_listed}/{listed} "
                       f"lower bound {rep.lower_bound} claimed {rec.claimed} closure {closure}")
        for cg in rec.generators + rec.solution_generators:
            checks = [c for c in rep.checks if c.name == cg.name]
            res = [x for c in checks for x in c.residuals if not x.is_zero()] or [Poly.const(0)]
            verdict = "symmetry" if all(c.ok for c in checks) else "not a symmetry"
            r.item(f"{rec.id}/{cg.name}", "listed" if cg in rec.generators else "solution",
                   res, verdict)
        if bad:
            r.failed = True
        if args.x_odes and not rec.complete:
            ds = ds or _specialized_general()
            for a, bt in rec.alphas_betas()[:1]:
                for e in reduce_to_x_odes(ds, a, bt):
                    r.lines.append(f"  {rec.id} x-ode {e.line()}")
    r.findings.extend(summary.findings)
    r.failed |= not summary.passed
    r.extra["dimension_set"] = summary.dimension_set
    r.lines.append("dimension set: {" + ", ".join(map(str, summary.dimension_set)) + "}")
    r.lines.append("fully verified: " + (", ".join(summary.fully_verified) or "none"))
    r.lines.append("lower bound only: " + (", ".join(summary.lower_bound_only) or "none"))


COMMANDS = {
    "parse": cmd_parse, "check-symmetry": cmd_check_symmetry, "prolong": cmd_prolong,
    "determine": cmd_determine, "match-paper": cmd_match_paper, "commutator": cmd_commutator,
    "closure": cmd_closure, "reduce": cmd_reduce, "classify": cmd_classify,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand; one of " + ", ".join(COMMANDS))
        report = Report(args.command)
        COMMANDS[args.command](args, report)
    except UsageError as e:
        err.write(f"gencontact: error: {e}\n")
        return USAGE
    except (ParseError, FormatError, NotLinear, ValueError, OSError) as e:
        err.write(f"gencontact: error: {' '.join(str(e).split())}\n")
        return USAGE
    return report.emit(args.json, out)


if __name__ == "__main__":
    sys.exit(main())
