"""Acceptance criteria C1-C9.

Each check returns (ok, detail) and is wrapped in a test that records one
``Cn PASS|FAIL ...`` line; the lines are also collected into a terminal
summary section.  Run this file directly to print just the nine lines.
"""
import io
import json
import random
import sys
import time
from pathlib import Path

import pytest

from gencontact.casebook import builtin_cases, classification_report, reduced_system, verify_case
from gencontact.cli import main
from gencontact.determining import (
    apply_solved_ansatz,
    determining_system,
    match_paper_system,
    paper_scope,
    reduce_to_x_odes,
)
from gencontact.expr import JetVar, Poly, Scope, Var, parse, parse_poly
from gencontact.expr import normalize as normalize_tree
from gencontact.jet import CORRECTED, PRINTED, Generator, prolong, second_extension_explicit
from gencontact.lie import LieAlgebraBasis, commutator, jacobi_residual
from gencontact.reduction import lifted_contact_residual, point_lift

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
RESULTS = []

_cases = None


def cases():
    global _cases
    if _cases is None:
        _cases = {r.id: r for r in builtin_cases()}
    return _cases


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# -- C1 ------------------------------------------------------------------------

def check_c1():
    def run():
        s = paper_scope()
        ds = determining_system(reduced_system(parse_poly("alpha", s), parse_poly("beta", s)))
        return match_paper_system(ds)
    res, dt = _timed(run)
    matched = sum(r.matched for r in res)
    unmatched = [r for r in res if not r.matched]
    # a mismatch is acceptable only when reported with its nearest generated equation
    reported = all(r.nearest is not None and r.erratum() for r in unmatched)
    ok = dt < 10 and (matched == len(res) == 15 or (len(res) == 15 and reported))
    notes = "; ".join(r.erratum() for r in unmatched)
    return ok, f"matched {matched}/{len(res)} in {dt:.2f}s (limit 10s)" + (f"; ledger: {notes}" if notes else "")


# -- C2 ------------------------------------------------------------------------

def check_c2():
    rep, dt = _timed(lambda: verify_case(cases()["I.1"]))
    closed = isinstance(rep.closure, LieAlgebraBasis)
    brackets = len(rep.closure.structure) if closed else 0
    zero = all(c.ok for c in rep.checks) and len({c.name for c in rep.checks}) == 15
    ok = zero and closed and brackets == 105 and rep.lower_bound == 15 and dt < 60
    return ok, (f"15 generators zero residuals={zero}, {brackets}/105 brackets in span, "
                f"lower bound {rep.lower_bound}, {dt:.2f}s (limit 60s)")


# -- C3 ------------------------------------------------------------------------

def check_c3():
    rep, dt = _timed(lambda: verify_case(cases()["I.2"]))
    symbolic = [c for c in rep.checks if c.setting == "symbolic"]
    sym_ok = len(symbolic) == 15 and all(c.ok for c in symbolic)
    closed = isinstance(rep.closure, LieAlgebraBasis) and rep.closure_setting == "a0=1"
    ok = sym_ok and closed and rep.residuals_ok and dt < 120
    return ok, (f"symbolic a0: 15/15 verify={sym_ok}, closure at a0=1={closed}, "
                f"{dt:.2f}s (limit 120s)")


# -- C4 ------------------------------------------------------------------------

def check_c4():
    def run():
        return {cid: verify_case(cases()[cid]) for cid in ("II.1", "II.2.1", "II.2.2")}
    reps, dt = _timed(run)
    parts, ok = [], True
    for cid, n in (("II.1", 7), ("II.2.1", 7), ("II.2.2", 4)):
        r = reps[cid]
        listed = {c.name for c in r.checks if c.kind == "listed"}
        good = len(listed) == n and all(c.ok for c in r.checks if c.kind == "listed")
        ok &= good
        parts.append(f"{cid} {n} verify={good}")
    for cid in ("II.1", "II.2.1"):
        r = reps[cid]
        c = isinstance(r.closure, LieAlgebraBasis) and r.closure.dimension == 7
        ok &= c
        parts.append(f"{cid} closes dim 7={c}")
    r = reps["II.2.2"]
    solved = apply_solved_ansatz(determining_system(
        reduced_system(parse_poly("alpha", paper_scope()), parse_poly("beta", paper_scope()))))
    a, b = cases()["II.2.2"].alphas_betas()[0]
    xodes = reduce_to_x_odes(solved, a, b)
    bound = r.lower_bound == 4 and r.case.claimed == 7 and r.status == "INCOMPLETE LISTING"
    ok &= bound and bool(xodes)
    parts.append(f"II.2.2 lower bound {r.lower_bound} of {r.case.claimed}, "
                 f"{len(xodes)} x-ODE constraints emitted")
    return ok, ", ".join(parts) + f", {dt:.2f}s"


# -- C5 ------------------------------------------------------------------------

def check_c5():
    expected = {"I.3.1": 5, "I.3.2": 6, "II.3": 5, "II.4.1": 6, "II.4.2": 6}
    parts, ok = [], True
    for cid, claimed in expected.items():
        rec = cases()[cid]
        r = verify_case(rec)
        settings = {c.setting for c in r.checks}
        has_m = "m" in rec.params
        m_ok = not has_m or ("symbolic" in settings
                             and any("m=1" in s for s in settings)
                             and any("m=2" in s for s in settings))
        good = (r.residuals_ok and m_ok and r.status == "INCOMPLETE LISTING"
                and rec.claimed == claimed and any("incomplete listing" in f for f in r.findings))
        ok &= good
        parts.append(f"{cid} claimed {rec.claimed} {'ok' if good else 'BAD'}")
    return ok, ", ".join(parts)


# -- C6 ------------------------------------------------------------------------

def check_c6():
    out = io.StringIO()
    code = main(["classify", "--casebook", "builtin", "--json"], out, io.StringIO())
    doc = json.loads(out.getvalue())
    summary = classification_report([verify_case(r) for r in cases().values()])
    dims = doc["dimension_set"]
    non_sign = [f"{n} ({k})" for n, k, _ in summary.errata if k != "sign"]
    ok = dims == [5, 6, 7, 15] and code == 0 and not non_sign
    detail = f"dimension set {dims}, exit {code}, errata {len(summary.errata)}"
    if non_sign:
        detail += f"; not single-sign: {', '.join(non_sign)}"
    return ok, detail


# -- C7 ------------------------------------------------------------------------

def _random_generator(rng, degree=3):
    monos = [(i, j, k) for i in range(degree + 1) for j in range(degree + 1)
             for k in range(degree + 1) if i + j + k <= degree]

    def coeff():
        p = Poly.const(0)
        for i, j, k in rng.sample(monos, 5):
            p = p + parse_poly(f"{rng.randint(-6, 6)}/{rng.randint(1, 3)}*x^{i}*y^{j}*z^{k}")
        return p
    return Generator(coeff(), (coeff(), coeff()), ("x", "y", "z"))


def check_c7(n=25):
    rng = random.Random(2114)
    sys_ = reduced_system(Poly.const(0), Poly.const(0))
    first = second = fixed = 0
    for _ in range(n):
        g = _random_generator(rng)
        pg = prolong(g, sys_, 2)
        r1, r2 = pg.coefficient("y", 2), pg.coefficient("z", 2)
        p1, p2 = second_extension_explicit(g, PRINTED)
        _, c2 = second_extension_explicit(g, CORRECTED)
        first += p1 == r1
        second += p2 == r2
        fixed += c2 == r2
    ok = first == n and second == n
    return ok, (f"{n} random generators: first formula equal {first}/{n}, second formula "
                f"as printed equal {second}/{n}, with 3 terms corrected {fixed}/{n}")


# -- C8 ------------------------------------------------------------------------

_LEAVES = ["x", "y", "z", "y'", "z'", "2", "-1/3", "f(x,y)", "exp(x)", "exp(y - x)",
           "sqrt(a0)", "(x + 1)^-1"]
_SCOPE = Scope(functions={"f": ("x", "y")})


def _random_text(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(_LEAVES)
    op = rng.choice("+-*^")
    if op == "^":
        return f"({_random_text(rng, depth - 1)})^{rng.randint(0, 3)}"
    return f"({_random_text(rng, depth - 1)} {op} {_random_text(rng, depth - 1)})"


def check_c8():
    t0 = time.perf_counter()
    rng = random.Random(8)
    counts = {}
    vars_ = [Var("x"), Var("y"), Var("z"), JetVar("y", 1), JetVar("z", 1)]

    def tally(name, good):
        c = counts.setdefault(name, [0, 0])
        c[0] += bool(good)
        c[1] += 1

    for _ in range(100):
        t = parse(_random_text(rng), _SCOPE)
        once = normalize_tree(t)
        tally("idempotence", normalize_tree(once) == once)
        p, q = parse_poly(_random_text(rng), _SCOPE), parse_poly(_random_text(rng), _SCOPE)
        v, w = rng.choice(vars_), rng.choice(vars_)
        a, b = Poly.const(rng.randint(-5, 5)), Poly.const(rng.randint(1, 4)) / 3
        tally("linearity", (p * a + q * b).diff(v) == p.diff(v) * a + q.diff(v) * b)
        tally("Leibniz", (p * q).diff(v) == p.diff(v) * q + p * q.diff(v))
        h = p * parse_poly("g(x,y,z)")
        tally("Clairaut", h.diff(v).diff(w) == h.diff(w).diff(v))
    bases = [[cg.generator for cg in r.generators] for r in cases().values()]
    for basis in bases:
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                tally("antisymmetry", (commutator(basis[i], basis[j])
                                       + commutator(basis[j], basis[i])).is_zero())
    for _ in range(50):
        basis = rng.choice(bases)
        a, b, c = (rng.choice(basis) for _ in range(3))
        tally("Jacobi", jacobi_residual(a, b, c).is_zero())
    lifts = 0
    while lifts < 10:
        phi = parse_poly(f"x + {rng.randint(-3, 3)}*x^{rng.randint(0, 2)}*y^{rng.randint(0, 2)}")
        psi = parse_poly(f"{rng.randint(-3, 3)}*y^{rng.randint(1, 3)} + {rng.randint(-3, 3)}*x*y")
        if point_lift(phi, psi)[1].is_zero():
            continue
        tally("contact lift", lifted_contact_residual(phi, psi).is_zero())
        lifts += 1
    dt = time.perf_counter() - t0
    ok = all(g == n for g, n in counts.values()) and counts["Jacobi"][1] == 50 \
        and counts["contact lift"][1] == 10 and dt < 60
    parts = ", ".join(f"{k} {g}/{n}" for k, (g, n) in counts.items())
    return ok, f"{parts}; {dt:.2f}s (limit 60s)"


# -- C9 ------------------------------------------------------------------------

def check_c9():
    out = io.StringIO()
    code_gen = main(["check-symmetry", "--system", str(SAMPLES / "case_I1.sys"),
                     "--generator", str(SAMPLES / "X13_corrupted.gen")], out, io.StringIO())
    gen_nonzero = "NOT A SYMMETRY" in out.getvalue()
    out = io.StringIO()
    code_eq = main(["match-paper", "--system", str(SAMPLES / "reduced_linear.sys"),
                    "--equations", str(SAMPLES / "perturbed.eqs")], out, io.StringIO())
    eq_flagged = "P1: UNMATCHED" in out.getvalue()
    ok = code_gen == 1 and gen_nonzero and code_eq == 1 and eq_flagged
    return ok, (f"corrupted X13: exit {code_gen}, nonzero residual={gen_nonzero}; "
                f"perturbed equation: exit {code_eq}, unmatched={eq_flagged}")


CHECKS = {f"C{i}": fn for i, fn in enumerate(
    (check_c1, check_c2, check_c3, check_c4, check_c5, check_c6, check_c7, check_c8, check_c9), 1)}


def _line(name, ok, detail):
    return f"{name} {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    ok, detail = CHECKS[name]()
    line = _line(name, ok, detail)
    RESULTS.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for name, fn in CHECKS.items():
        ok, detail = fn()
        failed += not ok
        print(_line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
