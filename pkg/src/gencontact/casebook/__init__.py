"""Case records for the classification and their verification.

Each case lives in a ``*.case`` file next to this module: one ``case`` block,
the listed ``generator`` blocks and, where a printed generator had to be
repaired, an ``erratum`` block holding the printed components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from gmpy2 import mpq

from ..expr import JetVar, Poly, Product, Rational, Scope, Sum, Var, format_poly, parse, parse_poly, to_poly
from ..expr.parser import DEFAULT_EXPONENT_SYMBOLS
from ..expr.tree import Exp, Power, Sqrt
from ..files import FormatError, generator_from_block, scan_blocks
from ..jet import Generator, OdeSystem, symmetry_residuals
from ..lie import BracketCache, ClosureFailure, DependentBasis, Span, closure_check

CASE_ORDER = ("I.1", "I.2", "I.3.1", "I.3.2", "II.1", "II.2.1", "II.2.2", "II.3", "II.4.1", "II.4.2")
COMPONENTS = ("xi", "eta[y]", "eta[z]")
VARIABLES = ("x", "y", "z")


@dataclass
class CaseGenerator:
    name: str
    texts: dict  # component key -> printed text
    generator: Generator


@dataclass
class Erratum:
    name: str
    kind: str  # "sign" | "coefficient"
    printed: dict  # component key -> text as printed


@dataclass
class CaseRecord:
    id: str
    variants: list  # [(alpha text, beta text)]
    claimed: int
    complete: bool
    generators: list = field(default_factory=list)
    solution_generators: list = field(default_factory=list)
    errata: dict = field(default_factory=dict)
    params: tuple = ()
    algebraic: dict = field(default_factory=dict)  # name -> (p text, q text)
    instances: list = field(default_factory=list)  # [{name: text}]
    closure_at: dict | None = None
    ref: str | None = None
    exponent_symbols: frozenset = DEFAULT_EXPONENT_SYMBOLS
    notes: list = field(default_factory=list)

    @property
    def scope(self) -> Scope:
        alg = {n: (parse_poly(p), parse_poly(q)) for n, (p, q) in self.algebraic.items()}
        return Scope(algebraic=alg, exponent_symbols=self.exponent_symbols)

    def alphas_betas(self):
        s = self.scope
        return [(parse_poly(a, s), parse_poly(b, s)) for a, b in self.variants]

    def generator(self, name):
        for g in self.generators + self.solution_generators:
            if g.name == name:
                return g
        raise KeyError(name)


def reduced_system(alpha: Poly, beta: Poly) -> OdeSystem:
    return OdeSystem("x", ("y", "z"), 2,
                     (Poly.atom(JetVar("z", 1)),
                      alpha * Poly.atom(JetVar("y", 1)) + beta * Poly.atom(JetVar("z", 1))))


# -- loading -------------------------------------------------------------------

def _parse_instance(text, scope):
    out = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not value.strip():
            raise FormatError(f"instance {text!r}: expected name=value")
        out[name.strip()] = value.strip()
    return out


def _parse_alg(text):
    # NAME^2 = P*NAME + Q
    lhs, _, rhs = text.partition("=")
    name = lhs.strip().split("^")[0].strip()
    if not lhs.strip().endswith("^2") or not rhs.strip():
        raise FormatError(f"alg {text!r}: expected 'NAME^2 = P*NAME + Q'")
    r = parse_poly(rhs)
    v = Var(name)
    p = r.diff(v)
    q = r - p * Poly.var(name)
    if p.diff(v) or p.depends_on({name}) or q.depends_on({name}):
        raise FormatError(f"alg {text!r}: right side must be linear in {name}")
    return name, (format_poly(p), format_poly(q))


def _yes(text):
    t = text.strip().lower()
    if t not in ("yes", "no"):
        raise FormatError(f"expected yes/no, got {text!r}")
    return t == "yes"


def parse_case(text: str, source: str = "") -> CaseRecord:
    blocks = scan_blocks(text, source)
    heads = [b for b in blocks if b.kind == "case"]
    if len(heads) != 1:
        raise FormatError(f"{source}: expected one case block")
    h = heads[0]
    alphas, betas = h.all("alpha"), h.all("beta")
    if not alphas or not betas or (len(betas) not in (1, len(alphas))):
        raise FormatError(f"{source}: alpha/beta alternatives do not pair up")
    if len(betas) == 1:
        betas = betas * len(alphas)
    rec = CaseRecord(
        id=h.name,
        variants=list(zip(alphas, betas)),
        claimed=int(h.require("claimed")),
        complete=_yes(h.get("complete", "no")),
        params=tuple(p.strip() for v in h.all("param") for p in v.split(",")),
        algebraic=dict(_parse_alg(a) for a in h.all("alg")),
        ref=h.get("ref"),
        notes=h.all("note"),
    )
    extra = {s.strip() for v in h.all("symbols") for s in v.split(",")}
    rec.exponent_symbols = DEFAULT_EXPONENT_SYMBOLS | extra
    scope = rec.scope
    rec.instances = [_parse_instance(v, scope) for v in h.all("instance")]
    if h.get("closure"):
        rec.closure_at = _parse_instance(h.get("closure"), scope)
    for b in blocks:
        if b.kind == "generator":
            g = generator_from_block(b, VARIABLES, scope)
            cg = CaseGenerator(b.name, {k: v for k, v, _ in b.fields}, g)
            rec.generators.append(cg)
        elif b.kind == "solution":
            g = generator_from_block(b, VARIABLES, scope)
            rec.solution_generators.append(CaseGenerator(b.name, {k: v for k, v, _ in b.fields}, g))
        elif b.kind == "erratum":
            kind = b.require("kind")
            printed = {k: v for k, v, _ in b.fields if k != "kind"}
            rec.errata[b.name] = Erratum(b.name, kind, printed)
        elif b.kind != "case":
            raise FormatError(f"{source}: unknown block {b.kind!r}")
    if len(rec.generators) > rec.claimed:
        raise FormatError(f"{source}: more listed generators than the claimed dimension")
    return rec


def case_filename(case_id: str) -> str:
    return case_id.replace(".", "_") + ".case"


def load_case_file(path) -> CaseRecord:
    p = Path(path)
    return parse_case(p.read_text(), str(p))


def builtin_cases(directory=None) -> list:
    """The ten records, in classification order."""
    if directory is None:
        root = resources.files(__name__)
        texts = {cid: root.joinpath(case_filename(cid)).read_text() for cid in CASE_ORDER}
    else:
        d = Path(directory)
        texts = {cid: (d / case_filename(cid)).read_text() for cid in CASE_ORDER
                 if (d / case_filename(cid)).exists()}
    recs = {cid: parse_case(t, case_filename(cid)) for cid, t in texts.items()}
    for r in recs.values():
        if r.ref and not r.generators:
            if r.ref not in recs:
                raise FormatError(f"case {r.id}: unknown reference {r.ref}")
            r.generators = list(recs[r.ref].generators)
    return [recs[c] for c in CASE_ORDER if c in recs]


# -- parameters ------------------------------------------------------------------

def _bindings(params: dict, scope) -> dict:
    return {Var(k): parse_poly(v, scope) for k, v in params.items()}


def _specialize(p: Poly, b: dict) -> Poly:
    return p.subs(b) if b else p


def _specialize_generator(g: Generator, b: dict) -> Generator:
    return g.map(lambda c: _specialize(c, b)) if b else g


def settings(rec: CaseRecord):
    """Parameter settings to verify: symbolic first, then each instance."""
    yield "symbolic", {}
    for inst in rec.instances:
        yield ", ".join(f"{k}={v}" for k, v in inst.items()), inst


# -- repair search --------------------------------------------------------------------

def _negations(node):
    """Every tree obtained by negating exactly one node of ``node``."""
    yield Product((Rational(-1), node))
    if isinstance(node, Sum):
        for i, t in enumerate(node.terms):
            for alt in _negations(t):
                yield Sum(node.terms[:i] + (alt,) + node.terms[i + 1:])
    elif isinstance(node, Product):
        for i, f in enumerate(node.factors):
            if isinstance(f, Rational):
                continue
            for alt in _negations(f):
                yield Product(node.factors[:i] + (alt,) + node.factors[i + 1:])
    elif isinstance(node, Power) and not isinstance(node.exponent, Rational):
        pass
    elif isinstance(node, Power):
        for alt in _negations(node.base):
            yield Power(alt, node.exponent)
    elif isinstance(node, (Exp, Sqrt)):
        for alt in _negations(node.arg):
            yield type(node)(alt)


@dataclass
class Repair:
    kind: str
    component: str
    printed: str
    repaired: str
    generator: Generator

    def describe(self, name):
        return f"{name} ({self.kind}): {self.component} printed '{self.printed}', verified '{self.repaired}'"


def _residuals_zero(g, sys):
    return all(r.is_zero() for r in symmetry_residuals(g, sys))


def _with_component(g: Generator, k: int, value: Poly) -> Generator:
    comps = list(g.coefficients)
    comps[k] = value
    return Generator(comps[0], tuple(comps[1:]), g.variables, g.name)


def repair_search(texts: dict, systems: list, scope: Scope, name="") -> list:
    """Single-sign, then single-coefficient, edits making the generator a
    symmetry of every system in ``systems``."""
    polys = {k: parse_poly(texts.get(k, "0"), scope) for k in COMPONENTS}
    base = Generator(polys["xi"], (polys["eta[y]"], polys["eta[z]"]), VARIABLES, name)
    found = {}

    def ok(g):
        return all(_residuals_zero(g, s) for s in systems)

    for k, comp in enumerate(COMPONENTS):
        tree = parse(texts.get(comp, "0"), scope)
        for alt in _negations(tree):
            g = _with_component(base, k, to_poly(alt))
            if g not in found and ok(g):
                found[g] = Repair("sign", comp, texts.get(comp, "0"), format_poly(to_poly(alt)), g)
        p = polys[comp]
        for m, c in p.terms.items():
            g = _with_component(base, k, p - Poly({m: 2 * c}))
            if g not in found and ok(g):
                found[g] = Repair("sign", comp, texts.get(comp, "0"), format_poly(g.coefficients[k]), g)
    if found:
        return sorted(found.values(), key=lambda r: (r.component, r.repaired))
    # Residuals are linear in the generator, so a single coefficient change
    # is found by solving for the multiple of the term that cancels them.
    s0 = systems[0]
    r0 = symmetry_residuals(base, s0)
    for k, comp in enumerate(COMPONENTS):
        p = polys[comp]
        for m, c in p.terms.items():
            unit = _with_component(Generator(Poly.const(0), (Poly.const(0),) * 2, VARIABLES),
                                   k, Poly({m: mpq(1)}))
            ru = symmetry_residuals(unit, s0)
            lam = None
            for a, b in zip(r0, ru):
                for mono, v in b.terms.items():
                    lam = -a.terms.get(mono, mpq(0)) / v
                    break
                if lam is not None:
                    break
            if lam is None:
                continue
            lam_p = Poly.coerce(lam)
            g = _with_component(base, k, p + Poly({m: mpq(1)}) * lam_p)
            if ok(g) and g not in found:
                found[g] = Repair("coefficient", comp, texts.get(comp, "0"),
                                  format_poly(g.coefficients[k]), g)
    return sorted(found.values(), key=lambda r: (r.component, r.repaired))


# -- verification ------------------------------------------------------------------------

@dataclass
class GeneratorCheck:
    name: str
    setting: str
    variant: str
    residuals: list
    kind: str = "listed"

    @property
    def ok(self):
        return all(r.is_zero() for r in self.residuals)


@dataclass
class CaseReport:
    case: CaseRecord
    checks: list
    independent: bool
    dependent: list
    closure: object  # LieAlgebraBasis | ClosureFailure | DependentBasis | None
    closure_setting: str
    lower_bound: int
    findings: list
    errata: list  # [(name, kind, description)]

    @property
    def residuals_ok(self):
        return all(c.ok for c in self.checks)

    @property
    def closed(self):
        if self.closure is None:
            return None
        return not isinstance(self.closure, (ClosureFailure, DependentBasis))

    @property
    def passed(self):
        return self.residuals_ok and self.independent and self.closed is not False

    @property
    def status(self):
        if not self.passed:
            return "FAILED"
        if self.case.complete and self.lower_bound == self.case.claimed:
            return "VERIFIED"
        return "INCOMPLETE LISTING"


def _variant_label(a, b):
    return f"alpha={a}, beta={b}"


def verify_case(rec: CaseRecord, params: dict | None = None, check_errata=True) -> CaseReport:
    """Residuals per listed generator and setting, independence, closure when
    the listing is complete, and repair analysis for printed errata."""
    scope = rec.scope
    extra = _bindings(params or {}, scope)
    variants = rec.alphas_betas()
    checks = []
    findings = []
    for label, inst in settings(rec):
        b = _bindings(inst, scope)
        b.update(extra)
        systems = [reduced_system(_specialize(a, b), _specialize(bt, b)) for a, bt in variants]
        for (at, bt_text), sys in zip(rec.variants, systems):
            for kind, gens in (("listed", rec.generators), ("solution", rec.solution_generators)):
                for cg in gens:
                    g = _specialize_generator(cg.generator, b)
                    checks.append(GeneratorCheck(cg.name, label, _variant_label(at, bt_text),
                                                 symmetry_residuals(g, sys), kind))
    listed = [_specialize_generator(cg.generator, extra).renamed(cg.name) for cg in rec.generators]
    span = Span(listed)
    independent = not span.dependent
    verified = {c.name for c in checks if c.kind == "listed"} - \
        {c.name for c in checks if c.kind == "listed" and not c.ok}
    good = [g for g in listed if g.name in verified]
    lower = Span(good).rank if good else 0
    closure, closure_setting = None, ""
    if rec.complete and independent:
        cb = _bindings(rec.closure_at or {}, scope)
        cb.update(extra)
        closure_setting = ", ".join(f"{k}={v}" for k, v in (rec.closure_at or {}).items()) or "symbolic"
        closure = closure_check([_specialize_generator(g, cb) for g in listed], BracketCache())
    if rec.solution_generators:
        sol = listed + [cg.generator.renamed(cg.name) for cg in rec.solution_generators]
        ok_names = {c.name for c in checks if c.kind == "solution" and c.ok}
        if all(cg.name in ok_names for cg in rec.solution_generators):
            findings.append(f"{rec.id}: generators read off the printed general solution "
                            f"verify; with the listed ones they span dimension {Span(sol).rank}")
    for c in checks:
        if not c.ok:
            findings.append(f"{rec.id}: {c.name} fails at {c.setting} ({c.variant})")
    if not rec.complete or lower < rec.claimed:
        findings.append(f"{rec.id}: incomplete listing, {lower} verified of claimed {rec.claimed}")
    errata = []
    if check_errata:
        for e in rec.errata.values():
            errata.append(_analyse_erratum(rec, e, scope))
        for name in sorted({c.name for c in checks if not c.ok}):
            if name in rec.errata:
                continue
            cg = rec.generator(name)
            systems = [reduced_system(a, b) for a, b in variants]
            reps = repair_search(cg.texts, systems, scope, name)
            for r in reps[:3]:
                findings.append(f"{rec.id}: suggested erratum {r.describe(name)}")
    for name, kind, text in errata:
        findings.append(f"{rec.id}: erratum {text}")
    return CaseReport(rec, checks, independent, list(span.dependent), closure, closure_setting,
                      lower, findings, errata)


def _analyse_erratum(rec, e: Erratum, scope):
    """Confirm the printed form fails and that the repair search recovers the
    shipped form with the declared kind."""
    cg = rec.generator(e.name)
    printed = dict(cg.texts)
    printed.update(e.printed)
    systems = [reduced_system(a, b) for a, b in rec.alphas_betas()]
    pg = generator_from_texts(printed, scope, e.name)
    if all(_residuals_zero(pg, s) for s in systems):
        return e.name, "none", f"{e.name}: printed form already verifies (stale erratum)"
    reps = repair_search(printed, systems, scope, e.name)
    target = cg.generator
    match = [r for r in reps if r.generator == target]
    if not match:
        return e.name, "unresolved", f"{e.name}: no single edit of the printed form verifies"
    r = match[0]
    return e.name, r.kind, r.describe(e.name)


def generator_from_texts(texts: dict, scope: Scope, name="") -> Generator:
    p = {k: parse_poly(texts.get(k, "0"), scope) for k in COMPONENTS}
    return Generator(p["xi"], (p["eta[y]"], p["eta[z]"]), VARIABLES, name)


# -- summary -----------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    reports: list
    dimension_set: list
    fully_verified: list
    lower_bound_only: list
    findings: list
    errata: list

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    @property
    def exit_status(self):
        return 0 if self.passed else 1

    @property
    def errata_single_sign(self):
        return all(kind == "sign" for _, kind, _ in self.errata)


def classification_report(reports) -> ClassificationReport:
    dims = sorted({r.case.claimed for r in reports})
    full = [r.case.id for r in reports if r.status == "VERIFIED" and r.closed]
    partial = [r.case.id for r in reports if r.case.id not in full]
    findings = [f for r in reports for f in r.findings]
    errata = [(f"{r.case.id}/{n}", k, t) for r in reports for n, k, t in r.errata]
    return ClassificationReport(reports, dims, full, partial, findings, errata)


__all__ = [
    "CASE_ORDER", "CaseGenerator", "CaseRecord", "CaseReport", "ClassificationReport",
    "Erratum", "GeneratorCheck", "Repair", "builtin_cases", "case_filename",
    "classification_report", "generator_from_texts", "load_case_file", "parse_case",
    "reduced_system", "repair_search", "verify_case",
]
