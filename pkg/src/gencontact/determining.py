"""Determining equations for point symmetries of a system by jet splitting."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

from gmpy2 import mpq

from .expr import JetVar, Poly, Scope, UnknownFn, Var, format_poly, parse_poly
from .expr.poly import atom_dependencies, atom_of, intern
from .expr.printer import jet_name
from .files import FormatError, scan_blocks
from .jet import Generator, OdeSystem, symmetry_residuals
from .linalg import SpanSolver, nullity

UNKNOWN_NAMES = ("xi", "eta1", "eta2")
COEFF_BOUND = 4
MAX_COMBINATION = 3


class NotJetPolynomial(ValueError):
    pass


def unknown_ansatz(variables=("x", "y", "z"), names=UNKNOWN_NAMES) -> Generator:
    xi, *etas = (Poly.atom(UnknownFn(n, tuple(variables))) for n in names)
    return Generator(xi, tuple(etas), tuple(variables), "ansatz")


@dataclass(frozen=True)
class DeterminingEquation:
    """Coefficient of ``monomial`` in symmetry residual ``eq`` (1-based)."""

    monomial: tuple  # ((JetVar, exponent), ...) in jet order
    eq: int
    residual: Poly

    @property
    def monomial_label(self):
        return " ".join(f"{jet_name(j.dep, j.order)}^{e}" for j, e in self.monomial)

    @property
    def label(self):
        return f"coeff[{self.monomial_label}][eq_{self.eq}]"

    def line(self):
        return f"{self.label}: {format_poly(self.residual, args=False)} = 0"


@dataclass(frozen=True)
class DeterminingSystem:
    system: OdeSystem
    jets: tuple  # jet coordinates split on, in printing order
    equations: tuple

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)

    def lines(self):
        return [e.line() for e in self.equations]


def _graded_lex(exps):
    return (sum(exps), tuple(-e for e in exps))


def split_on_jets(residual: Poly, jets: tuple):
    """``{exponent vector: coefficient}``; raises unless polynomial in ``jets``."""
    names = {jet_name(j.dep, j.order) for j in jets}
    for a in residual.atoms():
        if isinstance(a, JetVar):
            if a not in jets:
                raise NotJetPolynomial(f"unexpected jet {jet_name(a.dep, a.order)} after reduction")
        elif a.__class__ is not Var and any(n in names for n in _deps_of(a)):
            raise NotJetPolynomial(f"{format_poly(Poly.atom(a))} is not polynomial in the jets")
    index = {j: i for i, j in enumerate(jets)}
    out = {}
    for mono, coeff in residual.split(lambda a: isinstance(a, JetVar)).items():
        exps = [0] * len(jets)
        for k in range(0, len(mono), 2):
            e = mono[k + 1]
            if e < 0:
                raise NotJetPolynomial("negative power of a jet coordinate")
            exps[index[atom_of(mono[k])]] = e
        out[tuple(exps)] = coeff
    return out


def _deps_of(atom):
    return atom_dependencies(intern(atom))


def determining_system(sys: OdeSystem, ansatz: Generator | None = None) -> DeterminingSystem:
    """Split the on-shell symmetry conditions by monomials in the free jets."""
    if ansatz is None:
        ansatz = unknown_ansatz(sys.variables)
    jets = tuple(JetVar(d, k) for k in range(1, sys.order) for d in sys.deps)
    found = []
    for i, r in enumerate(symmetry_residuals(ansatz, sys), start=1):
        for exps, coeff in split_on_jets(r, jets).items():
            found.append((_graded_lex(exps), i, exps, coeff))
    found.sort(key=lambda t: (t[0], t[1]))
    eqs = tuple(DeterminingEquation(tuple(zip(jets, exps)), i, c) for _, i, exps, c in found)
    return DeterminingSystem(sys, jets, eqs)


# -- the published equation list ----------------------------------------------

def paper_scope() -> Scope:
    xyz = ("x", "y", "z")
    return Scope(functions={"xi": xyz, "eta1": xyz, "eta2": xyz, "alpha": ("x",), "beta": ("x",)})


@dataclass(frozen=True)
class PaperEquation:
    name: str
    group: str
    text: str
    poly: Poly


def load_paper_equations(text: str | None = None) -> list:
    """Equations from an ``equations`` block file (default: the shipped list)."""
    if text is None:
        text = resources.files("gencontact.casebook").joinpath("paper_determining.eqs").read_text()
    scope = paper_scope()
    out = []
    for b in scan_blocks(text):
        if b.kind != "equations":
            continue
        for key, value, _ in b.fields:
            lhs, _, rhs = value.partition("=")
            if not rhs.strip():
                raise FormatError(f"equation {key}: expected 'LHS = RHS'")
            p = parse_poly(lhs, scope) - parse_poly(rhs, scope)
            out.append(PaperEquation(key, b.name, " ".join(value.split()), p))
    return out


def _vec(p: Poly) -> dict:
    return {m: c for m, c in p.terms.items()}


def _bounded(c) -> bool:
    return abs(c.numerator) <= COEFF_BOUND and c.denominator <= COEFF_BOUND


@dataclass
class MatchResult:
    equation: PaperEquation
    matched: bool
    combination: list  # [(coefficient, DeterminingEquation)]
    nearest: DeterminingEquation | None = None
    nearest_scale: object = None
    difference: Poly | None = None

    def describe(self):
        if self.matched:
            parts = " + ".join(f"({_q(c)})*{e.label}" for c, e in self.combination)
            return f"{self.equation.name}: MATCHED {self.equation.text}  <=  {parts}"
        near = f"{self.nearest.label}: {format_poly(self.nearest.residual, args=False)}" \
            if self.nearest else "none"
        return f"{self.equation.name}: UNMATCHED {self.equation.text}  nearest {near}"

    def erratum(self):
        """Suggested correction when the nearest equation differs in one term."""
        if self.matched or self.nearest is None or self.difference is None:
            return None
        if len(self.difference) != 1:
            return None
        target = self.nearest.residual * self.nearest_scale
        (m, _), = self.difference.terms.items()
        term = format_poly(Poly({m: mpq(1)}), args=False)
        printed = self.equation.poly.terms.get(m, mpq(0))
        generated = target.terms.get(m, mpq(0))
        return (f"{self.equation.name}: coefficient of {term} printed {_q(printed)}, "
                f"generated {_q(generated)} (nearest {self.nearest.label}: "
                f"{format_poly(target, args=False)} = 0)")


def _q(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _nearest(p: Poly, eqs):
    best = None
    for e in eqs:
        r = e.residual
        scales = {p.terms[m] / c for m, c in r.terms.items() if m in p.terms}
        for s in scales or {mpq(1)}:
            diff = p - r * s
            key = (len(diff), len(r))
            if best is None or key < best[0]:
                best = (key, e, s, diff)
    return best


def match_paper_system(generated: DeterminingSystem, paper=None) -> list:
    """For each printed equation, find a bounded rational combination of at
    most three generated equations equal to it."""
    paper = load_paper_equations() if paper is None else paper
    eqs = [e for e in generated.equations if not e.residual.is_zero()]
    vecs = [_vec(e.residual) for e in eqs]
    supports = [set(v) for v in vecs]
    results = []
    for pe in paper:
        target = _vec(pe.poly)
        tsupp = set(target)
        hit = None
        relevant = [i for i, s in enumerate(supports) if s & tsupp]
        for size in range(1, MAX_COMBINATION + 1):
            for combo in itertools.combinations(relevant, size):
                if not tsupp <= set().union(*(supports[i] for i in combo)):
                    continue
                s = SpanSolver()
                for i in combo:
                    s.add(vecs[i])
                coords = s.express(target)
                if coords is None or len(coords) != size:
                    continue
                if all(_bounded(c) for c in coords.values()):
                    hit = [(coords[k], eqs[combo[k]]) for k in range(size)]
                    break
            if hit:
                break
        if hit:
            results.append(MatchResult(pe, True, hit))
        else:
            near = _nearest(pe.poly, eqs)
            results.append(MatchResult(pe, False, [], near[1], near[2], near[3]) if near
                           else MatchResult(pe, False, []))
    return results


# -- solved ansatz and reduction to ODEs in x ------------------------------------

def solved_ansatz(x="x", y="y", z="z") -> dict:
    """Bindings for xi, eta1, eta2 in terms of a1..a6."""
    X, Y, Z = (Poly.var(v) for v in (x, y, z))
    a = {i: Poly.atom(UnknownFn(f"a{i}", (x,))) for i in (1, 2, 3)}
    a[4] = Poly.atom(UnknownFn("a4", (x, y)))
    a[5] = Poly.atom(UnknownFn("a5", (x, y)))
    a[6] = Poly.atom(UnknownFn("a6", (y, z)))
    half = mpq(1, 2)
    xyz = (x, y, z)
    return {
        UnknownFn("xi", xyz): Y * a[1] + Z * a[2] + a[3],
        UnknownFn("eta1", xyz): half * Z ** 2 * a[2] + Z * a[4] + a[5],
        UnknownFn("eta2", xyz): (half * Z ** 2 * a[2].diff(Var(x)) + Z * a[4].diff(Var(x))
                                 + a[5].diff(Var(x)) + a[6]),
    }


@dataclass(frozen=True)
class SpecializedEquation:
    source: str  # label of the generated equation
    split: str  # monomial in explicit variables, "" if none
    residual: Poly

    @property
    def label(self):
        return self.source + (f"[{self.split}]" if self.split else "")

    def line(self):
        return f"{self.label}: {format_poly(self.residual, args=False)} = 0"


def _explicit_split(p: Poly, names):
    """Split on Vars in ``names`` that no other atom of ``p`` depends on."""
    free = []
    for n in names:
        if not any(not (isinstance(a, Var) and a.name == n) and n in _deps_of(a)
                   for a in p.atoms()):
            free.append(n)
    if not free:
        return {"": p}
    out = {}
    for mono, coeff in p.split(lambda a: isinstance(a, Var) and a.name in free).items():
        parts = []
        for k in range(0, len(mono), 2):
            e = mono[k + 1]
            parts.append(atom_of(mono[k]).name + (f"^{e}" if e != 1 else ""))
        out[" ".join(parts) or "1"] = coeff
    return dict(sorted(out.items(), key=lambda t: (-len(t[0]), t[0])))


def apply_solved_ansatz(generated: DeterminingSystem, bindings=None, split_vars=("y", "z")) -> list:
    bindings = solved_ansatz(*generated.system.variables) if bindings is None else bindings
    out = []
    for e in generated.equations:
        r = e.residual.subs(bindings)
        if r.is_zero():
            continue
        for label, c in _explicit_split(r, split_vars).items():
            out.append(SpecializedEquation(e.label, label, c))
    return out


def case_bindings(alpha: Poly, beta: Poly, x="x") -> dict:
    return {UnknownFn("alpha", (x,)): alpha, UnknownFn("beta", (x,)): beta}


def polynomial_a_ansatz(degree=2, keep=None, x="x", y="y", z="z") -> dict:
    """a4, a5 as polynomials in y with x-dependent coefficients, a6 as a
    polynomial in (y, z) with constant coefficients; ``keep`` zeroes the rest."""
    Y, Z = Poly.var(y), Poly.var(z)
    b = {}

    def fx(name):
        return Poly.atom(UnknownFn(name, (x,)))

    b[UnknownFn("a4", (x, y))] = sum((fx(f"b{k}") * Y ** k for k in range(degree + 1)), Poly.const(0))
    b[UnknownFn("a5", (x, y))] = sum((fx(f"d{k}") * Y ** k for k in range(degree + 1)), Poly.const(0))
    b[UnknownFn("a6", (y, z))] = sum((Poly.var(f"k{i}{j}") * Y ** i * Z ** j
                                      for i in range(degree + 1) for j in range(degree + 1 - i)),
                                     Poly.const(0))
    if keep is not None:
        keep = set(keep)
        for name in ("a1", "a2", "a3"):
            if name not in keep:
                b[UnknownFn(name, (x,))] = Poly.const(0)
        for k in list(b):
            if k.name in ("a4", "a5", "a6") and k.name not in keep:
                b[k] = Poly.const(0)
    return b


def reduce_to_x_odes(specialized: list, alpha: Poly, beta: Poly, degree=2, keep=None,
                     x="x", y="y", z="z") -> list:
    """Constraints in x on the a-functions after fixing alpha, beta; not solved."""
    bind = case_bindings(alpha, beta, x)
    ans = polynomial_a_ansatz(degree, keep, x, y, z)
    out = []
    seen = set()
    for e in specialized:
        r = e.residual.subs(bind).subs(ans)
        if r.is_zero():
            continue
        for label, c in _explicit_split(r, (y, z)).items():
            if c.is_zero() or c in seen or (-c) in seen:
                continue
            seen.add(c)
            out.append(SpecializedEquation(e.label, label, c))
    return out


# -- independent dimension count ---------------------------------------------------

def polynomial_symmetry_dimension(sys: OdeSystem, degree: int) -> int:
    """Dimension of symmetries with polynomial coefficients of total degree
    <= ``degree`` in the base variables (exact null space)."""
    base = sys.variables
    monos = [e for e in itertools.product(range(degree + 1), repeat=len(base)) if sum(e) <= degree]

    def mono(e):
        p = Poly.const(1)
        for v, k in zip(base, e):
            p = p * Poly.var(v) ** k
        return p

    columns = []
    zero = Poly.const(0)
    for comp in range(len(base)):
        for e in monos:
            coeffs = [zero] * len(base)
            coeffs[comp] = mono(e)
            g = Generator(coeffs[0], tuple(coeffs[1:]), base)
            col = {}
            for i, r in enumerate(symmetry_residuals(g, sys)):
                for m, c in r.terms.items():
                    col[(i, m)] = c
            columns.append(col)
    return nullity(columns)


__all__ = [
    "DeterminingEquation", "DeterminingSystem", "MatchResult", "NotJetPolynomial",
    "PaperEquation", "SpecializedEquation", "apply_solved_ansatz", "case_bindings",
    "determining_system", "load_paper_equations", "match_paper_system", "paper_scope",
    "polynomial_a_ansatz", "polynomial_symmetry_dimension", "reduce_to_x_odes",
    "solved_ansatz", "split_on_jets", "unknown_ansatz",
]
