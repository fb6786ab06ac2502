"""ODE systems, point generators, prolongation and symmetry conditions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .expr import JetVar, Poly, Var, jet

MAX_SHELL_ROUNDS = 16


@dataclass(frozen=True)
class OdeSystem:
    """``dep_i^(order) = rhs_i`` for each dependent variable, in order."""

    indep: str
    deps: tuple
    order: int
    rhs: tuple

    def __post_init__(self):
        if not self.deps:
            raise ValueError("a system needs at least one dependent variable")
        if len(set(self.deps)) != len(self.deps) or self.indep in self.deps:
            raise ValueError("variable names must be distinct")
        if len(self.rhs) != len(self.deps):
            raise ValueError("one right-hand side per dependent variable")
        if self.order < 1:
            raise ValueError("order must be positive")
        for f in self.rhs:
            for a in f.atoms():
                if isinstance(a, JetVar) and a.dep in self.deps and a.order >= self.order:
                    raise ValueError(f"right-hand side contains {a.dep} of order {a.order}")

    @property
    def variables(self):
        return (self.indep,) + self.deps

    def jets(self, max_order):
        return [jet(d, k) for k in range(max_order + 1) for d in self.deps]

    def on_shell(self, e: Poly) -> Poly:
        """Replace highest derivatives by the right-hand sides, to a fixpoint."""
        rules = {JetVar(d, self.order): f for d, f in zip(self.deps, self.rhs)}
        for _ in range(MAX_SHELL_ROUNDS):
            if not any(a in rules for a in e.atoms()):
                return e
            e = e.subs(rules)
        raise RuntimeError("on-shell substitution did not reach a fixpoint")

    def specialize(self, bindings) -> "OdeSystem":
        return OdeSystem(self.indep, self.deps, self.order,
                         tuple(f.subs(bindings) for f in self.rhs))


@dataclass(frozen=True)
class Generator:
    """Point vector field ``xi d/dx + sum_i eta_i d/dy_i`` on (indep, deps)."""

    xi: Poly
    etas: tuple
    variables: tuple = ("x", "y", "z")
    name: str = ""

    def __post_init__(self):
        if len(self.etas) != len(self.variables) - 1:
            raise ValueError("one eta per dependent variable")
        for c in self.coefficients:
            if any(isinstance(a, JetVar) for a in c.atoms()):
                raise ValueError("generator coefficients must not contain derivatives")

    @property
    def indep(self):
        return self.variables[0]

    @property
    def deps(self):
        return self.variables[1:]

    @property
    def coefficients(self):
        return (self.xi,) + tuple(self.etas)

    def apply(self, f: Poly) -> Poly:
        """The generator as a derivation on functions of its base variables."""
        out = Poly.const(0)
        for v, c in zip(self.variables, self.coefficients):
            if c:
                out = out + c * f.diff(Var(v))
        return out

    def map(self, fn, name=None) -> "Generator":
        return Generator(fn(self.xi), tuple(fn(e) for e in self.etas), self.variables,
                         self.name if name is None else name)

    def __add__(self, other):
        _same_space(self, other)
        return Generator(self.xi + other.xi,
                         tuple(a + b for a, b in zip(self.etas, other.etas)), self.variables)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "Generator":
        return self.map(lambda p: p * c, name="")

    def is_zero(self):
        return all(c.is_zero() for c in self.coefficients)

    def renamed(self, name):
        return Generator(self.xi, self.etas, self.variables, name)

    def __str__(self):
        parts = [f"({c})*d/d{v}" for c, v in zip(self.coefficients, self.variables) if c]
        return " + ".join(parts) or "0"


def _same_space(a: Generator, b: Generator):
    if a.variables != b.variables:
        raise ValueError(f"generators live on different variables: {a.variables} vs {b.variables}")


@dataclass(frozen=True)
class ProlongedGenerator:
    base: Generator
    coefficients: dict  # JetVar -> Poly

    def coefficient(self, dep, order) -> Poly:
        if order == 0:
            return self.base.etas[self.base.deps.index(dep)]
        return self.coefficients[JetVar(dep, order)]

    def apply(self, f: Poly) -> Poly:
        """``X^(k) f`` for ``f`` on jets up to the prolonged order."""
        out = self.base.apply(f)
        for j, c in self.coefficients.items():
            if c:
                out = out + c * f.diff(j)
        return out


def total_derivative(e: Poly, sys: OdeSystem, max_order: int | None = None) -> Poly:
    """``D_x e``; never substitutes the equations."""
    if max_order is None:
        max_order = max((a.order for a in e.atoms() if isinstance(a, JetVar) and a.dep in sys.deps),
                        default=0)
    out = e.diff(Var(sys.indep))
    for d in sys.deps:
        for k in range(max_order + 1):
            de = e.diff(jet(d, k))
            if de:
                out = out + Poly.atom(JetVar(d, k + 1)) * de
    return out


def _check_space(g: Generator, sys: OdeSystem):
    if g.variables != sys.variables:
        raise ValueError(f"generator variables {g.variables} do not match system {sys.variables}")


@lru_cache(maxsize=4096)
def prolong(g: Generator, sys: OdeSystem, k: int) -> ProlongedGenerator:
    """Extension coefficients ``eta_i^(j) = D_x eta_i^(j-1) - y_i^(j) D_x xi``."""
    if k < 1:
        raise ValueError("prolongation order must be >= 1")
    _check_space(g, sys)
    if k > 1:
        prev = prolong(g, sys, k - 1).coefficients
    else:
        prev = {}
    dxi = total_derivative(g.xi, sys, 0)
    coeffs = dict(prev)
    for d, eta in zip(sys.deps, g.etas):
        last = eta if k == 1 else prev[JetVar(d, k - 1)]
        coeffs[JetVar(d, k)] = (total_derivative(last, sys, k - 1)
                                - Poly.atom(JetVar(d, k)) * dxi)
    return ProlongedGenerator(g, coeffs)


def symmetry_residuals(g: Generator, sys: OdeSystem) -> list:
    """On-shell ``eta_i^(n) - X^(n-1) f_i``; all zero iff ``g`` is a symmetry."""
    n = sys.order
    top = prolong(g, sys, n)
    lower = prolong(g, sys, n - 1) if n > 1 else ProlongedGenerator(g, {})
    out = []
    for d, f in zip(sys.deps, sys.rhs):
        r = top.coefficient(d, n) - lower.apply(f)
        out.append(sys.on_shell(r))
    return out


def is_symmetry(g: Generator, sys: OdeSystem) -> bool:
    return all(r.is_zero() for r in symmetry_residuals(g, sys))


# -- closed-form second extension for two dependents ------------------------

PRINTED = "printed"
CORRECTED = "corrected"


def second_extension_explicit(g: Generator, variant: str = PRINTED):
    """Hand-expanded second extension coefficients for dependents (y, z).

    ``variant="printed"`` transcribes the published expansion term by term,
    including its second formula exactly as typeset.  ``variant="corrected"``
    replaces the three terms of that second formula which disagree with the
    recursive definition (see ``EXPLICIT_DISCREPANCIES``).
    """
    if len(g.etas) != 2:
        raise ValueError("the explicit formulas need exactly two dependent variables")
    if variant not in (PRINTED, CORRECTED):
        raise ValueError(f"unknown variant {variant!r}")
    x, y, z = g.variables
    yp, zp = Poly.atom(JetVar(y, 1)), Poly.atom(JetVar(z, 1))
    ypp, zpp = Poly.atom(JetVar(y, 2)), Poly.atom(JetVar(z, 2))

    def d(f, *vs):
        for v in vs:
            f = f.diff(Var(v))
        return f

    xi, e1, e2 = g.xi, g.etas[0], g.etas[1]
    eta1 = (d(e1, x, x) + yp * (2 * d(e1, x, y) - d(xi, x, x)) + 2 * zp * d(e1, x, z)
            + ypp * (d(e1, y) - 2 * d(xi, x) - 3 * yp * d(xi, y) - 2 * zp * d(xi, z))
            + zpp * (d(e1, z) - yp * d(xi, z))
            + yp ** 2 * (d(e1, y, y) - 2 * d(xi, x, y) - 2 * zp * d(xi, y, z))
            + 2 * yp * zp * (d(e1, y, z) - d(xi, x, z))
            + zp ** 2 * (d(e1, z, z) - yp * d(xi, z, z))
            - yp ** 3 * d(xi, y, y))
    if variant == PRINTED:
        z_lin = 2 * d(e1, x, z)
        zz_shear = zp * d(xi, y, z)
        yy_second = d(e2, z, z)
    else:
        z_lin = 2 * d(e2, x, z)
        zz_shear = yp * d(xi, y, z)
        yy_second = d(e2, y, y)
    eta2 = (d(e2, x, x) + zp * (z_lin - d(xi, x, x)) + 2 * yp * d(e2, x, y)
            + zpp * (d(e2, z) - 2 * d(xi, x) - 2 * yp * d(xi, y) - 3 * zp * d(xi, z))
            + ypp * (d(e2, y) - zp * d(xi, y))
            + zp ** 2 * (d(e2, z, z) - 2 * d(xi, x, z) - 2 * zz_shear)
            + 2 * yp * zp * (d(e2, y, z) - d(xi, x, y))
            + yp ** 2 * (yy_second - zp * d(xi, y, y))
            - zp ** 3 * d(xi, z, z))
    return eta1, eta2


EXPLICIT_DISCREPANCIES = (
    ("z' group", "2*eta1_{,xz}", "2*eta2_{,xz}"),
    ("z'^2 group", "-2*z'*xi_{,yz}", "-2*y'*xi_{,yz}"),
    ("y'^2 group", "eta2_{,zz}", "eta2_{,yy}"),
)


def lift_point_generator(xi: Poly, eta: Poly, x="x", y="y", z="z") -> Generator:
    """Lift a scalar point field (xi, eta)(x, y) to (x, y, z) with z standing for y'.

    The z-component is the first extension coefficient with y' renamed z.
    """
    scalar = OdeSystem(x, (y,), 3, (Poly.const(0),))
    first = prolong(Generator(xi, (eta,), (x, y)), scalar, 1).coefficient(y, 1)
    return Generator(xi, (eta, first.subs({JetVar(y, 1): Poly.var(z)})), (x, y, z))


def jet_atoms(p: Poly):
    return {a for a in p.atoms() if isinstance(a, JetVar)}


def coefficient_free_of_jets(p: Poly) -> bool:
    return not jet_atoms(p)


__all__ = [
    "CORRECTED", "EXPLICIT_DISCREPANCIES", "Generator", "OdeSystem", "PRINTED",
    "ProlongedGenerator", "is_symmetry", "lift_point_generator", "prolong",
    "second_extension_explicit", "symmetry_residuals", "total_derivative",
]
