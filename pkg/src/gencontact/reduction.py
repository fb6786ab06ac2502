"""Order reduction of a scalar ODE to a first-derivative system, plus the
contact and Laguerre predicates for linear equations."""
from __future__ import annotations

from dataclasses import dataclass

from .expr import JetVar, Poly, Var, jet
from .jet import OdeSystem


class NotLinear(ValueError):
    pass


@dataclass(frozen=True)
class ScalarOde:
    """``dep^(order) = rhs`` with ``rhs`` over jets of order < ``order``."""

    indep: str
    dep: str
    order: int
    rhs: Poly

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        for a in self.rhs.atoms():
            if isinstance(a, JetVar) and a.dep == self.dep and a.order >= self.order:
                raise ValueError(f"right-hand side contains {self.dep} of order {a.order}")

    @classmethod
    def from_system(cls, sys: OdeSystem) -> "ScalarOde":
        if len(sys.deps) != 1:
            raise ValueError("a scalar equation has exactly one dependent variable")
        return cls(sys.indep, sys.deps[0], sys.order, sys.rhs[0])

    def as_system(self) -> OdeSystem:
        return OdeSystem(self.indep, (self.dep,), self.order, (self.rhs,))


@dataclass(frozen=True)
class TripleMap:
    """``(t, u, v) = (phi, psi, omega)(x, y, z)``."""

    phi: Poly
    psi: Poly
    omega: Poly


def scalar_to_system(ode: ScalarOde, new_dep: str = "z") -> OdeSystem:
    """``y^(n) = f`` becomes ``y^(n-1) = z^(n-2)``, ``z^(n-1) = f`` with
    every ``y^(k)`` (k >= 1) in ``f`` renamed ``z^(k-1)``."""
    n = ode.order
    if n < 3:
        raise ValueError("order reduction needs n >= 3")
    if new_dep in (ode.indep, ode.dep):
        raise ValueError(f"{new_dep!r} clashes with an existing variable")
    rename = {JetVar(ode.dep, k): Poly.atom(jet(new_dep, k - 1)) for k in range(1, n)}
    f = ode.rhs.subs(rename)
    return OdeSystem(ode.indep, (ode.dep, new_dep), n - 1,
                     (Poly.atom(jet(new_dep, n - 2)), f))


def linear_coefficients(ode: ScalarOde) -> dict:
    """``{k: c_k}`` and ``{"free": c}`` with ``rhs = c + sum c_k y^(k)``;
    coefficients may depend on the independent variable only."""
    jets = [jet(ode.dep, k) for k in range(ode.order)]
    names = {ode.dep} | {f"{ode.dep}{chr(39) * k}" for k in range(1, ode.order)}
    out = {}
    rest = ode.rhs
    for k, j in enumerate(jets):
        c = ode.rhs.diff(j)
        if c.depends_on(names):
            raise NotLinear(f"right-hand side is not linear in {ode.dep} and its derivatives")
        if c:
            out[k] = c
        rest = rest - c * Poly.atom(j)
    if rest.depends_on(names):
        raise NotLinear("right-hand side is not linear")
    out["free"] = rest
    return out


def is_laguerre_form(ode: ScalarOde) -> bool:
    """True iff the two highest lower-order coefficients vanish."""
    c = linear_coefficients(ode)
    return ode.order - 1 not in c and ode.order - 2 not in c


def contact_condition_residual(m: TripleMap, x="x", y="y", z="z") -> Poly:
    """``omega * D phi - D psi`` with ``D = d/dx + z d/dy + z' d/dz``.

    Zero identically exactly when ``v = du/dt``; the form is already
    cleared of the ``D phi`` denominator.
    """
    zp = Poly.atom(JetVar(z, 1))
    Z = Poly.var(z)

    def D(f):
        return f.diff(Var(x)) + Z * f.diff(Var(y)) + zp * f.diff(Var(z))

    return m.omega * D(m.phi) - D(m.psi)


def point_lift(phi: Poly, psi: Poly, x="x", y="y", z="z") -> tuple:
    """Prolongation of a point map: ``omega = (psi_x + z psi_y)/(phi_x + z phi_y)``
    returned as (numerator, denominator)."""
    Z = Poly.var(z)
    num = psi.diff(Var(x)) + Z * psi.diff(Var(y))
    den = phi.diff(Var(x)) + Z * phi.diff(Var(y))
    return num, den


def lifted_contact_residual(phi: Poly, psi: Poly, x="x", y="y", z="z") -> Poly:
    """Contact residual of a point lift, multiplied through by its denominator."""
    num, den = point_lift(phi, psi, x, y, z)
    zp = Poly.atom(JetVar(z, 1))
    Z = Poly.var(z)

    def D(f):
        return f.diff(Var(x)) + Z * f.diff(Var(y)) + zp * f.diff(Var(z))

    return num * D(phi) - den * D(psi)


@dataclass
class LinearClassification:
    delta: Poly
    sigma: Poly
    alpha: Poly
    beta: Poly
    eligible: bool
    system: OdeSystem | None

    @property
    def reason(self):
        if self.eligible:
            return "delta = sigma = 0"
        bad = [n for n, v in (("delta", self.delta), ("sigma", self.sigma)) if v]
        return " and ".join(f"{n} != 0" for n in bad)


def classify_linear_third_order(ode: ScalarOde, new_dep="z") -> LinearClassification:
    """Read ``y''' = delta + sigma y + alpha y' + beta y''`` and reduce when
    ``delta = sigma = 0``."""
    if ode.order != 3:
        raise ValueError("expected a third-order equation")
    c = linear_coefficients(ode)
    zero = Poly.const(0)
    delta, sigma = c["free"], c.get(0, zero)
    alpha, beta = c.get(1, zero), c.get(2, zero)
    eligible = delta.is_zero() and sigma.is_zero()
    system = None
    if eligible:
        system = OdeSystem(ode.indep, (ode.dep, new_dep), 2,
                           (Poly.atom(JetVar(new_dep, 1)),
                            alpha * Poly.atom(JetVar(ode.dep, 1))
                            + beta * Poly.atom(JetVar(new_dep, 1))))
    return LinearClassification(delta, sigma, alpha, beta, eligible, system)


__all__ = [
    "LinearClassification", "NotLinear", "ScalarOde", "TripleMap", "classify_linear_third_order",
    "contact_condition_residual", "is_laguerre_form", "lifted_contact_residual",
    "linear_coefficients", "point_lift", "scalar_to_system",
]
