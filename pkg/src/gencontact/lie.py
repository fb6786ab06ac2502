"""Brackets, span membership and closure for finite sets of generators."""
from __future__ import annotations

import threading
from dataclasses import dataclass

from .expr import Poly, format_poly
from .expr.poly import atom_dependencies, intern
from .jet import Generator, _same_space
from .linalg import SpanSolver

_ZERO = Poly.const(0)
_ONE = Poly.const(1)


def commutator(a: Generator, b: Generator) -> Generator:
    """``[a, b]`` with components ``a(b_k) - b(a_k)``."""
    _same_space(a, b)
    comps = [a.apply(cb) - b.apply(ca) for ca, cb in zip(a.coefficients, b.coefficients)]
    name = f"[{a.name},{b.name}]" if a.name and b.name else ""
    return Generator(comps[0], tuple(comps[1:]), a.variables, name)


class BracketCache:
    """Symmetric cache: ``[b, a]`` is served as ``-[a, b]``."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def __call__(self, a: Generator, b: Generator) -> Generator:
        key = (a, b)
        with self._lock:
            hit = self._data.get(key)
            if hit is None and (b, a) in self._data:
                hit = self._data[(b, a)].scale(-1)
        if hit is None:
            hit = commutator(a, b)
            with self._lock:
                self._data[key] = hit
        return hit


def _is_scalar_atom(base_vars):
    cache = {}

    def test(atom):
        r = cache.get(atom)
        if r is None:
            r = cache[atom] = not (atom_dependencies(intern(atom)) & base_vars)
        return r
    return test


def coordinates(g: Generator) -> dict:
    """Sparse vector over the scalars: ``(component, function monomial) -> scalar``.

    Scalars are the atoms that do not depend on any base variable, so
    symbolic constants such as ``sqrt(a0)`` become coefficients.
    """
    scalar = _is_scalar_atom(frozenset(g.variables))
    out = {}
    for i, c in enumerate(g.coefficients):
        for mono, coeff in c.split(lambda a: not scalar(a)).items():
            out[(i, mono)] = coeff
    return out


class Span:
    """Row-reduced span of generators over the scalar field."""

    def __init__(self, basis):
        self.basis = list(basis)
        self.solver = SpanSolver(_ZERO, _ONE)
        self.dependent = []
        for i, g in enumerate(self.basis):
            if not self.solver.add(coordinates(g)):
                self.dependent.append(i)

    @property
    def rank(self):
        return self.solver.rank

    def express(self, g: Generator):
        coords = self.solver.express(coordinates(g))
        if coords is None:
            return None
        return tuple(coords.get(i, _ZERO) for i in range(len(self.basis)))


def express_in_basis(g: Generator, basis) -> tuple | None:
    """Scalars ``c`` with ``sum c_i basis_i = g``, or None when not in the span."""
    return Span(basis).express(g)


def rank(generators) -> int:
    return Span(generators).rank


def independent(generators) -> bool:
    return not Span(generators).dependent


def combination(coeffs, basis) -> Generator:
    out = None
    for c, g in zip(coeffs, basis):
        if c.is_zero():
            continue
        term = g.scale(c)
        out = term if out is None else out + term
    if out is None:
        z = basis[0]
        return Generator(_ZERO, tuple(_ZERO for _ in z.etas), z.variables)
    return out


@dataclass
class LieAlgebraBasis:
    generators: list
    structure: dict  # (i, j) -> tuple of scalars, i < j

    @property
    def dimension(self):
        return len(self.generators)

    def constants(self, i, j):
        if i < j:
            return self.structure[(i, j)]
        if i == j:
            return tuple(_ZERO for _ in self.generators)
        return tuple(-c for c in self.structure[(j, i)])


@dataclass
class ClosureFailure:
    i: int
    j: int
    bracket: Generator


@dataclass
class DependentBasis:
    indices: list


def closure_check(basis, bracket=None):
    """Structure constants if ``basis`` closes, else the first offending pair."""
    basis = list(basis)
    span = Span(basis)
    if span.dependent:
        return DependentBasis(span.dependent)
    bracket = bracket or BracketCache()
    structure = {}
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            br = bracket(basis[i], basis[j])
            coords = span.express(br)
            if coords is None:
                return ClosureFailure(i, j, br)
            structure[(i, j)] = coords
    return LieAlgebraBasis(basis, structure)


def format_structure_line(alg: LieAlgebraBasis, i: int, j: int) -> str:
    names = [g.name or f"G{k + 1}" for k, g in enumerate(alg.generators)]
    terms = []
    for c, n in zip(alg.constants(i, j), names):
        if c.is_zero():
            continue
        v = c.const_value()
        if v is not None:
            coef = "" if v == 1 else "-" if v == -1 else f"{format_poly(c)}*"
        else:
            coef = f"({format_poly(c)})*"
        terms.append(f"{coef}{n}")
    rhs = " + ".join(terms).replace("+ -", "- ") or "0"
    return f"[{names[i]},{names[j]}] = {rhs}"


def jacobi_residual(a, b, c, bracket=None) -> Generator:
    br = bracket or commutator
    return br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))


__all__ = [
    "BracketCache", "ClosureFailure", "DependentBasis", "LieAlgebraBasis", "Span",
    "closure_check", "combination", "commutator", "coordinates", "express_in_basis",
    "format_structure_line", "independent", "jacobi_residual", "rank",
]
