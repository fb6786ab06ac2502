"""Unnormalized expression trees and their conversion to and from ``Poly``."""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .poly import (
    AlgebraicConst,
    ExpAtom,
    InvAtom,
    JetVar,
    Poly,
    PowAtom,
    SqrtAtom,
    UnknownFn,
    Var,
    exp_of,
    pow_of,
    sqrt_of,
)


class Expr:
    """Base class of tree nodes.  Leaves are the atom classes themselves."""

    __slots__ = ()


@dataclass(frozen=True)
class Rational(Expr):
    value: mpq

    def __init__(self, num, den=1):
        object.__setattr__(self, "value", mpq(num, den))

    @property
    def numerator(self):
        return int(self.value.numerator)

    @property
    def denominator(self):
        return int(self.value.denominator)


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple


@dataclass(frozen=True)
class Power(Expr):
    base: object
    exponent: object


@dataclass(frozen=True)
class Exp(Expr):
    arg: object


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: object


LEAVES = (Var, JetVar, UnknownFn, AlgebraicConst)


def to_poly(node) -> Poly:
    """Evaluate a tree into canonical form."""
    if isinstance(node, Poly):
        return node
    if isinstance(node, Rational):
        return Poly.const(node.value)
    if isinstance(node, LEAVES):
        return Poly.atom(node)
    if isinstance(node, Sum):
        out = Poly.const(0)
        for t in node.terms:
            out = out + to_poly(t)
        return out
    if isinstance(node, Product):
        out = Poly.const(1)
        for f in node.factors:
            out = out * to_poly(f)
        return out
    if isinstance(node, Power):
        return pow_of(to_poly(node.base), to_poly(node.exponent))
    if isinstance(node, Exp):
        return exp_of(to_poly(node.arg))
    if isinstance(node, Sqrt):
        return sqrt_of(to_poly(node.arg))
    raise TypeError(f"not an expression node: {node!r}")


def _atom_tree(atom, exponent):
    if isinstance(atom, LEAVES):
        node = atom
    elif isinstance(atom, SqrtAtom):
        node = Sqrt(to_tree(atom.arg))
    elif isinstance(atom, ExpAtom):
        node = Exp(to_tree(atom.arg))
    elif isinstance(atom, PowAtom):
        node = Power(to_tree(atom.base), to_tree(atom.expo))
    elif isinstance(atom, InvAtom):
        return Power(to_tree(atom.base), Rational(-exponent))
    else:
        raise TypeError(atom)
    return node if exponent == 1 else Power(node, Rational(exponent))


def to_tree(p: Poly):
    """Canonical tree of a normal form (deterministic term and factor order)."""
    terms = []
    for coeff, factors in p.monomials():
        parts = [_atom_tree(a, e) for a, e in sorted(factors, key=lambda f: f[0].sort_key())]
        if coeff != 1 or not parts:
            parts.insert(0, Rational(coeff.numerator, coeff.denominator))
        terms.append(parts[0] if len(parts) == 1 else Product(tuple(parts)))
    if not terms:
        return Rational(0)
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))
