"""Exact symbolic expressions: trees for I/O, ``Poly`` for computation.

The functions here accept either a tree or a ``Poly`` and answer in the same
kind, so callers can stay in whichever representation suits them.
"""
from .parser import DEFAULT_EXPONENT_SYMBOLS, ParseError, Scope, parse, parse_poly
from .poly import (
    AlgebraicConst,
    JetVar,
    Poly,
    UnknownFn,
    Var,
    exp_of,
    jet,
    pow_of,
    sqrt_of,
)
from .printer import format_expr, format_poly
from .tree import Exp, Expr, Power, Product, Rational, Sqrt, Sum, to_poly, to_tree


def _out(like, p):
    return p if isinstance(like, Poly) else to_tree(p)


def normalize(e):
    return to_tree(to_poly(e))


def diff(e, v):
    return _out(e, to_poly(e).diff(v))


def substitute(e, bindings):
    b = {k: to_poly(v) if not isinstance(v, (int,)) else v for k, v in bindings.items()}
    return _out(e, to_poly(e).subs(b))


def is_zero(e) -> bool:
    return to_poly(e).is_zero()


def const(value) -> Poly:
    return Poly.const(value)


def var(name) -> Poly:
    return Poly.var(name)


__all__ = [
    "AlgebraicConst", "DEFAULT_EXPONENT_SYMBOLS", "Exp", "Expr", "JetVar", "ParseError",
    "Poly", "Power", "Product", "Rational", "Scope", "Sqrt", "Sum", "UnknownFn", "Var",
    "const", "diff", "exp_of", "format_expr", "format_poly", "is_zero", "jet", "normalize",
    "parse", "parse_poly", "pow_of", "sqrt_of", "substitute", "to_poly", "to_tree", "var",
]
