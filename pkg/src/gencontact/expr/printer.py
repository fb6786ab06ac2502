"""Render trees in the input grammar with minimal parentheses."""
from __future__ import annotations

from .poly import AlgebraicConst, JetVar, Poly, UnknownFn, Var
from .tree import Exp, Power, Product, Rational, Sqrt, Sum, to_tree

SUM, PRODUCT, UNARY, POWER, ATOM = range(5)


def _prec(node):
    if isinstance(node, Sum):
        return SUM
    if isinstance(node, Product):
        first = node.factors[0]
        if isinstance(first, Rational) and first.value < 0:
            return UNARY
        return PRODUCT
    if isinstance(node, Power):
        return POWER
    if isinstance(node, Rational):
        if node.value < 0:
            return UNARY
        return PRODUCT if node.denominator != 1 else ATOM
    return ATOM


def _is_negative(node):
    return _prec(node) == UNARY


def _negate(node):
    if isinstance(node, Rational):
        return Rational(-node.value.numerator, node.value.denominator)
    first, rest = node.factors[0], node.factors[1:]
    if first.value == -1:
        return rest[0] if len(rest) == 1 else Product(rest)
    return Product((_negate(first),) + rest)


def fn_name(f: UnknownFn, args=True):
    name = f.name
    if any(f.orders):
        name += "_{," + f.derivative_letters + "}"
    if args:
        name += "(" + ",".join(f.args) + ")"
    return name


def jet_name(dep, order):
    if order <= 4:
        return dep + "'" * order
    return f"D({dep},x,{order})"


def format_expr(node, args=True) -> str:
    """Print a tree; ``args=False`` drops unknown-function argument lists."""
    if isinstance(node, Poly):
        node = to_tree(node)
    return _fmt(node, args)


def format_poly(p: Poly, args=True) -> str:
    return _fmt(to_tree(p), args)


def _wrap(node, args, need):
    s = _fmt(node, args)
    return f"({s})" if _prec(node) < need else s


def _fmt(node, args):
    if isinstance(node, Rational):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, JetVar):
        return jet_name(node.dep, node.order)
    if isinstance(node, UnknownFn):
        return fn_name(node, args)
    if isinstance(node, AlgebraicConst):
        return node.name
    if isinstance(node, Exp):
        return f"exp({_fmt(node.arg, args)})"
    if isinstance(node, Sqrt):
        return f"sqrt({_fmt(node.arg, args)})"
    if isinstance(node, Sum):
        out = _fmt(node.terms[0], args)
        for t in node.terms[1:]:
            if _is_negative(t):
                out += " - " + _wrap(_negate(t), args, PRODUCT)
            else:
                out += " + " + _wrap(t, args, PRODUCT)
        return out
    if isinstance(node, Product):
        factors = list(node.factors)
        sign = ""
        if isinstance(factors[0], Rational):
            c = factors[0].value
            if c < 0:
                sign = "-"
                c = -c
            if c == 1 and len(factors) > 1:
                factors.pop(0)
            else:
                factors[0] = Rational(c.numerator, c.denominator)
        body = "*".join(_wrap(f, args, PRODUCT + (i > 0)) for i, f in enumerate(factors))
        return sign + body
    if isinstance(node, Power):
        base = _wrap(node.base, args, ATOM)
        e = node.exponent
        if isinstance(e, Rational) and e.denominator == 1:
            exp = str(e.value.numerator)
        else:
            exp = _wrap(e, args, ATOM)
        return f"{base}^{exp}"
    raise TypeError(f"cannot format {node!r}")
