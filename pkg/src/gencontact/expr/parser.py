"""Recursive-descent parser for the expression language.

Grammar (whitespace insignificant)::

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := '-' factor | primary ('^' factor)?
    primary  := atom | '(' expr ')'
    atom     := INT | IDENT | IDENT '(' expr (',' expr)* ')' | IDENT "'"+
              | 'exp' '(' expr ')' | 'sqrt' '(' expr ')'
              | 'D' '(' IDENT ',' IDENT ',' INT ')'
              | IDENT '_{,' LETTERS '}' ('(' IDENT (',' IDENT)* ')')?

``^`` is right-associative and binds tighter than unary minus.  The last
atom form is a partial derivative of an unknown function, e.g. ``xi_{,xy}``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .poly import AlgebraicConst, JetVar, Poly, UnknownFn, Var, atom_of
from .tree import Exp, Power, Product, Rational, Sqrt, Sum, to_poly

DEFAULT_EXPONENT_SYMBOLS = frozenset({"m", "n"})
RESERVED = {"exp", "sqrt", "D"}


class ParseError(ValueError):
    def __init__(self, message, text="", pos=0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


@dataclass
class Scope:
    """Names the parser must resolve specially.

    functions: name -> argument names, so ``xi`` alone means ``xi(x,y,z)``.
    algebraic: name -> (p, q) for constants with ``c^2 = p*c + q``.
    exponent_symbols: identifiers allowed in symbolic exponents.
    """

    functions: dict = field(default_factory=dict)
    algebraic: dict = field(default_factory=dict)
    exponent_symbols: frozenset = DEFAULT_EXPONENT_SYMBOLS

    def merged(self, other: "Scope") -> "Scope":
        return Scope({**self.functions, **other.functions},
                     {**self.algebraic, **other.algebraic},
                     self.exponent_symbols | other.exponent_symbols)


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<deriv>[A-Za-z_][A-Za-z0-9_]*?_\{,[A-Za-z0-9]+\})
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<primes>'+)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unknown token {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, scope):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.scope = scope

    def peek(self, value=None):
        kind, tok, _ = self.toks[self.i]
        if value is None:
            return kind, tok
        return tok == value and kind in ("op", "primes")

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, tok, pos = self.take()
        if tok != value:
            raise ParseError(f"expected {value!r}, found {tok or 'end of input'!r}", self.text, pos)

    def error(self, msg):
        raise ParseError(msg, self.text, self.toks[self.i][2])

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        terms = [self.term()]
        while self.peek("+") or self.peek("-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else _neg(t))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek("*") or self.peek("/"):
            op = self.take()[1]
            f = self.factor()
            if op == "*":
                factors.append(f)
            elif isinstance(f, Rational) and isinstance(factors[-1], Rational):
                factors[-1] = Rational(factors[-1].value / f.value)
            else:
                factors.append(Power(f, Rational(-1)))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        if self.peek("-"):
            self.take()
            return _neg(self.factor())
        base = self.primary()
        if self.peek("^"):
            self.take()
            start = self.toks[self.i][2]
            exponent = self.factor()
            self._check_exponent(exponent, start)
            return Power(base, exponent)
        return base

    def _check_exponent(self, exponent, pos):
        p = to_poly(exponent)
        value = p.const_value()
        if value is not None:
            if value.denominator != 1:
                raise ParseError("exponent must be an integer", self.text, pos)
            return
        for aid in p.atom_ids():
            a = atom_of(aid)
            if not (isinstance(a, Var) and a.name in self.scope.exponent_symbols):
                raise ParseError("exponent neither integer nor declared symbolic constant",
                                 self.text, pos)
        if p.terms.get((), 0) and p.terms[()].denominator != 1:
            raise ParseError("exponent must be an integer", self.text, pos)

    def primary(self):
        kind, tok, pos = self.take()
        if kind == "op" and tok == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "int":
            return Rational(int(tok))
        if kind == "deriv":
            name, letters = tok[:-1].split("_{,")
            return self._derivative(name, letters, pos)
        if kind == "ident":
            return self._ident(tok, pos)
        raise ParseError(f"unexpected {tok or 'end of input'!r}", self.text, pos)

    def _arglist(self):
        self.expect("(")
        args = [self.expr()]
        while self.peek(","):
            self.take()
            args.append(self.expr())
        self.expect(")")
        return args

    def _ident(self, name, pos):
        if name in ("exp", "sqrt") and self.peek("("):
            args = self._arglist()
            if len(args) != 1:
                raise ParseError(f"{name} takes one argument", self.text, pos)
            return Exp(args[0]) if name == "exp" else Sqrt(args[0])
        if name == "D" and self.peek("("):
            self.expect("(")
            dep = self._plain_ident()
            self.expect(",")
            self._plain_ident()
            self.expect(",")
            kind, tok, p = self.take()
            if kind != "int":
                raise ParseError("derivative order must be an integer", self.text, p)
            self.expect(")")
            order = int(tok)
            return Var(dep) if order == 0 else JetVar(dep, order)
        if self.peek()[0] == "primes":
            order = len(self.take()[1])
            return JetVar(name, order)
        if self.peek("("):
            args = tuple(self._var_args(name, pos))
            declared = self.scope.functions.get(name)
            if declared is not None and tuple(declared) != args:
                raise ParseError(f"{name} declared with arguments {tuple(declared)}", self.text, pos)
            return UnknownFn(name, args)
        if name in self.scope.algebraic:
            p, q = self.scope.algebraic[name]
            return AlgebraicConst(name, p, q)
        if name in self.scope.functions:
            return UnknownFn(name, tuple(self.scope.functions[name]))
        return Var(name)

    def _plain_ident(self):
        kind, tok, pos = self.take()
        if kind != "ident":
            raise ParseError("expected identifier", self.text, pos)
        return tok

    def _var_args(self, name, pos):
        self.expect("(")
        args = [self._plain_ident()]
        while self.peek(","):
            self.take()
            args.append(self._plain_ident())
        self.expect(")")
        return args

    def _derivative(self, name, letters, pos):
        if self.peek("("):
            args = tuple(self._var_args(name, pos))
        elif name in self.scope.functions:
            args = tuple(self.scope.functions[name])
        else:
            raise ParseError(f"arguments of {name} unknown; declare the function", self.text, pos)
        orders = [0] * len(args)
        rest = letters
        while rest:
            for i, a in sorted(enumerate(args), key=lambda t: -len(t[1])):
                if rest.startswith(a):
                    orders[i] += 1
                    rest = rest[len(a):]
                    break
            else:
                raise ParseError(f"{letters!r} is not a derivative in {args}", self.text, pos)
        return UnknownFn(name, args, tuple(orders))


def _neg(node):
    if isinstance(node, Rational):
        return Rational(-node.value)
    return Product((Rational(-1), node))


def parse(text: str, scope: Scope | None = None):
    """Parse ``text`` into an unnormalized tree."""
    return _Parser(text, scope or Scope()).parse()


def parse_poly(text: str, scope: Scope | None = None) -> Poly:
    return to_poly(parse(text, scope))
