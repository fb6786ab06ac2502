"""Canonical normal form: Laurent polynomials over Q in interned atoms.

Atoms are the indivisible symbols of the rewrite system.  Plain atoms
(``Var``, ``JetVar``, ``UnknownFn``) behave as independent indeterminates and
may carry negative exponents.  The remaining kinds carry rewrite rules that
``_canon`` applies to a fixpoint:

* quadratic atoms (``AlgebraicConst``, ``SqrtAtom``) satisfy ``c^2 = p*c + q``
  and never appear with an exponent other than 1;
* group atoms (``ExpAtom``, ``PowAtom``) merge additively in their exponent,
  at most one per family and monomial;
* ``InvAtom(b)`` stands for ``1/b`` with ``b`` a primitive multi-term
  polynomial; every polynomial containing it is kept as ``N * InvAtom(b)^K``
  with ``b`` not dividing ``N``.

Zero testing is exact and complete relative to these rules, assuming the
atoms are otherwise algebraically independent and inverse bases are
irreducible and pairwise coprime.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from math import gcd, lcm

import gmpy2
from gmpy2 import mpq

from .._backend import kernel

_mono_mul = kernel.mono_mul
_poly_add = kernel.poly_add
_poly_addmul = kernel.poly_addmul
_poly_mul = kernel.poly_mul
_poly_scale = kernel.poly_scale
_touches = kernel.touches

PLAIN, QUAD, GROUP, INV = range(4)


# --------------------------------------------------------------------------
# atoms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """An independent variable or a symbolic constant."""

    name: str

    kind = PLAIN

    def sort_key(self):
        return (self.name, 0, 0, ())


@dataclass(frozen=True)
class JetVar:
    """Derivative coordinate ``dep^(order)``; order 0 is spelled ``Var(dep)``."""

    dep: str
    order: int

    kind = PLAIN

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("JetVar order must be >= 1; use Var for order 0")

    def sort_key(self):
        return (self.dep, self.order, 0, ())


def jet(dep: str, order: int):
    return Var(dep) if order == 0 else JetVar(dep, order)


@dataclass(frozen=True)
class UnknownFn:
    """Opaque function of named variables, possibly differentiated.

    ``orders[i]`` is the number of derivatives taken in ``args[i]``.
    """

    name: str
    args: tuple
    orders: tuple = None

    kind = PLAIN

    def __post_init__(self):
        if self.orders is None:
            object.__setattr__(self, "orders", (0,) * len(self.args))
        if len(self.orders) != len(self.args):
            raise ValueError("derivative orders must match arguments")
        if len(set(self.args)) != len(self.args):
            raise ValueError(f"repeated argument in {self.name}{self.args}")

    @property
    def base(self):
        return UnknownFn(self.name, self.args)

    @property
    def derivative_letters(self):
        return "".join(a * k for a, k in zip(self.args, self.orders))

    def sort_key(self):
        return (self.name, sum(self.orders), 1, tuple(-k for k in self.orders))


@dataclass(frozen=True)
class AlgebraicConst:
    """Named constant ``c`` with ``c^2 = p*c + q`` (``p``, ``q`` free of ``c``)."""

    name: str
    p: "Poly" = field(compare=True)
    q: "Poly" = field(compare=True)

    kind = QUAD

    def sort_key(self):
        return (self.name, 0, 2, ())


@dataclass(frozen=True)
class SqrtAtom:
    arg: "Poly"

    kind = QUAD

    def sort_key(self):
        return ("sqrt", 0, 3, self.arg.sort_key())


@dataclass(frozen=True)
class ExpAtom:
    arg: "Poly"

    kind = GROUP

    def sort_key(self):
        return ("exp", 0, 4, self.arg.sort_key())


@dataclass(frozen=True)
class PowAtom:
    """``base ** expo`` with ``expo`` a symbolic exponent without constant part."""

    base: "Poly"
    expo: "Poly"

    kind = GROUP

    def sort_key(self):
        bk = self.base.sort_key_as_atom()
        return (bk[0], bk[1], 5, (bk, self.expo.sort_key()))


@dataclass(frozen=True)
class InvAtom:
    base: "Poly"

    kind = INV

    def sort_key(self):
        bk = self.base.sort_key_as_atom()
        return (bk[0], bk[1], 6, bk)


# --------------------------------------------------------------------------
# interning
# --------------------------------------------------------------------------

_LOCK = threading.RLock()
_ATOMS: list = []
_IDS: dict = {}
_KIND: list = []
_SORT: list = []
_SPECIAL: set = set()
_INV_IDS: set = set()


def intern(atom) -> int:
    aid = _IDS.get(atom)
    if aid is not None:
        return aid
    with _LOCK:
        aid = _IDS.get(atom)
        if aid is None:
            aid = len(_ATOMS)
            _ATOMS.append(atom)
            _KIND.append(atom.kind)
            _SORT.append(atom.sort_key())
            if atom.kind != PLAIN:
                _SPECIAL.add(aid)
            if atom.kind == INV:
                _INV_IDS.add(aid)
            _IDS[atom] = aid
    return aid


def atom_of(aid: int):
    return _ATOMS[aid]


def _family(aid):
    a = _ATOMS[aid]
    return ("exp",) if isinstance(a, ExpAtom) else ("pow", a.base)


def _group_exponent(aid):
    a = _ATOMS[aid]
    return a.arg if isinstance(a, ExpAtom) else a.expo


def _relation(aid):
    a = _ATOMS[aid]
    if isinstance(a, SqrtAtom):
        return ZERO_POLY, a.arg
    return a.p, a.q


# --------------------------------------------------------------------------
# coefficients
# --------------------------------------------------------------------------

def to_mpq(value) -> mpq:
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, int):
        return mpq(value)
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return mpq(int(num), int(den))
    raise TypeError(f"not an exact rational: {value!r}")


_ONE = mpq(1)


# --------------------------------------------------------------------------
# Poly
# --------------------------------------------------------------------------

class Poly:
    """Immutable canonical expression.  Build with ``Poly.const``/``Poly.atom``
    and arithmetic; never mutate ``terms``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def _canon(cls, terms):
        return cls(_canon(terms))

    @classmethod
    def const(cls, value):
        c = to_mpq(value)
        return cls({(): c} if c else {})

    @classmethod
    def atom(cls, atom, exponent=1):
        return cls._canon({(intern(atom), exponent): _ONE})

    @classmethod
    def var(cls, name):
        return cls.atom(Var(name))

    @staticmethod
    def coerce(value):
        if isinstance(value, Poly):
            return value
        if isinstance(value, (Var, JetVar, UnknownFn, AlgebraicConst)):
            return Poly.atom(value)
        return Poly.const(value)

    # -- inspection --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self):
        """Rational value if constant, else ``None``."""
        if not self.terms:
            return mpq(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def atom_ids(self):
        out = set()
        for m in self.terms:
            out.update(m[0::2])
        return out

    def atoms(self):
        return {_ATOMS[a] for a in self.atom_ids()}

    def depends_on(self, names) -> bool:
        names = set(names)
        return any(atom_dependencies(a) & names for a in self.atom_ids())

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sort_key(self):
        return tuple(sorted((mono_sort_key(m), (int(c.numerator), int(c.denominator)))
                            for m, c in self.terms.items()))

    def sort_key_as_atom(self):
        """Key used when this polynomial is the base of an atom."""
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if len(m) == 2 and c == 1:
                return _SORT[m[0]]
        return ("~", 0, 9, self.sort_key())

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        return Poly._canon_add(_poly_add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.terms or not other.terms:
                return ZERO_POLY
            cv = other.const_value()
            if cv is not None:
                return Poly(_poly_scale(self.terms, cv))
            cv = self.const_value()
            if cv is not None:
                return Poly(_poly_scale(other.terms, cv))
            return Poly._canon(_poly_mul(self.terms, other.terms))
        try:
            c = to_mpq(other)
        except TypeError:
            return NotImplemented
        return Poly(_poly_scale(self.terms, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self * other.inverse()
        try:
            c = to_mpq(other)
        except TypeError:
            return NotImplemented
        return Poly(_poly_scale(self.terms, 1 / c))

    def __rtruediv__(self, other):
        return Poly.coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE_POLY
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    @classmethod
    def _canon_add(cls, terms):
        if _touches(terms, _INV_IDS):
            return cls(_cancel_inv(terms))
        return cls(terms)

    def inverse(self) -> "Poly":
        if not self.terms:
            raise ZeroDivisionError("inverse of zero")
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return Poly._canon({kernel.mono_pow(m, -1): 1 / c})
        content, mono, prim = _primitive_part(self.terms)
        inv_mono = kernel.mono_pow(mono, -1)
        core = {(intern(InvAtom(Poly(prim))), 1): _ONE}
        if inv_mono:
            core = {_mono_mul(k, inv_mono): v for k, v in core.items()}
        return Poly._canon(_poly_scale(core, 1 / content))

    # -- calculus and substitution -------------------------------------------
    def diff(self, v) -> "Poly":
        """Partial derivative with respect to a ``Var``/``JetVar`` (or name)."""
        if isinstance(v, str):
            v = Var(v)
        if not isinstance(v, (Var, JetVar)):
            raise TypeError(f"can only differentiate by a variable, not {v!r}")
        vid = intern(v)
        acc = {}
        for m, c in self.terms.items():
            for k in range(0, len(m), 2):
                d = _atom_diff(m[k], vid)
                if not d.terms:
                    continue
                e = m[k + 1]
                rest = m[:k] + ((m[k], e - 1) if e != 1 else ()) + m[k + 2:]
                _poly_addmul(acc, d.terms, c * e, rest)
        return Poly._canon(acc)

    def subs(self, bindings) -> "Poly":
        """Simultaneous substitution; keys are atoms, values coerced to Poly.

        An underived ``UnknownFn`` key also rewrites its derivatives by
        differentiating the replacement.
        """
        if not bindings:
            return self
        b = {}
        for k, v in bindings.items():
            if isinstance(k, str):
                k = Var(k)
            if isinstance(k, UnknownFn) and any(k.orders):
                raise ValueError("substitute the underived function, not a derivative")
            b[k] = Poly.coerce(v)
        memo = {}
        repl = {a: _atom_subs(a, b, memo) for a in self.atom_ids()}
        if all(r is None for r in repl.values()):
            return self
        acc = {}
        for m, c in self.terms.items():
            plain = []
            factor = None
            for k in range(0, len(m), 2):
                r = repl[m[k]]
                if r is None:
                    plain.extend(m[k:k + 2])
                    continue
                f = r ** m[k + 1]
                factor = f if factor is None else factor * f
            if factor is None:
                _poly_addmul(acc, {tuple(plain): c}, _ONE, ())
            else:
                _poly_addmul(acc, factor.terms, c, tuple(plain))
        return Poly._canon(acc)

    # -- splitting -----------------------------------------------------------
    def split(self, select) -> dict:
        """Group terms by the sub-monomial of atoms for which ``select(atom)``.

        Returns ``{selected_monomial: Poly}`` where selected monomials are raw
        sorted tuples; each value is canonicalized.
        """
        groups: dict = {}
        for m, c in self.terms.items():
            sel = []
            rest = []
            for k in range(0, len(m), 2):
                (sel if select(_ATOMS[m[k]]) else rest).extend(m[k:k + 2])
            groups.setdefault(tuple(sel), {})[tuple(rest)] = c
        return {k: Poly._canon(v) for k, v in groups.items()}

    def monomials(self):
        """Yield ``(coefficient, [(atom, exponent), ...])`` in canonical order."""
        for m in sorted(self.terms, key=mono_print_key):
            yield self.terms[m], [(_ATOMS[m[k]], m[k + 1]) for k in range(0, len(m), 2)]

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        from .printer import format_poly
        return format_poly(self)


def _coerce_or_none(value):
    try:
        return Poly.coerce(value)
    except TypeError:
        return None


ZERO_POLY = Poly({})
ONE_POLY = Poly({(): _ONE})


def mono_sort_key(m):
    return tuple((_SORT[m[k]], m[k + 1]) for k in sorted(range(0, len(m), 2),
                                                          key=lambda k: _SORT[m[k]]))


def mono_print_key(m):
    degree = sum(abs(m[k]) for k in range(1, len(m), 2))
    return (-degree, mono_sort_key(m))


# --------------------------------------------------------------------------
# canonicalization
# --------------------------------------------------------------------------

_FIX_CACHE: dict = {}


def _canon(terms):
    if not terms or not _touches(terms, _SPECIAL):
        return terms
    out = {}
    changed = False
    for m, c in terms.items():
        r = _fix_monomial(m)
        if r is None:
            _poly_addmul(out, {m: c}, _ONE, ())
        else:
            changed = True
            _poly_addmul(out, r, c, ())
    if not changed:
        out = terms
    if _touches(out, _INV_IDS):
        out = _cancel_inv(out)
    return out


def _fix_monomial(m):
    """Canonical expansion of one monomial, or ``None`` if already canonical."""
    try:
        return _FIX_CACHE[m]
    except KeyError:
        pass
    plain = []
    groups: dict = {}
    quads = []
    invs = []
    dirty = False
    for k in range(0, len(m), 2):
        a, e = m[k], m[k + 1]
        kind = _KIND[a]
        if kind == PLAIN:
            plain.extend((a, e))
        elif kind == GROUP:
            groups.setdefault(_family(a), []).append((a, e))
            dirty = dirty or e != 1
        elif kind == QUAD:
            quads.append((a, e))
            dirty = dirty or e != 1
        else:
            invs.append((a, e))
            dirty = dirty or e < 1
    if not dirty and all(len(g) == 1 for g in groups.values()):
        _FIX_CACHE[m] = None
        return None

    result = Poly({tuple(plain): _ONE})
    for fam, members in groups.items():
        total = ZERO_POLY
        for a, e in members:
            total = total + _group_exponent(a) * e
        if total.terms:
            atom = ExpAtom(total) if fam[0] == "exp" else PowAtom(fam[1], total)
            result = Poly(_poly_scale({_mono_mul(k, (intern(atom), 1)): v
                                       for k, v in result.terms.items()}, _ONE))
    for a, e in quads:
        result = result * _quad_power(a, e)
    for a, e in invs:
        if e >= 1:
            result = Poly._canon({_mono_mul(k, (a, e)): v for k, v in result.terms.items()})
        else:
            result = result * (_ATOMS[a].base ** (-e))
    out = result.terms
    _FIX_CACHE[m] = out
    return out


def _quad_power(aid, e) -> Poly:
    s = Poly({(aid, 1): _ONE})
    if e == 1:
        return s
    p, q = _relation(aid)
    if e == 2:
        return p * s + q
    if e > 2:
        return _quad_power(aid, e - 1) * s
    if e == 0:
        return ONE_POLY
    if not q.terms:
        raise ZeroDivisionError(f"{_ATOMS[aid]} has no inverse (constant term of its relation is 0)")
    inv = (s - p) * q.inverse()
    return inv ** (-e)


def _primitive_part(terms):
    """Split a multi-term polynomial into (rational content, monomial gcd, primitive part).

    The primitive part has coprime integer coefficients, a positive leading
    coefficient in canonical order, and no common monomial factor.
    """
    monos = list(terms)
    common = dict(zip(monos[0][0::2], monos[0][1::2]))
    for m in monos[1:]:
        here = dict(zip(m[0::2], m[1::2]))
        common = {a: min(e, here[a]) for a, e in common.items() if a in here}
    gmono = tuple(x for a in sorted(common) if common[a] for x in (a, common[a]))
    nums = [int(c.numerator) for c in terms.values()]
    dens = [int(c.denominator) for c in terms.values()]
    g = 0
    for n in nums:
        g = gcd(g, n)
    content = mpq(g, lcm(*dens))
    lead = max(monos, key=mono_sort_key)
    if terms[lead] < 0:
        content = -content
    inv_g = kernel.mono_pow(gmono, -1)
    prim = {(_mono_mul(m, inv_g) if inv_g else m): c / content for m, c in terms.items()}
    return content, gmono, prim


# -- inverse-atom cancellation ---------------------------------------------

def _cancel_inv(terms):
    for _ in range(50):
        changed = False
        ids = sorted({m[k] for m in terms for k in range(0, len(m), 2) if m[k] in _INV_IDS})
        for v in ids:
            new = _cancel_one(terms, v)
            if new != terms:
                terms = new
                changed = True
        if not changed:
            break
    return terms


def _cancel_one(terms, v):
    base = _ATOMS[v].base.terms
    exps = {}
    for m in terms:
        d = dict(zip(m[0::2], m[1::2]))
        exps[m] = d.get(v, 0)
    top = max(exps.values())
    if top <= 0:
        return terms
    powers = {0: {(): _ONE}}
    for k in range(1, top + 1):
        powers[k] = _poly_mul(powers[k - 1], base)
    numer = {}
    for m, c in terms.items():
        k = exps[m]
        stripped = tuple(x for i in range(0, len(m), 2) if m[i] != v for x in m[i:i + 2])
        _poly_addmul(numer, powers[top - k], c, stripped)
    if not numer:
        return {}
    # clear negative exponents so division happens in the polynomial ring
    low = {}
    for m in numer:
        for i in range(0, len(m), 2):
            if m[i + 1] < 0:
                low[m[i]] = min(low.get(m[i], 0), m[i + 1])
    shift = tuple(x for a in sorted(low) for x in (a, -low[a]))
    if shift:
        numer = {_mono_mul(m, shift): c for m, c in numer.items()}
    k = top
    while k > 0:
        q = _exact_divide(numer, base)
        if q is None:
            break
        numer = q
        k -= 1
    unshift = kernel.mono_pow(shift, -1) if shift else ()
    tail = _mono_mul(unshift, (v, k)) if k else unshift
    out = {(_mono_mul(m, tail) if tail else m): c for m, c in numer.items()}
    return _canon_no_inv(out)


def _canon_no_inv(terms):
    if not _touches(terms, _SPECIAL):
        return terms
    out = {}
    for m, c in terms.items():
        r = _fix_monomial(m)
        _poly_addmul(out, {m: c} if r is None else r, c if r is not None else _ONE, ())
    return out


def _lex_key(m):
    # lex order with smaller atom ids most significant
    return tuple(x for i in range(0, len(m), 2) for x in (-m[i], m[i + 1]))


def _lex_gt(a, b):
    i = j = 0
    while True:
        if i >= len(a):
            return False
        if j >= len(b):
            return True
        if a[i] != b[j]:
            return a[i] < b[j]
        if a[i + 1] != b[j + 1]:
            return a[i + 1] > b[j + 1]
        i += 2
        j += 2


def _leading(terms):
    it = iter(terms)
    best = next(it)
    for m in it:
        if _lex_gt(m, best):
            best = m
    return best


def _mono_div(a, b):
    da = dict(zip(a[0::2], a[1::2]))
    for i in range(0, len(b), 2):
        if da.get(b[i], 0) < b[i + 1]:
            return None
        da[b[i]] -= b[i + 1]
    return tuple(x for k in sorted(da) if da[k] for x in (k, da[k]))


def _exact_divide(numer, divisor):
    """Quotient if ``divisor`` divides ``numer`` in the free polynomial ring."""
    lt = _leading(divisor)
    lc = divisor[lt]
    neg = _poly_scale(divisor, -1)
    rem = dict(numer)
    quot = {}
    while rem:
        m = _leading(rem)
        qm = _mono_div(m, lt)
        if qm is None:
            return None
        c = rem[m] / lc
        quot[qm] = c
        _poly_addmul(rem, neg, c, qm)
    return quot


# --------------------------------------------------------------------------
# derivatives, dependencies, substitution of atoms
# --------------------------------------------------------------------------

_DIFF_CACHE: dict = {}
_DEP_CACHE: dict = {}


def atom_dependencies(aid) -> frozenset:
    """Names of ``Var``s (and ``dep'`` style jet names) an atom depends on."""
    try:
        return _DEP_CACHE[aid]
    except KeyError:
        pass
    a = _ATOMS[aid]
    if isinstance(a, Var):
        deps = frozenset((a.name,))
    elif isinstance(a, JetVar):
        deps = frozenset((f"{a.dep}{chr(39) * a.order}",))
    elif isinstance(a, UnknownFn):
        deps = frozenset(a.args)
    else:
        polys = {
            AlgebraicConst: lambda t: (t.p, t.q),
            SqrtAtom: lambda t: (t.arg,),
            ExpAtom: lambda t: (t.arg,),
            PowAtom: lambda t: (t.base, t.expo),
            InvAtom: lambda t: (t.base,),
        }[type(a)](a)
        deps = frozenset().union(*(atom_dependencies(i) for p in polys for i in p.atom_ids()))
    _DEP_CACHE[aid] = deps
    return deps


def _atom_diff(aid, vid) -> Poly:
    key = (aid, vid)
    hit = _DIFF_CACHE.get(key)
    if hit is not None:
        return hit
    a = _ATOMS[aid]
    v = _ATOMS[vid]
    if aid == vid:
        d = ONE_POLY
    elif isinstance(a, (Var, JetVar, AlgebraicConst)):
        d = ZERO_POLY
    elif isinstance(a, UnknownFn):
        if isinstance(v, Var) and v.name in a.args:
            i = a.args.index(v.name)
            orders = a.orders[:i] + (a.orders[i] + 1,) + a.orders[i + 1:]
            d = Poly.atom(UnknownFn(a.name, a.args, orders))
        else:
            d = ZERO_POLY
    elif isinstance(a, SqrtAtom):
        da = a.arg.diff(v)
        d = da * Poly({(aid, 1): _ONE}) * a.arg.inverse() / 2 if da.terms else ZERO_POLY
    elif isinstance(a, ExpAtom):
        da = a.arg.diff(v)
        d = da * Poly({(aid, 1): _ONE}) if da.terms else ZERO_POLY
    elif isinstance(a, PowAtom):
        if a.expo.diff(v).terms:
            raise ValueError(f"symbolic exponent of {a} depends on {v}; logarithms are not supported")
        db = a.base.diff(v)
        d = a.expo * db * Poly({(aid, 1): _ONE}) * a.base.inverse() if db.terms else ZERO_POLY
    else:  # InvAtom
        db = a.base.diff(v)
        d = -db * Poly({(aid, 2): _ONE}) if db.terms else ZERO_POLY
    _DIFF_CACHE[key] = d
    return d


def _atom_subs(aid, bindings, memo):
    if aid in memo:
        return memo[aid]
    a = _ATOMS[aid]
    out = None
    if a in bindings:
        out = bindings[a]
    elif isinstance(a, UnknownFn) and any(a.orders) and a.base in bindings:
        out = bindings[a.base]
        for name, k in zip(a.args, a.orders):
            for _ in range(k):
                out = out.diff(Var(name))
    elif isinstance(a, AlgebraicConst):
        p, q = a.p.subs(bindings), a.q.subs(bindings)
        if p != a.p or q != a.q:
            out = Poly.atom(AlgebraicConst(a.name, p, q))
    elif isinstance(a, SqrtAtom):
        arg = a.arg.subs(bindings)
        if arg != a.arg:
            out = sqrt_of(arg)
    elif isinstance(a, ExpAtom):
        arg = a.arg.subs(bindings)
        if arg != a.arg:
            out = exp_of(arg)
    elif isinstance(a, PowAtom):
        base, expo = a.base.subs(bindings), a.expo.subs(bindings)
        if base != a.base or expo != a.expo:
            out = pow_of(base, expo)
    elif isinstance(a, InvAtom):
        base = a.base.subs(bindings)
        if base != a.base:
            out = base.inverse()
    memo[aid] = out
    return out


# --------------------------------------------------------------------------
# elementary constructors
# --------------------------------------------------------------------------

def exp_of(arg) -> Poly:
    arg = Poly.coerce(arg)
    if not arg.terms:
        return ONE_POLY
    return Poly.atom(ExpAtom(arg))


def _squarefree_split(n: int):
    """Return ``(k, f)`` with ``n = k**2 * f`` and ``f`` free of small square factors."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    k = 1
    p = 2
    while p * p <= n and p < 100000:
        while n % (p * p) == 0:
            n //= p * p
            k *= p
        p += 1 if p == 2 else 2
    if n > 1 and gmpy2.is_square(n):
        r = int(gmpy2.isqrt(n))
        k *= r
        n = 1
    return k, sign * n


def sqrt_of(arg) -> Poly:
    """Square root with perfect-square rational content pulled out."""
    arg = Poly.coerce(arg)
    if not arg.terms:
        return ZERO_POLY
    value = arg.const_value()
    if value is not None:
        num, den = int(value.numerator), int(value.denominator)
        k, f = _squarefree_split(num * den)
        scale = mpq(k, den)
        if f == 1:
            return Poly.const(scale)
        return Poly({(intern(SqrtAtom(Poly.const(f))), 1): scale})
    if len(arg.terms) == 1:
        (m, c), = arg.terms.items()
        num, den = int(c.numerator), int(c.denominator)
        sign = 1 if num > 0 else -1
        content = mpq(abs(num), den)
        rest = {m: mpq(sign)}
    else:
        content, gm, prim = _primitive_part(arg.terms)
        sign = 1 if content > 0 else -1
        content = abs(content)
        rest = {(_mono_mul(k2, gm) if gm else k2): v * sign for k2, v in prim.items()}
    num, den = int(content.numerator), int(content.denominator)
    k, f = _squarefree_split(num * den)
    inner = Poly(_poly_scale(rest, mpq(f)))
    return Poly({(intern(SqrtAtom(inner)), 1): mpq(k, den)})


def pow_of(base, expo) -> Poly:
    """``base ** expo`` for an integer or symbolic (constant) exponent."""
    base = Poly.coerce(base)
    expo = Poly.coerce(expo)
    value = expo.const_value()
    if value is not None:
        if value.denominator != 1:
            raise ValueError(f"non-integer exponent {value}")
        return base ** int(value.numerator)
    const = expo.terms.get((), mpq(0))
    if const.denominator != 1:
        raise ValueError(f"exponent {expo} has a non-integer constant part")
    symbolic = expo - const
    if base == ONE_POLY:
        return ONE_POLY
    if not base.terms:
        raise ZeroDivisionError("0 raised to a symbolic power")
    return Poly.atom(PowAtom(base, symbolic)) * base ** int(const.numerator)
