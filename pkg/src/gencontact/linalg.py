"""Exact Gaussian elimination over Q or over scalar ``Poly`` fields.

Vectors are sparse dicts ``key -> value``.  Values are either ``mpq`` or
``Poly``; the two never mix within one solver.
"""
from __future__ import annotations

from gmpy2 import mpq

from .expr import Poly


def _is_zero(v):
    return v.is_zero() if isinstance(v, Poly) else v == 0


def _inv(v):
    return v.inverse() if isinstance(v, Poly) else 1 / v


def _weight(v):
    """Prefer simple pivots: rationals first, then short expressions."""
    if isinstance(v, Poly):
        return (0 if v.const_value() is not None else 1, len(v))
    return (0, 0)


def _axpy(acc: dict, a, x: dict):
    """``acc += a * x`` in place, dropping zeros."""
    for k, v in x.items():
        s = acc.get(k)
        s = a * v if s is None else s + a * v
        if _is_zero(s):
            acc.pop(k, None)
        else:
            acc[k] = s


class SpanSolver:
    """Incrementally row-reduced basis; answers membership with coordinates.

    Each stored row carries the combination of original vectors producing it,
    so ``express`` returns coordinates in terms of the inputs.
    """

    def __init__(self, zero=mpq(0), one=mpq(1)):
        self.zero, self.one = zero, one
        self.rows = []  # (pivot_key, row_dict normalized at pivot, combo dict)
        self.size = 0
        self.dependent = []  # indices of inputs found to be in the span of earlier ones

    def _reduce(self, vec):
        vec = dict(vec)
        combo = {}
        for key, row, rc in self.rows:
            c = vec.get(key)
            if c is None:
                continue
            _axpy(vec, -c, row)
            _axpy(combo, -c, rc)
        return vec, combo

    def add(self, vec) -> bool:
        """Insert the next input; False (and recorded) if it is dependent."""
        index = self.size
        self.size += 1
        rest, combo = self._reduce(vec)
        if not rest:
            self.dependent.append(index)
            return False
        combo[index] = combo.get(index, self.zero) + self.one
        key = min(rest, key=lambda k: (_weight(rest[k]), repr(k)))
        p = _inv(rest[key])
        row = {k: v * p for k, v in rest.items()}
        rc = {k: v * p for k, v in combo.items()}
        for i, (k2, r2, c2) in enumerate(self.rows):
            c = r2.get(key)
            if c is not None:
                r2, c2 = dict(r2), dict(c2)
                _axpy(r2, -c, row)
                _axpy(c2, -c, rc)
                self.rows[i] = (k2, r2, c2)
        self.rows.append((key, row, rc))
        return True

    @property
    def rank(self):
        return len(self.rows)

    def express(self, vec):
        """Coordinates ``{input_index: value}`` with ``sum = vec``, or None."""
        rest, combo = self._reduce(vec)
        if rest:
            return None
        return {k: -v for k, v in combo.items() if not _is_zero(v)}


def rank(vectors, zero=mpq(0), one=mpq(1)) -> int:
    s = SpanSolver(zero, one)
    for v in vectors:
        s.add(v)
    return s.rank


def solve_combination(target: dict, vectors: list):
    """Rational ``c`` with ``sum c_i vectors[i] = target``, or None (exact)."""
    s = SpanSolver()
    for v in vectors:
        s.add(v)
    coords = s.express(target)
    if coords is None:
        return None
    return [coords.get(i, mpq(0)) for i in range(len(vectors))]


def nullity(columns: list) -> int:
    """Dimension of ``{c : sum c_j columns[j] = 0}`` for rational sparse columns."""
    return len(columns) - rank(columns)
