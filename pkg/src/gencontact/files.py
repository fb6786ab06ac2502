"""Reader and writer for the block file format.

A file is a sequence of blocks ``KIND [NAME] { key: value  key: value ... }``.
Keys are identifiers, optionally with a bracketed suffix (``eta[y]``); a
value runs to the next key or the closing brace.  ``#`` starts a comment.

Block kinds: ``system``, ``generator``, ``case`` and ``erratum``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .expr import ParseError, Scope, format_poly, parse_poly
from .expr.printer import jet_name
from .jet import Generator, OdeSystem


class FormatError(ValueError):
    pass


@dataclass
class Block:
    kind: str
    name: str
    fields: list  # (key, value, offset)
    source: str = ""

    def get(self, key, default=None):
        for k, v, _ in self.fields:
            if k == key:
                return v
        return default

    def all(self, key):
        return [v for k, v, _ in self.fields if k == key]

    def require(self, key):
        v = self.get(key)
        if v is None:
            raise FormatError(f"{self.kind} {self.name}".rstrip() + f": missing field {key!r}")
        return v


_HEADER = re.compile(r"\s*([A-Za-z_]\w*)(?:\s+([^\s{]+))?\s*\{")
_KEY = re.compile(r"(?<![\w'\]])([A-Za-z_]\w*(?:\[[^\]\s]*\])?)\s*:")


def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def scan_blocks(text: str, source: str = "") -> list:
    text = _strip_comments(text)
    blocks = []
    pos = 0
    while text[pos:].strip():
        m = _HEADER.match(text, pos)
        if not m:
            line = text.count("\n", 0, pos) + 1
            raise FormatError(f"{source or '<input>'}:{line}: expected 'KIND [NAME] {{'")
        depth, i = 1, m.end()
        while i < len(text) and depth:
            depth += {"{": 1, "}": -1}.get(text[i], 0)
            i += 1
        if depth:
            raise FormatError(f"{source or '<input>'}: unterminated block {m.group(1)}")
        body = text[m.end():i - 1]
        keys = list(_KEY.finditer(body))
        if body[:keys[0].start() if keys else len(body)].strip():
            raise FormatError(f"{source or '<input>'}: text before first key in {m.group(1)}")
        fields = []
        for k, nxt in zip(keys, keys[1:] + [None]):
            value = body[k.end():nxt.start() if nxt else len(body)].strip()
            fields.append((k.group(1), value, m.end() + k.start()))
        blocks.append(Block(m.group(1), m.group(2) or "", fields, source))
        pos = i
    return blocks


def read_blocks(path) -> list:
    p = Path(path)
    return scan_blocks(p.read_text(), str(p))


# -- systems ----------------------------------------------------------------

_LHS = re.compile(r"^\s*([A-Za-z_]\w*)\s*('+)\s*$|^\s*D\(\s*([A-Za-z_]\w*)\s*,\s*\w+\s*,\s*(\d+)\s*\)\s*$")


def _expr(text, scope, where):
    try:
        return parse_poly(text, scope)
    except ParseError as e:
        raise FormatError(f"{where}: {e}") from None


def system_from_block(b: Block, scope: Scope | None = None) -> OdeSystem:
    scope = scope or Scope()
    indep = b.require("indep")
    deps = tuple(d.strip() for d in b.require("dep").split(","))
    lhs_orders, rhs = {}, {}
    for eq in b.all("eq"):
        if eq.count("=") != 1:
            raise FormatError(f"system: equation {eq!r} needs exactly one '='")
        left, right = eq.split("=")
        m = _LHS.match(left)
        if not m:
            raise FormatError(f"system: left side {left.strip()!r} must be a derivative")
        dep = m.group(1) or m.group(3)
        order = len(m.group(2)) if m.group(1) else int(m.group(4))
        if dep not in deps or dep in rhs:
            raise FormatError(f"system: unexpected or repeated equation for {dep!r}")
        lhs_orders[dep] = order
        rhs[dep] = _expr(right, scope, f"system equation for {dep}")
    if set(rhs) != set(deps):
        raise FormatError("system: need one equation per dependent variable")
    orders = set(lhs_orders.values())
    if len(orders) != 1:
        raise FormatError("system: all equations must have the same order")
    try:
        return OdeSystem(indep, deps, orders.pop(), tuple(rhs[d] for d in deps))
    except ValueError as e:
        raise FormatError(f"system: {e}") from None


def format_system(sys: OdeSystem) -> str:
    lines = ["system {", f"  indep: {sys.indep}", f"  dep: {', '.join(sys.deps)}"]
    for d, f in zip(sys.deps, sys.rhs):
        lines.append(f"  eq: {jet_name(d, sys.order)} = {format_poly(f)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- generators ---------------------------------------------------------------

def generator_from_block(b: Block, variables=("x", "y", "z"), scope: Scope | None = None) -> Generator:
    scope = scope or Scope()
    where = f"generator {b.name}"
    allowed = {"xi"} | {f"eta[{d}]" for d in variables[1:]}
    for k, _, _ in b.fields:
        if k not in allowed:
            raise FormatError(f"{where}: unknown field {k!r}")
    xi = _expr(b.get("xi", "0"), scope, where)
    etas = tuple(_expr(b.get(f"eta[{d}]", "0"), scope, where) for d in variables[1:])
    try:
        return Generator(xi, etas, tuple(variables), b.name)
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None


def format_generator(g: Generator, name=None) -> str:
    lines = [f"generator {name or g.name or 'G'} {{", f"  xi: {format_poly(g.xi)}"]
    for d, e in zip(g.deps, g.etas):
        lines.append(f"  eta[{d}]: {format_poly(e)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_generators(path, variables=("x", "y", "z"), scope=None) -> list:
    """Every generator block in a file, or in all ``*.gen`` files of a directory."""
    p = Path(path)
    files = sorted(p.glob("*.gen")) if p.is_dir() else [p]
    out = []
    for f in files:
        out += [generator_from_block(b, variables, scope) for b in read_blocks(f)
                if b.kind == "generator"]
    return out


def read_system(path, scope=None) -> OdeSystem:
    blocks = [b for b in read_blocks(path) if b.kind == "system"]
    if len(blocks) != 1:
        raise FormatError(f"{path}: expected exactly one system block, found {len(blocks)}")
    return system_from_block(blocks[0], scope)


__all__ = [
    "Block", "FormatError", "format_generator", "format_system",
    "generator_from_block", "read_blocks", "read_generators", "read_system", "scan_blocks",
    "system_from_block",
]
