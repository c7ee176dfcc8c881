"""S-expression surface syntax: reader, parser and pretty-printer.

The same tables (Term.sx) drive both directions, so every target
construct printed by ``transform --print`` parses back.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .._deep import deep
from ..errors import ParseError
from . import terms as T
from .types import (HOLE, INT, LREAL, LUNIT, REAL, UNIT, Array, Arrow, Bag, ClosedArrow, Ctx,
                    EnvTy, EvmTy, ListTy, LProd, LSigma, LSum, Prod, SigmaTag, Sum, TreeTy, Ty)

# ---- reader -----------------------------------------------------------------


@dataclass
class Atom:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def read_all(text: str) -> List:
    stack: List[SList] = [SList([], 1, 1)]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group(0)
        if tok == "(":
            stack.append(SList([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(Atom(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) != 1:
        s = stack[-1]
        raise ParseError("unclosed '('", s.line, s.col)
    return stack[0].items


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        where = items[1] if len(items) > 1 else None
        raise ParseError("expected exactly one expression",
                         where.line if where else 1, where.col if where else 1)
    return items[0]


def _err(node, msg):
    raise ParseError(msg, node.line, node.col)


# ---- types ------------------------------------------------------------------

_ATOM_TYPES = {"Real": REAL, "Unit": UNIT, "Int": INT, "LReal": LREAL, "LUnit": LUNIT,
               "Hole": HOLE}
_BIN_TYPES = {"Prod": Prod, "Sum": Sum, "Arrow": Arrow, "ClosedArrow": ClosedArrow,
              "LProd": LProd, "LSum": LSum, "Tree": TreeTy}
_UN_TYPES = {"Array": Array, "Bag": Bag, "List": ListTy, "Sigma": SigmaTag, "LSigma": LSigma}
_TYPE_NAMES = {v: k for k, v in _BIN_TYPES.items()}
_TYPE_NAMES.update({v: k for k, v in _UN_TYPES.items()})


def parse_type(node) -> Ty:
    if isinstance(node, Atom):
        ty = _ATOM_TYPES.get(node.text)
        if ty is None:
            _err(node, "unknown type %r" % node.text)
        return ty
    if not node.items or not isinstance(node.items[0], Atom):
        _err(node, "malformed type")
    head = node.items[0].text
    args = node.items[1:]
    if head in _BIN_TYPES:
        if len(args) != 2:
            _err(node, "%s takes two types" % head)
        return _BIN_TYPES[head](parse_type(args[0]), parse_type(args[1]))
    if head in _UN_TYPES:
        if len(args) != 1:
            _err(node, "%s takes one type" % head)
        return _UN_TYPES[head](parse_type(args[0]))
    if head == "Evm":
        if len(args) != 2:
            _err(node, "Evm takes a context and a type")
        return EvmTy(parse_ctx(args[0]), parse_type(args[1]))
    if head == "Env":
        if len(args) != 1:
            _err(node, "Env takes a context")
        return EnvTy(parse_ctx(args[0]))
    _err(node, "unknown type constructor %r" % head)


def parse_ctx(node) -> Ctx:
    if not isinstance(node, SList):
        _err(node, "expected a context list")
    return Ctx(tuple(parse_type(x) for x in node.items))


def show_type(ty: Ty) -> str:
    parts: List[str] = []
    _show_type(ty, parts)
    return "".join(parts)


def _show_type(ty, out):
    name = _TYPE_NAMES.get(type(ty))
    if name is not None:
        out.append("(" + name)
        for f in ("a", "b", "f", "body"):
            if hasattr(ty, f):
                out.append(" ")
                _show_type(getattr(ty, f), out)
        out.append(")")
    elif isinstance(ty, EvmTy):
        out.append("(Evm ")
        _show_ctx(ty.ctx, out)
        out.append(" ")
        _show_type(ty.a, out)
        out.append(")")
    elif isinstance(ty, EnvTy):
        out.append("(Env ")
        _show_ctx(ty.ctx, out)
        out.append(")")
    else:
        out.append(repr(ty))


def _show_ctx(ctx, out):
    out.append("(")
    for i, t in enumerate(ctx.to_list()):
        if i:
            out.append(" ")
        _show_type(t, out)
    out.append(")")


def show_ctx(ctx: Ctx) -> str:
    out: List[str] = []
    _show_ctx(ctx, out)
    return "".join(out)


# ---- terms --------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_INT = re.compile(r"[-+]?\d+i\Z")
_FLOAT = re.compile(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\Z")
_SPECIAL_FLOATS = {"#inf": math.inf, "#-inf": -math.inf, "#nan": math.nan}
RESERVED = {"unit"} | set(T.BY_TAG)
_REPRS = {"dense": True, "sparse": False}


class _Scope:
    def __init__(self, names: Sequence[str]):
        self.map: Dict[str, List[int]] = {}
        self.depth = 0
        for n in names:
            self.push(n)

    def push(self, n):
        self.map.setdefault(n, []).append(self.depth)
        self.depth += 1

    def pop(self, n):
        self.map[n].pop()
        self.depth -= 1

    def lookup(self, atom):
        st = self.map.get(atom.text)
        if not st:
            _err(atom, "unbound variable %r" % atom.text)
        return st[-1]


def _ident(node) -> str:
    if not isinstance(node, Atom) or not _IDENT.match(node.text) or node.text in RESERVED:
        _err(node, "expected an identifier")
    return node.text


def parse_term(node, scope: _Scope) -> T.Term:
    if isinstance(node, Atom):
        txt = node.text
        if txt == "unit":
            return T.UnitLit()
        if _INT.match(txt):
            return T.IntLit(int(txt[:-1]))
        if _FLOAT.match(txt):
            return T.RealLit(float(txt))
        if txt in _SPECIAL_FLOATS:
            return T.RealLit(_SPECIAL_FLOATS[txt])
        if _IDENT.match(txt) and txt not in RESERVED:
            return T.Var(scope.lookup(node), txt)
        _err(node, "unexpected token %r" % txt)
    if not node.items:
        _err(node, "empty form")
    head = node.items[0]
    if not isinstance(head, Atom):
        _err(head, "expected a keyword")
    cls = T.BY_TAG.get(head.text)
    if cls is None:
        _err(head, "unknown form %r" % head.text)
    return _parse_form(cls, node, scope)


def _parse_form(cls, node, scope):
    args = node.items[1:]
    kw = {}
    pos = 0
    if cls.closed:
        saved = (scope.map, scope.depth)
        scope.map, scope.depth = {}, 0

    def take(what):
        nonlocal pos
        if pos >= len(args):
            _err(node, "%s: missing %s" % (cls.head, what))
        x = args[pos]
        pos += 1
        return x

    for spec in cls.sx:
        k = spec[0]
        if k == "t":
            kw[spec[1]] = parse_term(take("term"), scope)
        elif k == "ts":
            kw[spec[1]] = tuple(parse_term(x, scope) for x in args[pos:])
            pos = len(args)
        elif k == "y":
            kw[spec[1]] = parse_type(take("type"))
        elif k == "y?":
            if pos < len(args):
                kw[spec[1]] = parse_type(args[pos])
                pos += 1
        elif k == "c":
            kw[spec[1]] = parse_ctx(take("context"))
        elif k == "i":
            a = take("integer")
            if not isinstance(a, Atom) or not re.match(r"\d+\Z", a.text):
                _err(a, "expected an integer")
            kw[spec[1]] = int(a.text)
        elif k == "s":
            a = take("symbol")
            if not isinstance(a, Atom):
                _err(a, "expected a symbol")
            kw[spec[1]] = a.text
        elif k == "r":
            a = take("dense|sparse")
            if not isinstance(a, Atom) or a.text not in _REPRS:
                _err(a, "expected dense or sparse")
            kw[spec[1]] = _REPRS[a.text]
        elif k == "nt":
            b = take("binder")
            if not isinstance(b, SList) or len(b.items) != 2:
                _err(b, "expected (name type)")
            kw[spec[1]] = _ident(b.items[0])
            kw[spec[2]] = parse_type(b.items[1])
        elif k == "B":
            name = kw[spec[2]]
            scope.push(name)
            kw[spec[1]] = parse_term(take("body"), scope)
            scope.pop(name)
        elif k == "bt":
            b = take("binder")
            if not isinstance(b, SList) or len(b.items) != 2:
                _err(b, "expected (name term)")
            name = _ident(b.items[0])
            kw[spec[2]] = name
            scope.push(name)
            kw[spec[1]] = parse_term(b.items[1], scope)
            scope.pop(name)
        elif k == "b2t":
            b = take("binder")
            if (not isinstance(b, SList) or len(b.items) != 2 or not isinstance(b.items[0], SList)
                    or len(b.items[0].items) != 2):
                _err(b, "expected ((name name) term)")
            n1 = _ident(b.items[0].items[0])
            n2 = _ident(b.items[0].items[1])
            kw[spec[2]], kw[spec[3]] = n1, n2
            scope.push(n1)
            scope.push(n2)
            kw[spec[1]] = parse_term(b.items[1], scope)
            scope.pop(n2)
            scope.pop(n1)
    if pos != len(args):
        _err(args[pos], "%s: too many arguments" % cls.head)
    if cls.closed:
        scope.map, scope.depth = saved
    return cls(**kw)


@dataclass
class Program:
    names: List[str]
    types: List[Ty]
    body: T.Term

    @property
    def ctx(self) -> Ctx:
        return Ctx(tuple(self.types))


@deep
def parse_program(text: str) -> Program:
    node = read_one(text)
    if (not isinstance(node, SList) or len(node.items) != 3 or not isinstance(node.items[0], Atom)
            or node.items[0].text != "program"):
        _err(node, "expected (program (args ...) term)")
    hdr = node.items[1]
    if (not isinstance(hdr, SList) or not hdr.items or not isinstance(hdr.items[0], Atom)
            or hdr.items[0].text != "args"):
        _err(hdr, "expected (args (name type) ...)")
    names, types = [], []
    for b in hdr.items[1:]:
        if not isinstance(b, SList) or len(b.items) != 2:
            _err(b, "expected (name type)")
        names.append(_ident(b.items[0]))
        types.append(parse_type(b.items[1]))
    body = parse_term(node.items[2], _Scope(names))
    return Program(names, types, body)


@deep
def parse_term_text(text: str, names: Sequence[str] = ()) -> T.Term:
    return parse_term(read_one(text), _Scope(names))


# ---- printer --------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "#nan"
    if math.isinf(x):
        return "#inf" if x > 0 else "#-inf"
    return repr(float(x))


class _Namer:
    def __init__(self):
        self.used: Dict[str, int] = {}

    def pick(self, name: str) -> str:
        # drop generated-name counters so output does not depend on history
        base = re.sub(r"[^A-Za-z0-9_']", "_", (name or "x").split("%", 1)[0] or "x")
        if not _IDENT.match(base) or base in RESERVED:
            base = "v_" + base
            if not _IDENT.match(base):
                base = "v"
        k = self.used.get(base, 0)
        cand = base if base not in self.used else "%s_%d" % (base, k)
        while cand in self.used or cand in RESERVED:
            k += 1
            cand = "%s_%d" % (base, k)
        self.used[base] = k
        self.used.setdefault(cand, 0)
        return cand


def _doc(t: T.Term, names: List[str], namer: _Namer):
    """Nested list document: a str is an atom, a list is a parenthesised group."""
    cls = type(t)
    if cls is T.Var:
        if t.level is None:
            return t.name
        return names[t.level]
    if cls is T.RealLit:
        return _fmt_float(t.value)
    if cls is T.IntLit:
        return "%di" % t.value
    if cls is T.UnitLit:
        return "unit"
    if cls.closed:
        names = []
    out = [cls.head]
    for spec in cls.sx:
        k = spec[0]
        if k == "t":
            out.append(_doc(getattr(t, spec[1]), names, namer))
        elif k == "ts":
            out.extend(_doc(x, names, namer) for x in getattr(t, spec[1]))
        elif k == "y":
            out.append(show_type(getattr(t, spec[1])))
        elif k == "y?":
            v = getattr(t, spec[1])
            if v is not None:
                out.append(show_type(v))
        elif k == "c":
            out.append(show_ctx(getattr(t, spec[1])))
        elif k == "i":
            out.append(str(getattr(t, spec[1])))
        elif k == "s":
            out.append(getattr(t, spec[1]))
        elif k == "r":
            out.append("dense" if getattr(t, spec[1]) else "sparse")
        elif k == "nt":
            n = namer.pick(getattr(t, spec[1]))
            pending = n
            out.append([n, show_type(getattr(t, spec[2]))])
        elif k == "B":
            out.append(_doc(getattr(t, spec[1]), names + [pending], namer))
        elif k == "bt":
            n = namer.pick(getattr(t, spec[2]))
            out.append([n, _doc(getattr(t, spec[1]), names + [n], namer)])
        elif k == "b2t":
            n1 = namer.pick(getattr(t, spec[2]))
            n2 = namer.pick(getattr(t, spec[3]))
            out.append([[n1, n2], _doc(getattr(t, spec[1]), names + [n1, n2], namer)])
    return out


def _flat(doc, out):
    if isinstance(doc, str):
        out.append(doc)
        return
    out.append("(")
    for i, d in enumerate(doc):
        if i:
            out.append(" ")
        _flat(d, out)
    out.append(")")


def _width(doc, memo):
    if isinstance(doc, str):
        return len(doc)
    w = memo.get(id(doc))
    if w is None:
        w = 1 + sum(_width(d, memo) for d in doc) + len(doc)
        memo[id(doc)] = w
    return w


def _layout(doc, indent, width, memo, out):
    if isinstance(doc, str) or indent + _width(doc, memo) <= width:
        _flat(doc, out)
        return
    out.append("(")
    # keep the head and any leading atoms on the first line
    i = 0
    while i < len(doc) and isinstance(doc[i], str):
        if i:
            out.append(" ")
        out.append(doc[i])
        i += 1
    for d in doc[i:]:
        out.append("\n" + " " * (indent + 2))
        _layout(d, indent + 2, width, memo, out)
    out.append(")")


def render(doc, width: int = 100, indent: int = 0) -> str:
    out: List[str] = []
    _layout(doc, indent, width, {}, out)
    return "".join(out)


@deep
def pretty(t: T.Term, names: Sequence[str] = (), width: int = 100) -> str:
    namer = _Namer()
    shown = [namer.pick(n) for n in names]
    return render(_doc(t, shown, namer), width)


@deep
def pretty_program(p: Program, width: int = 100) -> str:
    namer = _Namer()
    shown = [namer.pick(n) for n in p.names]
    hdr = ["args"] + [[n, show_type(ty)] for n, ty in zip(shown, p.types)]
    body = _doc(p.body, shown, namer)
    return render(["program", hdr, body], width)
