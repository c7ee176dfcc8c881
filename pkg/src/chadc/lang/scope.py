"""Name resolution, fresh names and free-variable queries."""
from __future__ import annotations

import dataclasses
import itertools
from typing import Dict, List, Sequence, Set

from .._deep import deep
from ..errors import ScopeError
from .terms import ClosedLam, Term, Var

_counter = itertools.count()

_FIELDS: Dict[type, tuple] = {}


def fresh(base: str = "v") -> str:
    return "%s%%%d" % (base, next(_counter))


def field_names(cls) -> tuple:
    f = _FIELDS.get(cls)
    if f is None:
        f = tuple(x.name for x in dataclasses.fields(cls))
        _FIELDS[cls] = f
    return f


def rebuild(t: Term, **changes) -> Term:
    cls = type(t)
    kw = {n: getattr(t, n) for n in field_names(cls)}
    kw.update(changes)
    return cls(**kw)


@deep
def resolve(t: Term, names: Sequence[str]) -> Term:
    """Assign levels to named variables.  `names` is the outer context."""
    scope: Dict[str, List[int]] = {}
    for i, n in enumerate(names):
        scope.setdefault(n, []).append(i)
    return _resolve(t, scope, len(names))


def _resolve(t, scope, depth):
    cls = type(t)
    if cls is Var:
        if t.level is not None:
            return t
        stack = scope.get(t.name)
        if not stack:
            raise ScopeError("unbound variable %r" % t.name)
        return Var(stack[-1], t.name)
    fs = cls.fields_
    if not fs:
        return t
    if cls.closed:
        scope, depth = {}, 0
    kw = {}
    for fname, binders in fs:
        val = getattr(t, fname)
        if binders is None:
            kw[fname] = tuple(_resolve(x, scope, depth) for x in val)
        elif not binders:
            kw[fname] = _resolve(val, scope, depth)
        else:
            bnames = [getattr(t, b) for b in binders]
            for i, b in enumerate(bnames):
                scope.setdefault(b, []).append(depth + i)
            kw[fname] = _resolve(val, scope, depth + len(bnames))
            for b in bnames:
                scope[b].pop()
    for n in field_names(cls):
        if n not in kw:
            kw[n] = getattr(t, n)
    return cls(**kw)


@deep
def free_levels(t: Term, depth: int) -> Set[int]:
    """Levels < depth referenced by t, where t sits at binding depth `depth`."""
    out: Set[int] = set()
    _free(t, depth, out)
    return out


def _free(t, depth, out):
    cls = type(t)
    if cls is Var:
        if t.level < depth:
            out.add(t.level)
        return
    if cls.closed:
        return
    for fname, binders in cls.fields_:
        val = getattr(t, fname)
        if binders is None:
            for x in val:
                _free(x, depth, out)
        else:
            _free(val, depth, out)


def children(t: Term):
    """Direct subterms, in field order."""
    for fname, binders in type(t).fields_:
        val = getattr(t, fname)
        if binders is None:
            yield from val
        else:
            yield val


def iter_terms(t: Term):
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(children(x))


def term_size(t: Term) -> int:
    return sum(1 for _ in iter_terms(t))


@deep
def unresolve(t: Term, names: Sequence[str]) -> Term:
    """Replace levels by unique names (inverse of resolve)."""
    return _unresolve(t, list(names))


def _unresolve(t, names):
    cls = type(t)
    if cls is Var:
        return Var(None, names[t.level])
    fs = cls.fields_
    if not fs:
        return t
    if cls.closed:
        names = []
    kw = {}
    renamed = {}
    for fname, binders in fs:
        val = getattr(t, fname)
        if binders is None:
            kw[fname] = tuple(_unresolve(x, names) for x in val)
        elif not binders:
            kw[fname] = _unresolve(val, names)
        else:
            new = []
            for b in binders:
                nn = renamed.get(b) or fresh(_base(getattr(t, b)))
                renamed[b] = nn
                new.append(nn)
            names.extend(new)
            kw[fname] = _unresolve(val, names)
            del names[len(names) - len(new):]
    for n in field_names(cls):
        if n not in kw:
            kw[n] = renamed.get(n, getattr(t, n))
    return cls(**kw)


def _base(name: str) -> str:
    if not name:
        return "v"
    return name.split("%", 1)[0] or "v"
