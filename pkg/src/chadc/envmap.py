"""Persistent balanced map from context levels to cotangents.

A treap with priorities derived deterministically from the key.  Union
inserts the smaller map into the larger one entry by entry, which is the
logarithmic-time behaviour the naive tree-map strategy is meant to show.
"""
from __future__ import annotations

from typing import Iterator, Optional, Tuple

from .cotangent import Meter, plus


class TNode:
    __slots__ = ("key", "val", "prio", "left", "right", "size")

    def __init__(self, key, val, prio, left, right):
        self.key = key
        self.val = val
        self.prio = prio
        self.left = left
        self.right = right
        self.size = 1 + (left.size if left else 0) + (right.size if right else 0)


def _prio(key: int) -> int:
    x = (key * 0x9E3779B97F4A7C15 + 0x7F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x ^= x >> 31
    x = (x * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 29)


class EnvMap:
    """Immutable wrapper; `None` root is the empty map."""
    __slots__ = ("root",)

    def __init__(self, root: Optional[TNode] = None):
        self.root = root

    def __len__(self):
        return self.root.size if self.root else 0

    def items(self) -> Iterator[Tuple[int, object]]:
        stack, t = [], self.root
        while stack or t is not None:
            while t is not None:
                stack.append(t)
                t = t.left
            t = stack.pop()
            yield t.key, t.val
            t = t.right

    def get(self, key, default=None, m: Optional[Meter] = None):
        t = self.root
        while t is not None:
            if m is not None:
                m.n += 1
            if key == t.key:
                return t.val
            t = t.left if key < t.key else t.right
        return default

    def __repr__(self):
        return "EnvMap(%r)" % dict(self.items())


EMPTY = EnvMap(None)


def singleton(key: int, val) -> EnvMap:
    return EnvMap(TNode(key, val, _prio(key), None, None))


def _ins(t, key, val, m):
    if m is not None:
        m.n += 1
    if t is None:
        return TNode(key, val, _prio(key), None, None)
    if key == t.key:
        return TNode(key, plus(t.val, val, m), t.prio, t.left, t.right)
    if key < t.key:
        l = _ins(t.left, key, val, m)
        if l.prio > t.prio:
            return TNode(l.key, l.val, l.prio, l.left,
                         TNode(t.key, t.val, t.prio, l.right, t.right))
        return TNode(t.key, t.val, t.prio, l, t.right)
    r = _ins(t.right, key, val, m)
    if r.prio > t.prio:
        return TNode(r.key, r.val, r.prio,
                     TNode(t.key, t.val, t.prio, t.left, r.left), r.right)
    return TNode(t.key, t.val, t.prio, t.left, r)


def insert_with(mp: EnvMap, key: int, val, m: Optional[Meter] = None) -> EnvMap:
    """Insert, adding to an existing entry with plus."""
    return EnvMap(_ins(mp.root, key, val, m))


def _merge(a, b, m):
    # every key of a is below every key of b
    if a is None:
        return b
    if b is None:
        return a
    if m is not None:
        m.n += 1
    if a.prio > b.prio:
        return TNode(a.key, a.val, a.prio, a.left, _merge(a.right, b, m))
    return TNode(b.key, b.val, b.prio, _merge(a, b.left, m), b.right)


def _del(t, key, m):
    if t is None:
        return None, None
    if m is not None:
        m.n += 1
    if key == t.key:
        return _merge(t.left, t.right, m), t.val
    if key < t.key:
        l, v = _del(t.left, key, m)
        if v is None:
            return t, None
        return TNode(t.key, t.val, t.prio, l, t.right), v
    r, v = _del(t.right, key, m)
    if v is None:
        return t, None
    return TNode(t.key, t.val, t.prio, t.left, r), v


def delete(mp: EnvMap, key: int, m: Optional[Meter] = None):
    """Remove key; returns (map, value or None)."""
    root, v = _del(mp.root, key, m)
    return EnvMap(root), v


def union(a: EnvMap, b: EnvMap, m: Optional[Meter] = None) -> EnvMap:
    """Pointwise plus; small-into-large insertion."""
    if len(a) < len(b):
        a, b = b, a
    root = a.root
    for k, v in b.items():
        if m is not None:
            m.n += 1
        root = _ins(root, k, v, m)
    return EnvMap(root)
