"""Runtime values.

Real is float, Int is int, Unit is None, pairs are tuples, arrays are
lists.  Everything else gets a small class here.
"""
from __future__ import annotations


class VInl:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __eq__(self, other):
        return type(other) is VInl and self.x == other.x

    def __hash__(self):
        return hash(("inl", self.x))

    def __repr__(self):
        return "Inl(%r)" % (self.x,)


class VInr:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __eq__(self, other):
        return type(other) is VInr and self.x == other.x

    def __hash__(self):
        return hash(("inr", self.x))

    def __repr__(self):
        return "Inr(%r)" % (self.x,)


NEG = VInl(None)
NONNEG = VInr(None)


class Closure:
    __slots__ = ("code", "caps")

    def __init__(self, code, caps):
        self.code = code
        self.caps = caps

    def __repr__(self):
        return "<closure>"


class VPack:
    __slots__ = ("tag", "x")

    def __init__(self, tag, x):
        self.tag = tag
        self.x = x

    def __repr__(self):
        return "Pack(%r, %r)" % (self.tag, self.x)


class TLeaf:
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a


class TNode:
    __slots__ = ("l", "a", "f", "r")

    def __init__(self, l, a, f, r):
        self.l = l
        self.a = a
        self.f = f
        self.r = r
