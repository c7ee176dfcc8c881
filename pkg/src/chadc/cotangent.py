"""Runtime cotangent values: sparse monoid structure, size and potential.

Real cotangents are bare floats.  Every other constructor is a small
immutable object; zeros are singletons so they cost O(1) to create.
"""
from __future__ import annotations

from typing import List, Optional, Tuple

from .errors import CotangentMismatch, TagMismatch
from .lang.types import (HOLE, INT, LREAL, LUNIT, Bag, ListTy, LProd, LSigma, LSum, Prod, Ty)

C_PHI = 3


class Meter:
    """Step counter shared by the evaluator and the runtime."""
    __slots__ = ("n",)

    def __init__(self, n: int = 0):
        self.n = n


class _Singleton:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return self.name


CUNIT = _Singleton("CUnit")
CPZERO = _Singleton("CPZero")
CSZERO = _Singleton("CSZero")
BAG_EMPTY = _Singleton("CBagEmpty")
CSIG_ZERO = _Singleton("CSigZero")
# zero of an abstract (existentially hidden) type; the identity for plus at
# every type and closed under projections and casts
CZERO_ANY = _Singleton("CZeroAny")
# closed-function cotangents carry no information
CUNIT_FUN = CUNIT


class CPair:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def __repr__(self):
        return "CPair(%r, %r)" % (self.a, self.b)


class CInl:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __repr__(self):
        return "CInl(%r)" % (self.x,)


class CInr:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __repr__(self):
        return "CInr(%r)" % (self.x,)


class CBagOne:
    __slots__ = ("i", "d")

    def __init__(self, i, d):
        self.i = i
        self.d = d

    def __repr__(self):
        return "CBagOne(%r, %r)" % (self.i, self.d)


class CBagPlus:
    __slots__ = ("l", "r")

    def __init__(self, l, r):
        self.l = l
        self.r = r

    def __repr__(self):
        return "CBagPlus(%r, %r)" % (self.l, self.r)


class CList:
    """Invocation log of naive higher-order CHAD."""
    __slots__ = ("items",)

    def __init__(self, items=()):
        self.items = tuple(items)

    def __repr__(self):
        return "CList(%r)" % (self.items,)


class CSig:
    """Injection into the tag-indexed linear sum."""
    __slots__ = ("tag", "d")

    def __init__(self, tag, d):
        self.tag = tag
        self.d = d

    def __repr__(self):
        return "CSig(%r, %r)" % (self.tag, self.d)


_ZEROS = (CPZERO, CSZERO, BAG_EMPTY, CSIG_ZERO, CZERO_ANY)
CLIST_NIL = CList(())


def zero(ty: Ty):
    if ty is LREAL:
        return 0.0
    if ty is LUNIT:
        return CUNIT
    cls = type(ty)
    if cls is LProd:
        return CPZERO
    if cls is LSum:
        return CSZERO
    if cls is Bag:
        return BAG_EMPTY
    if cls is ListTy:
        return CLIST_NIL
    if cls is LSigma:
        return CSIG_ZERO
    if ty is HOLE:
        return CZERO_ANY
    raise TypeError("no zero for non-linear type %r" % (ty,))


def dense_zero(ty: Ty):
    """Zero with every product node materialised (the naive representation)."""
    if type(ty) is LProd:
        return CPair(dense_zero(ty.a), dense_zero(ty.b))
    return zero(ty)


def plus(a, b, m: Optional[Meter] = None):
    """Sparse monoid addition; charges 1 per visited node to m."""
    if m is not None:
        m.n += 1
    ta = type(a)
    if ta is float:
        if type(b) is float:
            return a + b
        if b is CZERO_ANY:
            return a
        raise CotangentMismatch("adding a real to %r" % (b,))
    if a in _ZEROS_SET:
        if a is BAG_EMPTY and type(b) in (float, CPair, CInl, CInr):
            raise CotangentMismatch("adding bag to %r" % (b,))
        return b
    tb = type(b)
    if b.__class__ is _Singleton and b in _ZEROS_SET:
        return a
    if ta is CPair:
        if tb is CPair:
            return CPair(plus(a.a, b.a, m), plus(a.b, b.b, m))
    elif ta is CInl:
        if tb is CInl:
            return CInl(plus(a.x, b.x, m))
        raise CotangentMismatch("adding inl and inr cotangents")
    elif ta is CInr:
        if tb is CInr:
            return CInr(plus(a.x, b.x, m))
        raise CotangentMismatch("adding inr and inl cotangents")
    elif ta is CBagOne or ta is CBagPlus:
        if tb is CBagOne or tb is CBagPlus:
            return CBagPlus(a, b)
    elif a is CUNIT:
        if b is CUNIT:
            return CUNIT
    elif ta is CList:
        if tb is CList:
            if m is not None:
                m.n += len(a.items)
            return CList(a.items + b.items)
    elif ta is CSig:
        if tb is CSig:
            if a.tag != b.tag:
                raise TagMismatch("adding cotangents of different closure tags")
            return CSig(a.tag, plus(a.d, b.d, m))
    raise CotangentMismatch("cannot add %r and %r" % (a, b))


_ZEROS_SET = frozenset(_ZEROS)


def plus_cost(a, b) -> Tuple[object, int]:
    m = Meter()
    r = plus(a, b, m)
    return r, m.n


def size(d) -> int:
    t = type(d)
    if t is float or t is _Singleton:
        return 1
    if t is CPair:
        return 1 + size(d.a) + size(d.b)
    if t is CInl or t is CInr:
        return 1 + size(d.x)
    if t is CBagOne:
        return 1 + size(d.d)
    if t is CBagPlus:
        return 1 + size(d.l) + size(d.r)
    if t is CList:
        return 1 + len(d.items)
    if t is CSig:
        return 1 + size(d.d)
    if t is int:
        return 1
    raise TypeError("not a cotangent: %r" % (d,))


def potential(d) -> int:
    return C_PHI * size(d)


# ---- linear API ----------------------------------------------------------------

def lpair(a, b):
    return CPair(a, b)


def lfst(d, ty: LProd, dense: bool = False):
    if type(d) is CPair:
        return d.a
    if d is CPZERO:
        return dense_zero(ty.a) if dense else zero(ty.a)
    if d is CZERO_ANY:
        return CZERO_ANY
    raise CotangentMismatch("lfst of %r" % (d,))


def lsnd(d, ty: LProd, dense: bool = False):
    if type(d) is CPair:
        return d.b
    if d is CPZERO:
        return dense_zero(ty.b) if dense else zero(ty.b)
    if d is CZERO_ANY:
        return CZERO_ANY
    raise CotangentMismatch("lsnd of %r" % (d,))


def linl(x):
    return CInl(x)


def linr(x):
    return CInr(x)


def lcast_l(d, ty: LSum, dense: bool = False):
    t = type(d)
    if t is CInl:
        return d.x
    if d is CSZERO:
        return dense_zero(ty.a) if dense else zero(ty.a)
    if d is CZERO_ANY:
        return CZERO_ANY
    raise CotangentMismatch("left cast of %r" % (d,))


def lcast_r(d, ty: LSum, dense: bool = False):
    t = type(d)
    if t is CInr:
        return d.x
    if d is CSZERO:
        return dense_zero(ty.b) if dense else zero(ty.b)
    if d is CZERO_ANY:
        return CZERO_ANY
    raise CotangentMismatch("right cast of %r" % (d,))


def lcast_sig(tag, d, zty: Ty):
    if type(d) is CSig:
        if d.tag != tag:
            raise TagMismatch("closure tag mismatch")
        return d.d
    if d is CSIG_ZERO or d is CZERO_ANY:
        return zero(zty)
    raise CotangentMismatch("sigma cast of %r" % (d,))


def bag_items(d) -> List[Tuple[int, object]]:
    """Flatten a bag left to right."""
    out = []
    stack = [d]
    while stack:
        x = stack.pop()
        t = type(x)
        if t is CBagOne:
            out.append((x.i, x.d))
        elif t is CBagPlus:
            stack.append(x.r)
            stack.append(x.l)
        elif x is BAG_EMPTY or x is CZERO_ANY:
            pass
        else:
            raise CotangentMismatch("not a bag: %r" % (x,))
    return out


def bag_nodes(d) -> int:
    n = 0
    stack = [d]
    while stack:
        x = stack.pop()
        n += 1
        if type(x) is CBagPlus:
            stack.append(x.l)
            stack.append(x.r)
    return n


# ---- shape and densification ------------------------------------------------------

def valid(ty: Ty, d) -> bool:
    """Shape check of a cotangent against its linear type."""
    if d is CZERO_ANY:
        return True
    if ty is LREAL:
        return type(d) is float
    if ty is LUNIT:
        return d is CUNIT
    if ty is HOLE:
        return False
    t = type(ty)
    if t is LProd:
        return d is CPZERO or (type(d) is CPair and valid(ty.a, d.a) and valid(ty.b, d.b))
    if t is LSum:
        return (d is CSZERO or (type(d) is CInl and valid(ty.a, d.x))
                or (type(d) is CInr and valid(ty.b, d.x)))
    if t is Bag:
        if not (isinstance(ty.a, Prod) and ty.a.a is INT):
            return False
        if d is BAG_EMPTY:
            return True
        if type(d) is CBagOne:
            return type(d.i) is int and valid(ty.a.b, d.d)
        if type(d) is CBagPlus:
            return valid(ty, d.l) and valid(ty, d.r)
        return False
    if t is ListTy:
        return type(d) is CList
    if t is LSigma:
        return d is CSIG_ZERO or type(d) is CSig
    return False


def dense_len(ty: Ty, like=None) -> int:
    if ty is LREAL:
        return 1
    if ty is LUNIT:
        return 0
    t = type(ty)
    if t is LProd:
        la, lb = (like if isinstance(like, tuple) else (None, None))
        return dense_len(ty.a, la) + dense_len(ty.b, lb)
    if t is LSum:
        return dense_len(ty.a) + dense_len(ty.b)
    if t is Bag:
        if like is None:
            raise ValueError("array cotangent needs the primal array for its length")
        return sum(dense_len(ty.a.b, x) for x in like)
    raise ValueError("cannot densify type %r" % (ty,))


def densify(ty: Ty, d, like=None) -> List[float]:
    """Dense tangent vector in left-to-right leaf order.

    Sums embed as the concatenation of both sides; arrays need the primal
    value `like` to know their length.
    """
    out: List[float] = []
    _densify(ty, d, like, out)
    return out


def _densify(ty, d, like, out):
    if ty is LUNIT:
        return
    if d is CZERO_ANY:
        out.extend([0.0] * dense_len(ty, like))
        return
    if ty is LREAL:
        if type(d) is not float:
            raise CotangentMismatch("expected a real cotangent, got %r" % (d,))
        out.append(d)
        return
    t = type(ty)
    if t is LProd:
        la, lb = (like if isinstance(like, tuple) else (None, None))
        if d is CPZERO:
            out.extend([0.0] * (dense_len(ty.a, la) + dense_len(ty.b, lb)))
        else:
            _densify(ty.a, d.a, la, out)
            _densify(ty.b, d.b, lb, out)
        return
    if t is LSum:
        na, nb = dense_len(ty.a), dense_len(ty.b)
        if d is CSZERO:
            out.extend([0.0] * (na + nb))
        elif type(d) is CInl:
            _densify(ty.a, d.x, None, out)
            out.extend([0.0] * nb)
        elif type(d) is CInr:
            out.extend([0.0] * na)
            _densify(ty.b, d.x, None, out)
        else:
            raise CotangentMismatch("expected a sum cotangent, got %r" % (d,))
        return
    if t is Bag:
        et = ty.a.b
        if like is None:
            raise ValueError("array cotangent needs the primal array for its length")
        acc = [zero(et)] * len(like)
        for i, x in bag_items(d):
            if not 0 <= i < len(like):
                raise CotangentMismatch("bag index %d out of range" % i)
            acc[i] = plus(acc[i], x)
        for x, l in zip(acc, like):
            _densify(et, x, l, out)
        return
    raise ValueError("cannot densify type %r" % (ty,))


def dense_equal(ty: Ty, a, b, like=None, rel: float = 1e-12) -> bool:
    da, db = densify(ty, a, like), densify(ty, b, like)
    if len(da) != len(db):
        return False
    for x, y in zip(da, db):
        if abs(x - y) > rel * max(1.0, abs(x), abs(y)):
            return False
    return True
