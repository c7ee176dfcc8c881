"""Typed closure conversion.

Every lambda becomes a pack of its captured variables together with a
closed function taking (captures, argument); every application unpacks
the closure and calls the closed function on (captures, argument).
Captures are the exact free variables of the body, ordered by level.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .._deep import call_deep
from ..errors import ChadTypeError
from ..lang import terms as T
from ..lang.scope import fresh, free_levels, resolve
from ..lang.typecheck import elaborate
from ..lang.types import (HOLE, INT, REAL, UNIT, Array, Arrow, ClosedArrow, Prod, SigmaTag, Sum,
                          Ty, left_nested)
from ..chad.transform import V, let, proj


def cc_type(ty: Ty) -> Ty:
    c = type(ty)
    if c is Arrow:
        return SigmaTag(Prod(HOLE, ClosedArrow(Prod(HOLE, cc_type(ty.a)), cc_type(ty.b))))
    if c is Prod or c is Sum:
        return c(cc_type(ty.a), cc_type(ty.b))
    if c is Array:
        return Array(cc_type(ty.a))
    return ty


def tuple_type(tys: Sequence[Ty]) -> Ty:
    return left_nested(list(tys), Prod, UNIT)


def tuple_term(xs: Sequence[T.Term]) -> T.Term:
    return left_nested(list(xs), T.Pair, T.UnitLit())


@dataclass
class LambdaSite:
    id: int
    captured: Tuple[Ty, ...]     # source types of captured variables, by level
    arg: Ty
    res: Ty


class _CC:
    def __init__(self, ctx: Sequence[Ty], names: Sequence[str]):
        self.types: List[Ty] = list(ctx)
        self.names: List[Optional[str]] = list(names)
        self.inventory: List[LambdaSite] = []

    def under(self, tys, bnames, sub):
        self.types.extend(tys)
        self.names.extend(bnames)
        try:
            return self.go(sub)
        finally:
            del self.types[len(self.types) - len(tys):]
            del self.names[len(self.names) - len(bnames):]

    def go(self, t) -> Tuple[T.Term, Ty]:
        return getattr(self, "c_" + type(t).__name__)(t)

    def c_Var(self, t):
        n = self.names[t.level]
        if n is None:
            raise ChadTypeError("variable escaped its closure: level %d" % t.level)
        return V(n), self.types[t.level]

    def c_Let(self, t):
        b, _ = self.go(t.bound)
        x = fresh(t.name or "x")
        body, ty = self.under([t.ty], [x], t.body)
        return let(x, cc_type(t.ty), b, body), ty

    def c_UnitLit(self, t):
        return t, UNIT

    def c_RealLit(self, t):
        return t, REAL

    def c_IntLit(self, t):
        return t, INT

    def c_Pair(self, t):
        a, ta = self.go(t.a)
        b, tb = self.go(t.b)
        return T.Pair(a, b), Prod(ta, tb)

    def c_Fst(self, t):
        a, ty = self.go(t.t)
        return T.Fst(a), ty.a

    def c_Snd(self, t):
        a, ty = self.go(t.t)
        return T.Snd(a), ty.b

    def c_Inl(self, t):
        a, ty = self.go(t.t)
        return T.Inl(a, cc_type(t.other)), Sum(ty, t.other)

    def c_Inr(self, t):
        a, ty = self.go(t.t)
        return T.Inr(a, cc_type(t.other)), Sum(t.other, ty)

    def c_Case(self, t):
        s, st = self.go(t.scrut)
        ln, rn = fresh(t.lname or "l"), fresh(t.rname or "r")
        l, ty = self.under([st.a], [ln], t.left)
        r, _ = self.under([st.b], [rn], t.right)
        return T.Case(s, l, r, ln, rn), ty

    def c_Sign(self, t):
        a, _ = self.go(t.t)
        return T.Sign(a), Sum(UNIT, UNIT)

    def c_PrimOp(self, t):
        return T.PrimOp(t.op, tuple(self.go(a)[0] for a in t.args)), REAL

    def c_Build(self, t):
        n, _ = self.go(t.n)
        i = fresh(t.name or "i")
        body, ty = self.under([INT], [i], t.body)
        return T.Build(n, body, i), Array(ty)

    def c_Index(self, t):
        a, ty = self.go(t.arr)
        i, _ = self.go(t.idx)
        return T.Index(a, i), ty.a

    def c_Length(self, t):
        a, _ = self.go(t.arr)
        return T.Length(a), INT

    def c_Fold(self, t):
        a, ty = self.go(t.arr)
        p = fresh(t.name or "p")
        body, _ = self.under([Prod(ty.a, ty.a)], [p], t.body)
        return T.Fold(body, a, p), ty.a

    def c_Lam(self, t):
        depth = len(self.names)
        caps = sorted(l for l in free_levels(t.body, depth + 1) if l != depth)
        site = len(self.inventory)
        self.inventory.append(None)
        cap_tys = [cc_type(self.types[c]) for c in caps]
        rho = tuple_type(cap_tys)
        captup = tuple_term([V(self.names[c]) for c in caps])
        env, x = fresh("env"), fresh(t.name or "x")
        cap_names = [fresh(self.names[c].split("%", 1)[0]) for c in caps]
        saved = self.names
        inner: List[Optional[str]] = [None] * depth
        for c, n in zip(caps, cap_names):
            inner[c] = n
        self.names = inner
        try:
            body, rt = self.under([t.ty], [x], t.body)
        finally:
            self.names = saved
        sig = cc_type(Arrow(t.ty, rt))
        k = len(caps)
        wrapped = let(x, cc_type(t.ty), T.Snd(V(env)), body)
        for i in reversed(range(k)):
            wrapped = let(cap_names[i], cap_tys[i], proj(k, i, T.Fst(V(env))), wrapped)
        self.inventory[site] = LambdaSite(site, tuple(self.types[c] for c in caps), t.ty, rt)
        clam = T.ClosedLam(Prod(rho, cc_type(t.ty)), wrapped, env)
        return T.Pack(rho, T.Pair(captup, clam), sig), Arrow(t.ty, rt)

    def c_App(self, t):
        f, ft = self.go(t.f)
        z = fresh("z")
        a, _ = self.go(t.a)
        body = T.App(T.Snd(V(z)), T.Pair(T.Fst(V(z)), a))
        return T.UnpackCase(f, body, z), ft.b


@dataclass
class Converted:
    term: T.Term          # leveled, under the converted context
    ctx: List[Ty]
    ty: Ty
    inventory: List[LambdaSite]


def closure_convert(ctx: Sequence[Ty], t: T.Term) -> Converted:
    return call_deep(_closure_convert, list(ctx), t)


def _closure_convert(ctx, t):
    t, ty = elaborate(ctx, t)
    names = [fresh("a") for _ in ctx]
    cc = _CC(ctx, names)
    named, _ = cc.go(t)
    return Converted(resolve(named, names), [cc_type(x) for x in ctx], cc_type(ty), cc.inventory)


def lambda_inventory(ctx: Sequence[Ty], t: T.Term) -> List[LambdaSite]:
    return closure_convert(ctx, t).inventory
