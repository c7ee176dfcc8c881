"""Defunctionalisation of closure-converted programs.

A flow analysis assigns each closure-typed value a lambda set (union-find
over the packs that can reach it).  Each set becomes a finite sum of the
capture tuples of its lambdas (a singleton set is the tuple itself) and
each call site becomes a case over the set with the closed bodies inlined.
The result is first order and can be differentiated by monadic CHAD.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .._deep import call_deep
from ..errors import InventoryMismatch, UnsupportedConstruct
from ..lang import terms as T
from ..lang.scope import fresh, resolve
from ..lang.types import (INT, REAL, UNIT, Array, ClosedArrow, Prod, SigmaTag, Sum, Ty,
                          is_first_order)
from ..chad.transform import V, let
from .closure import Converted, closure_convert


# ---- flow types --------------------------------------------------------------------

class _Set:
    """Union-find node for a lambda set; roots carry sites and the
    argument/result flow types shared by every call through the set."""
    __slots__ = ("parent", "sites", "arg", "res", "id")

    def __init__(self, uid, arg, res):
        self.parent = None
        self.sites: List[int] = []
        self.arg = arg
        self.res = res
        self.id = uid


@dataclass
class F:
    kind: str                    # "base" | "prod" | "sum" | "array" | "set"
    a: object = None
    b: object = None


class _Flow:
    def __init__(self):
        self.nsets = 0

    def of_type(self, ty: Ty) -> F:
        if ty in (REAL, UNIT, INT):
            return F("base", ty)
        c = type(ty)
        if c is Prod:
            return F("prod", self.of_type(ty.a), self.of_type(ty.b))
        if c is Sum:
            return F("sum", self.of_type(ty.a), self.of_type(ty.b))
        if c is Array:
            return F("array", self.of_type(ty.a))
        if c is SigmaTag:
            fn = ty.body.b
            s = _Set(self.nsets, self.of_type(fn.a.b), self.of_type(fn.b))
            self.nsets += 1
            return F("set", s)
        raise UnsupportedConstruct("cannot defunctionalise values of type %r" % (ty,))

    @staticmethod
    def find(s: _Set) -> _Set:
        root = s
        while root.parent is not None:
            root = root.parent
        while s.parent is not None:
            s.parent, s = root, s.parent
        return root

    def unify(self, x: F, y: F) -> None:
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            if x is y:
                continue
            if x.kind != y.kind:
                raise UnsupportedConstruct("flow shape mismatch %s/%s" % (x.kind, y.kind))
            if x.kind == "set":
                a, b = self.find(x.a), self.find(y.a)
                if a is b:
                    continue
                if len(a.sites) < len(b.sites):
                    a, b = b, a
                b.parent = a
                a.sites.extend(b.sites)
                a.id = min(a.id, b.id)
                stack.append((a.arg, b.arg))
                stack.append((a.res, b.res))
            elif x.kind == "base":
                continue
            else:
                stack.append((x.a, y.a))
                if x.b is not None:
                    stack.append((x.b, y.b))


# ---- pass 1: flow inference; rebuilds the term with flow annotations ------------------

class _PackSite(T.Term):
    __slots__ = ("site", "fset", "caps")

    def __init__(self, site, fset, caps):
        self.site, self.fset, self.caps = site, fset, caps


class _Dispatch(T.Term):
    __slots__ = ("fset", "scrut", "arg")

    def __init__(self, fset, scrut, arg):
        self.fset, self.scrut, self.arg = fset, scrut, arg


@dataclass
class _Lambda:
    site: int
    cap_flow: F
    param_flow: F
    param_name: str
    body: T.Term                 # annotated, leveled at depth 1 (closed)


class _Infer:
    def __init__(self, flow: _Flow):
        self.flow = flow
        self.env: List[F] = []
        self.lambdas: List[_Lambda] = []

    def under(self, fs, sub):
        self.env.extend(fs)
        try:
            return self.go(sub)
        finally:
            del self.env[len(self.env) - len(fs):]

    def go(self, t):
        m = getattr(self, "i_" + type(t).__name__, None)
        if m is None:
            raise UnsupportedConstruct("%s cannot be defunctionalised" % type(t).__name__)
        return m(t)

    def i_Var(self, t):
        return t, self.env[t.level]

    def i_Let(self, t):
        b, fb = self.go(t.bound)
        fl = self.flow.of_type(t.ty)
        self.flow.unify(fl, fb)
        body, fr = self.under([fl], t.body)
        return T.Let(fl, b, body, t.name), fr

    def i_UnitLit(self, t):
        return t, F("base", UNIT)

    def i_RealLit(self, t):
        return t, F("base", REAL)

    def i_IntLit(self, t):
        return t, F("base", INT)

    def i_Pair(self, t):
        a, fa = self.go(t.a)
        b, fb = self.go(t.b)
        return T.Pair(a, b), F("prod", fa, fb)

    def i_Fst(self, t):
        a, f = self.go(t.t)
        return T.Fst(a), f.a

    def i_Snd(self, t):
        a, f = self.go(t.t)
        return T.Snd(a), f.b

    def i_Inl(self, t):
        a, f = self.go(t.t)
        fo = self.flow.of_type(t.other)
        return T.Inl(a, fo), F("sum", f, fo)

    def i_Inr(self, t):
        a, f = self.go(t.t)
        fo = self.flow.of_type(t.other)
        return T.Inr(a, fo), F("sum", fo, f)

    def i_Case(self, t):
        s, fs = self.go(t.scrut)
        l, fl = self.under([fs.a], t.left)
        r, fr = self.under([fs.b], t.right)
        self.flow.unify(fl, fr)
        return T.Case(s, l, r, t.lname, t.rname), fl

    def i_Sign(self, t):
        a, _ = self.go(t.t)
        u = F("base", UNIT)
        return T.Sign(a), F("sum", u, u)

    def i_PrimOp(self, t):
        return T.PrimOp(t.op, tuple(self.go(a)[0] for a in t.args)), F("base", REAL)

    def i_Build(self, t):
        n, _ = self.go(t.n)
        body, fb = self.under([F("base", INT)], t.body)
        return T.Build(n, body, t.name), F("array", fb)

    def i_Index(self, t):
        a, fa = self.go(t.arr)
        i, _ = self.go(t.idx)
        return T.Index(a, i), fa.a

    def i_Length(self, t):
        a, _ = self.go(t.arr)
        return T.Length(a), F("base", INT)

    def i_Fold(self, t):
        a, fa = self.go(t.arr)
        body, fb = self.under([F("prod", fa.a, fa.a)], t.body)
        self.flow.unify(fb, fa.a)
        return T.Fold(body, a, t.name), fa.a

    def i_Pack(self, t):
        inner = t.t
        if not (isinstance(inner, T.Pair) and isinstance(inner.b, T.ClosedLam)):
            raise UnsupportedConstruct("pack must hold (captures, closed lambda)")
        caps, fc = self.go(inner.a)
        clam = inner.b
        fp = self.flow.of_type(clam.ty)
        self.flow.unify(fp.a, fc)
        saved, self.env = self.env, [fp]
        try:
            body, fr = self.go(clam.body)
        finally:
            self.env = saved
        fs = self.flow.of_type(t.sig)
        root = self.flow.find(fs.a)
        site = len(self.lambdas)
        root.sites.append(site)
        self.flow.unify(root.arg, fp.b)
        self.flow.unify(root.res, fr)
        self.lambdas.append(_Lambda(site, fc, fp, clam.name or "env", body))
        return _PackSite(site, fs, caps), fs

    def i_UnpackCase(self, t):
        b = t.body
        ok = (isinstance(b, T.App) and isinstance(b.f, T.Snd) and isinstance(b.a, T.Pair)
              and isinstance(b.a.a, T.Fst))
        if not ok:
            raise UnsupportedConstruct("unpack must be a closure call")
        s, fs = self.go(t.scrut)
        a, fa = self.under([F("base", UNIT)], b.a.b)
        root = self.flow.find(fs.a)
        self.flow.unify(root.arg, fa)
        return _Dispatch(fs, s, a), self.flow.find(fs.a).res


# ---- pass 2: emit first-order code -------------------------------------------------------

class _Emit:
    def __init__(self, flow: _Flow, lambdas: List[_Lambda]):
        self.flow = flow
        self.lambdas = lambdas
        self.names: List[str] = []
        self.types: Dict[int, Ty] = {}
        self.busy: set = set()
        self.bodies: Dict[int, T.Term] = {}

    # types
    def sites(self, fset: F) -> List[int]:
        return sorted(self.flow.find(fset.a).sites)

    def ty(self, f: F) -> Ty:
        k = f.kind
        if k == "base":
            return f.a
        if k == "prod":
            return Prod(self.ty(f.a), self.ty(f.b))
        if k == "sum":
            return Sum(self.ty(f.a), self.ty(f.b))
        if k == "array":
            return Array(self.ty(f.a))
        root = self.flow.find(f.a)
        got = self.types.get(id(root))
        if got is not None:
            return got
        if id(root) in self.busy:
            raise UnsupportedConstruct("a closure captures a closure of its own lambda set")
        if not root.sites:
            return UNIT
        self.busy.add(id(root))
        try:
            parts = [self.ty(self.lambdas[s].cap_flow) for s in sorted(root.sites)]
        finally:
            self.busy.discard(id(root))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Sum(p, out)
        self.types[id(root)] = out
        return out

    def sum_tail(self, sites: List[int], j: int) -> Ty:
        parts = [self.ty(self.lambdas[s].cap_flow) for s in sites[j:]]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Sum(p, out)
        return out

    # terms
    def under(self, bnames, sub):
        self.names.extend(bnames)
        try:
            return self.go(sub)
        finally:
            del self.names[len(self.names) - len(bnames):]

    def go(self, t):
        return getattr(self, "e_" + type(t).__name__)(t)

    def e_Var(self, t):
        return V(self.names[t.level])

    def e_Let(self, t):
        x = fresh(t.name or "x")
        return let(x, self.ty(t.ty), self.go(t.bound), self.under([x], t.body))

    def e_UnitLit(self, t):
        return t

    e_RealLit = e_IntLit = e_UnitLit

    def e_Pair(self, t):
        return T.Pair(self.go(t.a), self.go(t.b))

    def e_Fst(self, t):
        return T.Fst(self.go(t.t))

    def e_Snd(self, t):
        return T.Snd(self.go(t.t))

    def e_Inl(self, t):
        return T.Inl(self.go(t.t), self.ty(t.other))

    def e_Inr(self, t):
        return T.Inr(self.go(t.t), self.ty(t.other))

    def e_Case(self, t):
        ln, rn = fresh(t.lname or "l"), fresh(t.rname or "r")
        return T.Case(self.go(t.scrut), self.under([ln], t.left), self.under([rn], t.right), ln, rn)

    def e_Sign(self, t):
        return T.Sign(self.go(t.t))

    def e_PrimOp(self, t):
        return T.PrimOp(t.op, tuple(self.go(a) for a in t.args))

    def e_Build(self, t):
        i = fresh(t.name or "i")
        return T.Build(self.go(t.n), self.under([i], t.body), i)

    def e_Index(self, t):
        return T.Index(self.go(t.arr), self.go(t.idx))

    def e_Length(self, t):
        return T.Length(self.go(t.arr))

    def e_Fold(self, t):
        p = fresh(t.name or "p")
        return T.Fold(self.under([p], t.body), self.go(t.arr), p)

    def e_PackSite(self, t):
        sites = self.sites(t.fset)
        v = self.go(t.caps)
        j = sites.index(t.site)
        k = len(sites)
        if k == 1:
            return v
        out = v if j == k - 1 else T.Inl(v, self.sum_tail(sites, j + 1))
        for i in reversed(range(j)):
            out = T.Inr(out, self.ty(self.lambdas[sites[i]].cap_flow))
        return out

    e__PackSite = e_PackSite

    def body(self, site: int) -> Tuple[str, T.Term]:
        lam = self.lambdas[site]
        got = self.bodies.get(site)
        if got is None:
            if site in self.busy:
                raise UnsupportedConstruct("recursive closure call")
            self.busy.add(site)
            saved, self.names = self.names, []
            try:
                got = self.under([lam.param_name], lam.body)
            finally:
                self.names = saved
                self.busy.discard(site)
            self.bodies[site] = got
        return lam.param_name, got

    def e__Dispatch(self, t):
        sites = self.sites(t.fset)
        if not sites:
            raise InventoryMismatch("call site with no reaching lambda")
        sv, av = fresh("clo"), fresh("arg")
        root = self.flow.find(t.fset.a)
        arg = self.under([fresh("z")], t.arg)

        def branch(site, cap):
            pname, body = self.body(site)
            lam = self.lambdas[site]
            return let(pname, self.ty(lam.param_flow), T.Pair(cap, V(av)), body)

        def dispatch(ss, scr):
            if len(ss) == 1:
                return branch(ss[0], V(scr))
            cn, rn = fresh("c"), fresh("rest")
            return T.Case(V(scr), branch(ss[0], V(cn)), dispatch(ss[1:], rn), cn, rn)
        return let(sv, self.ty(t.fset), self.go(t.scrut),
                   let(av, self.ty(root.arg), arg, dispatch(sites, sv)))


@dataclass
class Defunctionalised:
    term: T.Term
    ctx: List[Ty]
    ty: Ty
    sites: int


def defunctionalise(conv: Converted) -> Defunctionalised:
    return call_deep(_defunctionalise, conv)


def _defunctionalise(conv):
    if not all(is_first_order(x) for x in conv.ctx):
        raise UnsupportedConstruct("program inputs must be first order")
    flow = _Flow()
    inf = _Infer(flow)
    inf.env = [flow.of_type(x) for x in conv.ctx]
    annotated, fr = inf.go(conv.term)
    em = _Emit(flow, inf.lambdas)
    names = [fresh("a") for _ in conv.ctx]
    em.names = list(names)
    named = em.go(annotated)
    return Defunctionalised(resolve(named, names), list(conv.ctx), em.ty(fr), len(inf.lambdas))


def defunctionalise_program(ctx: Sequence[Ty], t: T.Term) -> Defunctionalised:
    return defunctionalise(closure_convert(ctx, t))
