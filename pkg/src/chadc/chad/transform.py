"""The CHAD code transformation.

One rule set, parameterised by how environment cotangents are handled:

  naive-dense     env cotangent is a tuple of dense cotangents; zero, one,
                  plus and split are explicit environment operations
  naive-treemap   same rules, env cotangent is a persistent balanced map
  naive-ho        naive-dense plus function types with invocation logs
  monadic         backpropagators are actions in the accumulation monad
  closed          monadic plus closed functions and closure packs (the
                  target of closure conversion)

Rules build terms with named variables; `chad_transform` resolves them.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from ..errors import UnsupportedConstruct, UnsupportedType
from ..lang import terms as T
from ..lang.scope import fresh, resolve
from ..lang.typecheck import elaborate, subst_hole
from ..lang.types import (HOLE, INT, LREAL, LUNIT, REAL, UNIT, Array, Arrow, Bag, ClosedArrow,
                          Ctx, EnvTy, EvmTy, ListTy, LProd, LSigma, LSum, Prod, SigmaTag, Sum,
                          TreeTy, Ty, ctx_of)
from ..ops import OPS


class Mode(str, Enum):
    NAIVE_DENSE = "naive-dense"
    NAIVE_TREEMAP = "naive-treemap"
    NAIVE_HO = "naive-ho"
    MONADIC = "monadic"
    CLOSED = "closed"


@dataclass(frozen=True)
class TransformConfig:
    mode: Mode = Mode.MONADIC
    arrays: bool = True

    @property
    def monadic(self) -> bool:
        return self.mode in (Mode.MONADIC, Mode.CLOSED)


# ---- types -----------------------------------------------------------------------

def d1_type(ty: Ty, mode: Mode = Mode.MONADIC) -> Ty:
    if ty in (REAL, UNIT, INT) or ty is HOLE:
        return ty
    c = type(ty)
    if c is Prod or c is Sum:
        return c(d1_type(ty.a, mode), d1_type(ty.b, mode))
    if c is Array:
        return Array(d1_type(ty.a, mode))
    if c is Arrow:
        if mode is not Mode.NAIVE_HO:
            raise UnsupportedType("function types need naive-ho, defunctionalise or closure-chad")
        return Arrow(d1_type(ty.a, mode),
                     Prod(d1_type(ty.b, mode), Arrow(d2_type(ty.b, mode), d2_type(ty.a, mode))))
    if c is ClosedArrow:
        return ClosedArrow(d1_type(ty.a, mode),
                           Prod(d1_type(ty.b, mode), Arrow(d2_type(ty.b, mode), d2_type(ty.a, mode))))
    if c is SigmaTag:
        return SigmaTag(d1_type(ty.body, mode))
    raise UnsupportedType("no primal type for %r" % (ty,))


def d2_type(ty: Ty, mode: Mode = Mode.MONADIC) -> Ty:
    if ty is REAL:
        return LREAL
    if ty is UNIT or ty is INT:
        return LUNIT
    if ty is HOLE:
        return HOLE
    c = type(ty)
    if c is Prod:
        return LProd(d2_type(ty.a, mode), d2_type(ty.b, mode))
    if c is Sum:
        return LSum(d2_type(ty.a, mode), d2_type(ty.b, mode))
    if c is Array:
        return Bag(Prod(INT, d2_type(ty.a, mode)))
    if c is Arrow:
        if mode is not Mode.NAIVE_HO:
            raise UnsupportedType("function types need naive-ho, defunctionalise or closure-chad")
        return ListTy(Prod(d1_type(ty.a, mode), d2_type(ty.b, mode)))
    if c is ClosedArrow:
        return LUNIT
    if c is SigmaTag:
        return LSigma(d2_type(ty.body, mode))
    raise UnsupportedType("no cotangent type for %r" % (ty,))


# ---- named-term helpers ---------------------------------------------------------------

def V(name: str) -> T.Var:
    return T.Var(None, name)


def let(name, ty, bound, body):
    return T.Let(ty, bound, body, name)


def lam(name, ty, body):
    return T.Lam(ty, body, name)


def proj(n: int, i: int, x: T.Term) -> T.Term:
    """i-th component of a left-nested n-tuple."""
    if n == 1:
        return x
    t = x
    for _ in range(n - 1 - i):
        t = T.Fst(t)
    return t if i == 0 else T.Snd(t)


# ---- the transformation ------------------------------------------------------------------

class Chad:
    def __init__(self, cfg: TransformConfig, ctx: Sequence[Ty], names: Sequence[str]):
        self.cfg = cfg
        self.mode = cfg.mode
        self.dense = cfg.mode in (Mode.NAIVE_DENSE, Mode.NAIVE_HO)
        self.repr = "map" if cfg.mode is Mode.NAIVE_TREEMAP else "dense"
        self.types: List[Ty] = list(ctx)
        self.names: List[str] = list(names)
        self.ectx: Ctx = ctx_of(self.d2(t) for t in ctx)
        # provenance: the derivative emitted for each source subterm
        self.provenance: List[Tuple[T.Term, T.Term]] = []

    def d1(self, ty):
        return d1_type(ty, self.mode)

    def d2(self, ty):
        return d2_type(ty, self.mode)

    # -- environment-cotangent operations (mode dependent)
    def res(self, ectx=None) -> Ty:
        ectx = self.ectx if ectx is None else ectx
        return EvmTy(ectx, UNIT) if self.cfg.monadic else EnvTy(ectx)

    def dty(self, ty, ectx=None) -> Ty:
        return Prod(self.d1(ty), Arrow(self.d2(ty), self.res(ectx)))

    def zero_env(self):
        if self.cfg.monadic:
            return T.EvmReturn(self.ectx, T.UnitLit())
        return T.EnvZero(self.ectx, self.repr)

    def one(self, level, d):
        if self.cfg.monadic:
            return T.EvmOne(self.ectx, level, d)
        return T.EnvOne(self.ectx, level, d, self.repr)

    def comb(self, a, b):
        return T.EvmSeq(a, b) if self.cfg.monadic else T.EnvPlus(a, b)

    def under(self, ty, name, ectx, fn):
        """Run fn with a source binder of type ty (target name) in scope."""
        saved = self.ectx
        self.types.append(ty)
        self.names.append(name)
        self.ectx = ectx
        try:
            return fn()
        finally:
            self.types.pop()
            self.names.pop()
            self.ectx = saved

    def pop_contrib(self, ty, ectx_inner, act, k):
        """Scope/split off the cotangent of a binder of type ty, then k(dx)."""
        d2 = self.d2(ty)
        if self.cfg.monadic:
            r = fresh("r")
            return T.EvmBind(T.EvmScope(d2, act),
                             lam(r, Prod(UNIT, d2), k(T.Snd(V(r)))))
        s = fresh("s")
        return let(s, Prod(EnvTy(self.ectx), d2), T.EnvSplit(ectx_inner, act),
                   T.EnvPlus(T.Fst(V(s)), k(T.Snd(V(s)))))

    def bp(self, dterm, ty, body, ectx=None, hint="x"):
        """let ⟨x, x'⟩ = dterm in body(x, x')."""
        p, x, xb = fresh("p" + hint), fresh(hint), fresh(hint + "b")
        pty = self.dty(ty, ectx)
        return let(p, pty, dterm,
                   let(x, pty.a, T.Fst(V(p)),
                       let(xb, pty.b, T.Snd(V(p)), body(x, xb))))

    def back(self, ty, fn):
        d = fresh("d")
        return lam(d, self.d2(ty), fn(V(d)))

    # -- rules
    def go(self, t: T.Term) -> Tuple[T.Term, Ty]:
        m = getattr(self, "r_" + type(t).__name__, None)
        if m is None:
            raise UnsupportedConstruct("%s is not supported in mode %s"
                                       % (type(t).__name__, self.mode.value))
        out = m(t)
        self.provenance.append((t, out[0]))
        return out

    def r_Var(self, t):
        k = t.level
        ty = self.types[k]
        return T.Pair(V(self.names[k]), self.back(ty, lambda d: self.one(k, d))), ty

    def r_Let(self, t):
        d1, ty1 = self.go(t.bound)
        x_name = fresh(t.name or "x")
        inner = self.ectx.extend(self.d2(t.ty))
        outer = self.ectx

        def body(x, xb):
            d2, ty2 = self.under(t.ty, x, inner, lambda: self.go(t.body))

            def fin(y, yb):
                return T.Pair(V(y), self.back(ty2, lambda d: self.pop_contrib(
                    t.ty, inner, T.App(V(yb), d), lambda dx: T.App(V(xb), dx))))
            return self.bp(d2, ty2, fin, ectx=inner, hint="y"), ty2

        # the binder of the bound value must be named x_name for the body
        p, xb = fresh("p"), fresh("xb")
        pty = self.dty(ty1)
        inner_term, ty2 = body(x_name, xb)
        out = let(p, pty, d1,
                  let(x_name, pty.a, T.Fst(V(p)),
                      let(xb, pty.b, T.Snd(V(p)), inner_term)))
        return out, ty2

    def _const(self, prim, ty):
        return T.Pair(prim, self.back(ty, lambda d: self.zero_env())), ty

    def r_UnitLit(self, t):
        return self._const(T.UnitLit(), UNIT)

    def r_RealLit(self, t):
        return self._const(T.RealLit(t.value), REAL)

    def r_IntLit(self, t):
        return self._const(T.IntLit(t.value), INT)

    def r_Pair(self, t):
        da, ta = self.go(t.a)
        db, tb = self.go(t.b)
        ty = Prod(ta, tb)
        lty = self.d2(ty)

        def body(x, xb):
            return self.bp(db, tb, lambda y, yb: T.Pair(
                T.Pair(V(x), V(y)),
                self.back(ty, lambda d: self.comb(
                    T.App(V(xb), T.LFst(d, lty, self.dense)),
                    T.App(V(yb), T.LSnd(d, lty, self.dense))))), hint="y")
        return self.bp(da, ta, body), ty

    def r_Fst(self, t):
        dx, ty = self.go(t.t)
        res = ty.a
        return self.bp(dx, ty, lambda x, xb: T.Pair(
            T.Fst(V(x)),
            self.back(res, lambda d: T.App(V(xb), T.LPairC(d, T.LZero(self.d2(ty.b), self.dense)))))), res

    def r_Snd(self, t):
        dx, ty = self.go(t.t)
        res = ty.b
        return self.bp(dx, ty, lambda x, xb: T.Pair(
            T.Snd(V(x)),
            self.back(res, lambda d: T.App(V(xb), T.LPairC(T.LZero(self.d2(ty.a), self.dense), d))))), res

    def _inj(self, t, left):
        dx, tx = self.go(t.t)
        ty = Sum(tx, t.other) if left else Sum(t.other, tx)
        lty = self.d2(ty)
        prim = T.Inl if left else T.Inr
        cast = T.LCastL if left else T.LCastR
        return self.bp(dx, tx, lambda x, xb: T.Pair(
            prim(V(x), self.d1(t.other)),
            self.back(ty, lambda d: T.App(V(xb), cast(d, lty, self.dense))))), ty

    def r_Inl(self, t):
        return self._inj(t, True)

    def r_Inr(self, t):
        return self._inj(t, False)

    def r_Case(self, t):
        ds, ts = self.go(t.scrut)
        lty = self.d2(ts)

        def branch(ty, name, sub, inj):
            xn = fresh(name or "x")
            inner = self.ectx.extend(self.d2(ty))
            db, rt = self.under(ty, xn, inner, lambda: self.go(sub))
            term = self.bp(db, rt, lambda y, yb: T.Pair(V(y), self.back(rt, lambda d: self.pop_contrib(
                ty, inner, T.App(V(yb), d), lambda dx: T.App(V(zb_name), inj(dx, lty))))),
                ectx=inner, hint="y")
            return xn, term, rt

        zb_name = fresh("zb")
        z_name = fresh("z")
        ln, lterm, rt = branch(ts.a, t.lname, t.left, T.LInl)
        rn, rterm, _ = branch(ts.b, t.rname, t.right, T.LInr)
        p = fresh("pz")
        pty = self.dty(ts)
        out = let(p, pty, ds,
                  let(z_name, pty.a, T.Fst(V(p)),
                      let(zb_name, pty.b, T.Snd(V(p)),
                          T.Case(V(z_name), lterm, rterm, ln, rn))))
        return out, rt

    def r_Sign(self, t):
        dx, tx = self.go(t.t)
        ty = Sum(UNIT, UNIT)
        return self.bp(dx, tx, lambda x, xb: T.Pair(
            T.Sign(V(x)), self.back(ty, lambda d: self.zero_env()))), ty

    def r_PrimOp(self, t):
        parts = [self.go(a) for a in t.args]
        n = len(parts)
        xs: List[Tuple[str, str]] = []

        def build(i):
            if i < n:
                return self.bp(parts[i][0], REAL, lambda x, xb: (xs.append((x, xb)), build(i + 1))[1])
            prim = T.PrimOp(t.op, tuple(V(x) for x, _ in xs))

            def backp(d):
                ds = fresh("ds")
                dty = LREAL if n == 1 else _lreal_tuple(n)
                acts = [T.App(V(xb), proj(n, i, V(ds))) for i, (_, xb) in enumerate(xs)]
                acc = acts[0]
                for a in acts[1:]:
                    acc = self.comb(acc, a)
                return let(ds, dty, T.DOpT(t.op, d, tuple(V(x) for x, _ in xs)), acc)
            return T.Pair(prim, self.back(REAL, backp))
        return build(0), REAL

    # -- arrays (monadic only)
    def _arrays(self, t):
        if not self.cfg.monadic or not self.cfg.arrays:
            raise UnsupportedConstruct("arrays are only supported in monadic mode")

    def r_Build(self, t):
        self._arrays(t)
        dn, _ = self.go(t.n)
        iname = fresh(t.name or "i")
        inner = self.ectx.extend(LUNIT)
        db, te = self.under(INT, iname, inner, lambda: self.go(t.body))
        ety = Prod(self.d1(te), Arrow(self.d2(te), self.res(inner)))
        aty = Array(ety)
        ty = Array(te)
        d2e = self.d2(te)
        ectx = self.ectx

        def body(nv, _nb):
            a, u, a1, a2 = fresh("a"), fresh("u"), fresh("a1"), fresh("a2")

            def backp(d):
                pairs, d2, acts = fresh("pairs"), fresh("dd"), fresh("acts")
                f, dd = fresh("f"), fresh("dx")
                j = fresh("j")
                return let(pairs, Array(Prod(INT, d2e)), T.Collect(d),
                    let(d2, Array(d2e), T.Scatter(T.Build(V(nv), T.LZero(d2e), j), V(pairs)),
                        let(acts, Array(EvmTy(ectx, UNIT)),
                            T.ZipWith(T.EvmSeq(T.EvmScope(LUNIT, T.App(V(f), V(dd))),
                                               T.EvmReturn(ectx, T.UnitLit())),
                                      V(a2), V(d2), f, dd),
                            T.EvmSeq(T.SequenceEvm(ectx, V(acts)), T.EvmReturn(ectx, T.UnitLit())))))
            return let(a, aty, T.Build(V(nv), db, iname),
                       let(u, Prod(Array(ety.a), Array(ety.b)), T.Unzip(V(a)),
                           let(a1, Array(ety.a), T.Fst(V(u)),
                               let(a2, Array(ety.b), T.Snd(V(u)),
                                   T.Pair(V(a1), self.back(ty, backp))))))
        return self.bp(dn, INT, body, hint="n"), ty

    def r_Index(self, t):
        self._arrays(t)
        da, ta = self.go(t.arr)
        di, _ = self.go(t.idx)
        res = ta.a
        return self.bp(da, ta, lambda x, xb: self.bp(di, INT, lambda i, _ib: T.Pair(
            T.Index(V(x), V(i)),
            self.back(res, lambda d: T.App(V(xb), T.BagOne(V(i), d)))), hint="i")), res

    def r_Length(self, t):
        self._arrays(t)
        da, ta = self.go(t.arr)
        return self.bp(da, ta, lambda x, xb: T.Pair(
            T.Length(V(x)), self.back(INT, lambda d: self.zero_env()))), INT

    def r_Fold(self, t):
        self._arrays(t)
        da, ta = self.go(t.arr)
        te = ta.a
        pty = Prod(te, te)
        d2e, d2p = self.d2(te), self.d2(pty)
        inner = self.ectx.extend(d2p)
        fty = Arrow(d2e, self.res(inner))
        tty = TreeTy(self.d1(te), fty)
        ectx = self.ectx
        pname = fresh(t.name or "p")
        q = fresh("q")

        def combine():
            db, rt = self.go(t.body)
            return self.bp(db, rt, lambda y, f: T.TreeNode(T.Fst(V(q)), V(y), V(f), T.Snd(V(q))),
                           ectx=inner, hint="y")
        node = self.under(pty, pname, inner, combine)
        comb = let(pname, self.d1(pty), T.Pair(T.GetA(T.Fst(V(q))), T.GetA(T.Snd(V(q)))), node)

        def body(s1, s2):
            tree, xl = fresh("tree"), fresh("xl")
            dp, ff, r, lf = fresh("dp"), fresh("ff"), fresh("r"), fresh("lf")
            g = lam(dp, d2e, lam(ff, fty, T.EvmBind(
                T.EvmScope(d2p, T.App(V(ff), V(dp))),
                lam(r, Prod(UNIT, d2p), T.EvmReturn(ectx, T.Pair(
                    T.LFst(T.Snd(V(r)), d2p), T.LSnd(T.Snd(V(r)), d2p)))))))
            return let(tree, tty, T.Fold(comb, T.MapArr(T.TreeLeaf(V(xl), fty), V(s1), xl), q),
                       T.Pair(T.GetA(V(tree)), self.back(te, lambda d: T.EvmBind(
                           T.UnTree(g, d, V(tree)),
                           lam(lf, ListTy(d2e), T.App(V(s2), T.FromList(V(lf))))))))
        return self.bp(da, ta, body, hint="s"), te

    # -- naive higher-order
    def r_Lam(self, t):
        if self.mode is not Mode.NAIVE_HO:
            raise UnsupportedConstruct("lambda needs naive-ho, defunctionalise or closure-chad")
        sig = t.ty
        inner = self.ectx.extend(self.d2(sig))
        x = fresh(t.name or "x")
        db, rt = self.under(sig, x, inner, lambda: self.go(t.body))
        fty = Arrow(sig, rt)
        pty = Prod(self.d1(rt), Arrow(self.d2(rt), EnvTy(inner)))
        p, d = fresh("p"), fresh("d")
        prim = lam(x, self.d1(sig), let(p, pty, db, T.Pair(T.Fst(V(p)), lam(d, self.d2(rt), T.Snd(
            T.EnvSplit(inner, T.App(T.Snd(V(p)), V(d))))))))
        z, acc, x2, p2 = fresh("z"), fresh("acc"), fresh(t.name or "x"), fresh("p")
        db2, _ = self.under(sig, x2, inner, lambda: self.go(t.body))
        ety = Prod(self.d1(sig), self.d2(rt))

        def backp(l):
            return T.FoldList(
                let(x2, self.d1(sig), T.Fst(V(z)),
                    let(p2, pty, db2,
                        T.EnvPlus(V(acc), T.Fst(T.EnvSplit(inner, T.App(T.Snd(V(p2)), T.Snd(V(z)))))))),
                self.zero_env(), l, z, acc)
        return T.Pair(prim, self.back(fty, backp)), fty

    def r_App(self, t):
        df, tf = self.go(t.f)
        da, ta = self.go(t.a)
        res = tf.b
        if isinstance(tf, ClosedArrow):
            return self._closed_app(df, tf, da, ta), res
        if self.mode is not Mode.NAIVE_HO:
            raise UnsupportedConstruct("application needs naive-ho, defunctionalise or closure-chad")

        def body(x, xb):
            def inner(y, yb):
                r, z, zb = fresh("r"), fresh("z"), fresh("zb")
                rty = self.d1(tf).b
                return let(r, rty, T.App(V(x), V(y)),
                           let(z, rty.a, T.Fst(V(r)),
                               let(zb, rty.b, T.Snd(V(r)),
                                   T.Pair(V(z), self.back(res, lambda d: T.EnvPlus(
                                       T.App(V(yb), T.App(V(zb), d)),
                                       T.App(V(xb), T.ListCons(
                                           T.Pair(V(y), d),
                                           T.ListNil(Prod(self.d1(ta), self.d2(res)))))))))))
            return self.bp(da, ta, inner, hint="y")
        return self.bp(df, tf, body, hint="f"), res

    # -- closed functions and closure packs
    def _closed(self):
        if self.mode is not Mode.CLOSED:
            raise UnsupportedConstruct("closure constructs need closure-chad")

    def _closed_app(self, df, tf, da, ta):
        self._closed()
        res = tf.b

        def body(x, _xb):
            def inner(y, yb):
                r, z, zb = fresh("r"), fresh("z"), fresh("zb")
                rty = self.d1(tf).b
                return let(r, rty, T.App(V(x), V(y)),
                           let(z, rty.a, T.Fst(V(r)),
                               let(zb, rty.b, T.Snd(V(r)),
                                   T.Pair(V(z), self.back(res, lambda d: T.App(V(yb), T.App(V(zb), d)))))))
            return self.bp(da, ta, inner, hint="y")
        return self.bp(df, tf, body, hint="f")

    def r_ClosedLam(self, t):
        self._closed()
        a = t.ty
        x = fresh(t.name or "x")
        saved = (self.types, self.names, self.ectx)
        self.types, self.names = [a], [x]
        ectx1 = ctx_of([self.d2(a)])
        self.ectx = ectx1
        try:
            db, b = self.go(t.body)
            d = fresh("d")

            def fin(y, yb):
                run = T.EvmRun(ectx1, T.App(V(yb), V(d)), T.EnvZero(ectx1, "sparse"))
                return T.Pair(V(y), lam(d, self.d2(b), T.Snd(T.EnvSplit(ectx1, T.Snd(run)))))
            body = self.bp(db, b, fin, hint="y")
        finally:
            self.types, self.names, self.ectx = saved
        fty = ClosedArrow(a, b)
        prim = T.ClosedLam(self.d1(a), body, x)
        return T.Pair(prim, self.back(fty, lambda d: self.zero_env())), fty

    def r_Pack(self, t):
        self._closed()
        dx, tx = self.go(t.t)
        sig = t.sig
        tag1 = self.d1(t.tag)
        zty = self.d2(subst_hole(sig.body, t.tag))
        return self.bp(dx, tx, lambda x, xb: T.Pair(
            T.Pack(tag1, V(x), self.d1(sig)),
            self.back(sig, lambda v: T.App(V(xb), T.LCastSig(tag1, v, zty))))), sig

    def r_UnpackCase(self, t):
        self._closed()
        ds, sig = self.go(t.scrut)
        bty = sig.body
        d2b = self.d2(bty)
        inner = self.ectx.extend(d2b)
        zn = fresh(t.name or "z")
        w, wb = fresh("w"), fresh("wb")

        db, rt = self.under(bty, zn, inner, lambda: self.go(t.body))
        body = self.bp(db, rt, lambda y, yb: T.Pair(V(y), self.back(rt, lambda v: self.pop_contrib(
            bty, inner, T.App(V(yb), v),
            lambda dz: T.App(V(wb), T.LPackDyn(V(w), dz, LSigma(d2b)))))), ectx=inner, hint="y")
        p = fresh("pw")
        pty = self.dty(sig)
        out = let(p, pty, ds,
                  let(w, pty.a, T.Fst(V(p)),
                      let(wb, pty.b, T.Snd(V(p)), T.UnpackCase(V(w), body, zn))))
        return out, rt


def _lreal_tuple(n):
    acc = LREAL
    for _ in range(n - 1):
        acc = Prod(acc, LREAL)
    return acc


@dataclass
class Transformed:
    term: T.Term            # leveled target term under d1 context
    names: List[str]
    d1_ctx: List[Ty]
    d2_ctx: Ctx
    ty: Ty                  # source result type
    cfg: TransformConfig
    named: T.Term = None    # the same term before name resolution
    provenance: list = None  # (source subterm, its derivative inside `named`)


def check_mode_support(cfg: TransformConfig, t: T.Term) -> None:
    from ..lang.scope import iter_terms
    arrays = (T.Build, T.Index, T.Fold, T.Length)
    for x in iter_terms(t):
        if isinstance(x, arrays) and not cfg.monadic:
            raise UnsupportedConstruct("arrays are not supported in %s mode" % cfg.mode.value)
        if isinstance(x, (T.Lam,)) and cfg.mode is not Mode.NAIVE_HO:
            raise UnsupportedConstruct("lambda requires naive-ho, defunctionalise or closure-chad")


def chad_transform(cfg: TransformConfig, ctx: Sequence[Ty], t: T.Term,
                   names: Optional[Sequence[str]] = None) -> Transformed:
    from .._deep import call_deep
    return call_deep(_chad_transform, cfg, ctx, t, names)


def _chad_transform(cfg, ctx, t, names):
    ctx = list(ctx)
    if names is None:
        names = ["x%d" % i for i in range(len(ctx))]
    names = [fresh(n) for n in names]
    t, ty = elaborate(ctx, t)
    check_mode_support(cfg, t)
    ch = Chad(cfg, ctx, names)
    named, ty2 = ch.go(t)
    term = resolve(named, names)
    return Transformed(term, names, [ch.d1(x) for x in ctx], ch.ectx, ty, cfg, named, ch.provenance)
