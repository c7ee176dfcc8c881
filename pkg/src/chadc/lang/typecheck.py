"""Type synthesis for source and target terms.

Checking is bidirectional only where the surface syntax leaves a type out:
an ``inl``/``inr`` without its other summand takes it from the expected type.
``elaborate`` returns the term with those annotations filled in.
"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .._deep import deep
from ..errors import ChadTypeError
from .. import ops as O
from . import terms as T
from .scope import field_names
from .types import (HOLE, INT, LREAL, LUNIT, REAL, UNIT, Array, Arrow, Bag, ClosedArrow, Ctx,
                    EnvTy, EvmTy, ListTy, LProd, LSigma, LSum, Prod, SigmaTag, Sum, TreeTy, Ty,
                    is_linear, prod_of)

BOOL = Sum(UNIT, UNIT)


def subst_hole(ty: Ty, rep: Ty) -> Ty:
    if ty is HOLE:
        return rep
    if isinstance(ty, (Prod, Sum, Arrow, ClosedArrow, LProd, LSum)):
        return type(ty)(subst_hole(ty.a, rep), subst_hole(ty.b, rep))
    if isinstance(ty, (Array, Bag, ListTy)):
        return type(ty)(subst_hole(ty.a, rep))
    if isinstance(ty, TreeTy):
        return TreeTy(subst_hole(ty.a, rep), subst_hole(ty.f, rep))
    # nested existentials keep their own hole
    return ty


def _show(t) -> str:
    from .syntax import pretty
    try:
        s = pretty(t, width=10 ** 9)
    except Exception:
        s = type(t).__name__
    return s if len(s) <= 120 else s[:117] + "..."


def _tyname(ty) -> str:
    from .syntax import show_type
    return show_type(ty) if ty is not None else "?"


def _cotangent_type(ty) -> bool:
    return is_linear(ty) or isinstance(ty, ListTy)


class _Checker:
    def __init__(self, ctx: Sequence[Ty]):
        self.env: List[Ty] = list(ctx)

    def fail(self, t, msg):
        raise ChadTypeError("%s in %s" % (msg, _show(t)))

    def expect(self, t, want, got):
        if want != got:
            self.fail(t, "type mismatch: expected %s, got %s" % (_tyname(want), _tyname(got)))

    def under(self, types, t, expected=None):
        env = self.env
        env.extend(types)
        try:
            return self.tc(t, expected)
        finally:
            del env[len(env) - len(types):]

    def closed(self, types, t, expected=None):
        saved = self.env
        self.env = list(types)
        try:
            return self.tc(t, expected)
        finally:
            self.env = saved

    def tc(self, t: T.Term, expected: Optional[Ty] = None) -> Tuple[T.Term, Ty]:
        m = getattr(self, "t_" + type(t).__name__, None)
        if m is None:
            self.fail(t, "unknown construct")
        t2, ty = m(t, expected)
        if expected is not None and ty != expected:
            self.expect(t, expected, ty)
        return t2, ty

    # -- helpers
    def sub(self, t, fieldname, expected=None):
        return self.tc(getattr(t, fieldname), expected)

    def same(self, t, changes):
        for k, v in changes.items():
            if getattr(t, k) is not v:
                kw = {n: getattr(t, n) for n in field_names(type(t))}
                kw.update(changes)
                return type(t)(**kw)
        return t

    # -- source
    def t_Var(self, t, e):
        if t.level is None or not (0 <= t.level < len(self.env)):
            self.fail(t, "variable level out of scope")
        return t, self.env[t.level]

    def t_Let(self, t, e):
        b, bt = self.tc(t.bound, t.ty)
        body, ty = self.under([t.ty], t.body, e)
        return self.same(t, {"bound": b, "body": body}), ty

    def t_UnitLit(self, t, e):
        return t, UNIT

    def t_RealLit(self, t, e):
        return t, REAL

    def t_IntLit(self, t, e):
        return t, INT

    def t_Pair(self, t, e):
        ea, eb = (e.a, e.b) if isinstance(e, Prod) else (None, None)
        a, ta = self.tc(t.a, ea)
        b, tb = self.tc(t.b, eb)
        return self.same(t, {"a": a, "b": b}), Prod(ta, tb)

    def t_Fst(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, Prod):
            self.fail(t, "fst of non-product %s" % _tyname(ty))
        return self.same(t, {"t": x}), ty.a

    def t_Snd(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, Prod):
            self.fail(t, "snd of non-product %s" % _tyname(ty))
        return self.same(t, {"t": x}), ty.b

    def _inj(self, t, e, left):
        other = t.other
        if other is None:
            if not isinstance(e, Sum):
                self.fail(t, "cannot infer the other summand; annotate the injection")
            other = e.b if left else e.a
        want = None
        if isinstance(e, Sum):
            want = e.a if left else e.b
        x, ty = self.tc(t.t, want)
        res = Sum(ty, other) if left else Sum(other, ty)
        return self.same(t, {"t": x, "other": other}), res

    def t_Inl(self, t, e):
        return self._inj(t, e, True)

    def t_Inr(self, t, e):
        return self._inj(t, e, False)

    def t_Case(self, t, e):
        s, st = self.tc(t.scrut)
        if not isinstance(st, Sum):
            self.fail(t, "case on non-sum %s" % _tyname(st))
        l, lt = self.under([st.a], t.left, e)
        r, rt = self.under([st.b], t.right, lt)
        return self.same(t, {"scrut": s, "left": l, "right": r}), lt

    def t_Sign(self, t, e):
        x, _ = self.tc(t.t, REAL)
        return self.same(t, {"t": x}), BOOL

    def t_PrimOp(self, t, e):
        od = O.OPS.get(t.op)
        if od is None:
            self.fail(t, "unknown primitive %r" % t.op)
        if len(t.args) != od.arity:
            self.fail(t, "%s expects %d arguments" % (t.op, od.arity))
        args = tuple(self.tc(a, REAL)[0] for a in t.args)
        if all(a is b for a, b in zip(args, t.args)):
            return t, REAL
        return T.PrimOp(t.op, args), REAL

    def t_Lam(self, t, e):
        want = e.b if isinstance(e, Arrow) else None
        body, rt = self.under([t.ty], t.body, want)
        return self.same(t, {"body": body}), Arrow(t.ty, rt)

    def t_App(self, t, e):
        f, ft = self.tc(t.f)
        if not isinstance(ft, (Arrow, ClosedArrow)):
            self.fail(t, "application of non-function %s" % _tyname(ft))
        a, _ = self.tc(t.a, ft.a)
        return self.same(t, {"f": f, "a": a}), ft.b

    def t_Build(self, t, e):
        n, _ = self.tc(t.n, INT)
        want = e.a if isinstance(e, Array) else None
        body, bt = self.under([INT], t.body, want)
        return self.same(t, {"n": n, "body": body}), Array(bt)

    def t_Index(self, t, e):
        a, at = self.tc(t.arr)
        if not isinstance(at, Array):
            self.fail(t, "index on non-array %s" % _tyname(at))
        i, _ = self.tc(t.idx, INT)
        return self.same(t, {"arr": a, "idx": i}), at.a

    def t_Fold(self, t, e):
        a, at = self.tc(t.arr)
        if not isinstance(at, Array):
            self.fail(t, "fold over non-array %s" % _tyname(at))
        body, bt = self.under([Prod(at.a, at.a)], t.body, at.a)
        return self.same(t, {"body": body, "arr": a}), at.a

    def t_Length(self, t, e):
        a, at = self.tc(t.arr)
        if not isinstance(at, Array):
            self.fail(t, "length of non-array %s" % _tyname(at))
        return self.same(t, {"arr": a}), INT

    # -- linear API
    def t_LZero(self, t, e):
        if not _cotangent_type(t.ty):
            self.fail(t, "zero at non-linear type %s" % _tyname(t.ty))
        return t, t.ty

    def t_LPlus(self, t, e):
        a, ta = self.tc(t.a, e)
        b, tb = self.tc(t.b, ta)
        if not _cotangent_type(ta):
            self.fail(t, "plus at non-linear type %s" % _tyname(ta))
        return self.same(t, {"a": a, "b": b}), ta

    def t_LPairC(self, t, e):
        a, ta = self.tc(t.a)
        b, tb = self.tc(t.b)
        return self.same(t, {"a": a, "b": b}), LProd(ta, tb)

    def _lproj(self, t, first):
        if not isinstance(t.ty, LProd):
            self.fail(t, "projection annotation must be LProd")
        x, _ = self.tc(t.t, t.ty)
        return self.same(t, {"t": x}), (t.ty.a if first else t.ty.b)

    def t_LFst(self, t, e):
        return self._lproj(t, True)

    def t_LSnd(self, t, e):
        return self._lproj(t, False)

    def _linj(self, t, left):
        if not isinstance(t.ty, LSum):
            self.fail(t, "injection annotation must be LSum")
        x, _ = self.tc(t.t, t.ty.a if left else t.ty.b)
        return self.same(t, {"t": x}), t.ty

    def t_LInl(self, t, e):
        return self._linj(t, True)

    def t_LInr(self, t, e):
        return self._linj(t, False)

    def _lcast(self, t, left):
        if not isinstance(t.ty, LSum):
            self.fail(t, "cast annotation must be LSum")
        x, _ = self.tc(t.t, t.ty)
        return self.same(t, {"t": x}), (t.ty.a if left else t.ty.b)

    def t_LCastL(self, t, e):
        return self._lcast(t, True)

    def t_LCastR(self, t, e):
        return self._lcast(t, False)

    def t_DOpT(self, t, e):
        od = O.OPS.get(t.op)
        if od is None or len(t.primals) != od.arity:
            self.fail(t, "bad transposed primitive")
        d, _ = self.tc(t.d, LREAL)
        ps = tuple(self.tc(p, REAL)[0] for p in t.primals)
        res = LREAL if od.arity == 1 else prod_of([LREAL] * od.arity)
        if d is t.d and all(a is b for a, b in zip(ps, t.primals)):
            return t, res
        return T.DOpT(t.op, d, ps), res

    # -- monad
    def _evm(self, t, ty):
        if not isinstance(ty, EvmTy):
            self.fail(t, "expected a monadic action, got %s" % _tyname(ty))
        return ty

    def t_EvmReturn(self, t, e):
        x, ty = self.tc(t.t)
        return self.same(t, {"t": x}), EvmTy(t.ctx, ty)

    def t_EvmBind(self, t, e):
        m, mt = self.tc(t.m)
        mt = self._evm(t, mt)
        k, kt = self.tc(t.k)
        if not isinstance(kt, Arrow) or kt.a != mt.a:
            self.fail(t, "bind continuation has type %s" % _tyname(kt))
        rt = self._evm(t, kt.b)
        if rt.ctx != mt.ctx:
            self.fail(t, "bind across different contexts")
        return self.same(t, {"m": m, "k": k}), rt

    def t_EvmSeq(self, t, e):
        a, at = self.tc(t.a)
        at = self._evm(t, at)
        b, bt = self.tc(t.b)
        bt = self._evm(t, bt)
        if at.ctx != bt.ctx:
            self.fail(t, "seq across different contexts")
        return self.same(t, {"a": a, "b": b}), bt

    def t_EvmOne(self, t, e):
        if not (0 <= t.level < len(t.ctx)):
            self.fail(t, "one: level out of range")
        d, _ = self.tc(t.d, t.ctx[t.level])
        return self.same(t, {"d": d}), EvmTy(t.ctx, UNIT)

    def t_EvmScope(self, t, e):
        m, mt = self.tc(t.m)
        mt = self._evm(t, mt)
        if len(mt.ctx) == 0 or mt.ctx.top() != t.ty:
            self.fail(t, "scope: inner context must end in %s" % _tyname(t.ty))
        return self.same(t, {"m": m}), EvmTy(mt.ctx.pop(), Prod(mt.a, t.ty))

    def t_EvmRun(self, t, e):
        m, mt = self.tc(t.m)
        mt = self._evm(t, mt)
        if mt.ctx != t.ctx:
            self.fail(t, "run: context annotation mismatch")
        env, _ = self.tc(t.env, EnvTy(t.ctx))
        return self.same(t, {"m": m, "env": env}), Prod(mt.a, EnvTy(t.ctx))

    # -- environment cotangents
    def t_EnvZero(self, t, e):
        return t, EnvTy(t.ctx)

    def t_EnvOne(self, t, e):
        if not (0 <= t.level < len(t.ctx)):
            self.fail(t, "envone: level out of range")
        d, _ = self.tc(t.d, t.ctx[t.level])
        return self.same(t, {"d": d}), EnvTy(t.ctx)

    def t_EnvPlus(self, t, e):
        a, at = self.tc(t.a, e)
        if not isinstance(at, EnvTy):
            self.fail(t, "envplus of non-environment")
        b, _ = self.tc(t.b, at)
        return self.same(t, {"a": a, "b": b}), at

    def t_EnvSplit(self, t, e):
        if len(t.ctx) == 0:
            self.fail(t, "envsplit of empty context")
        x, _ = self.tc(t.e, EnvTy(t.ctx))
        return self.same(t, {"e": x}), Prod(EnvTy(t.ctx.pop()), t.ctx.top())

    # -- arrays
    def t_BagOne(self, t, e):
        i, _ = self.tc(t.i, INT)
        d, dt = self.tc(t.d)
        return self.same(t, {"i": i, "d": d}), Bag(Prod(INT, dt))

    def t_Collect(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, Bag):
            self.fail(t, "collect of non-bag")
        return self.same(t, {"t": x}), Array(ty.a)

    def t_Scatter(self, t, e):
        i, it = self.tc(t.init)
        if not isinstance(it, Array):
            self.fail(t, "scatter onto non-array")
        p, _ = self.tc(t.pairs, Array(Prod(INT, it.a)))
        return self.same(t, {"init": i, "pairs": p}), it

    def t_Unzip(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, Array) or not isinstance(ty.a, Prod):
            self.fail(t, "unzip of non-array-of-pairs")
        return self.same(t, {"t": x}), Prod(Array(ty.a.a), Array(ty.a.b))

    def t_ZipWith(self, t, e):
        a, at = self.tc(t.a)
        b, bt = self.tc(t.b)
        if not isinstance(at, Array) or not isinstance(bt, Array):
            self.fail(t, "zipwith of non-arrays")
        body, rt = self.under([at.a, bt.a], t.body)
        return self.same(t, {"a": a, "b": b, "body": body}), Array(rt)

    def t_FromList(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, ListTy):
            self.fail(t, "fromlist of non-list")
        return self.same(t, {"t": x}), Bag(Prod(INT, ty.a))

    def t_SequenceEvm(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, Array) or not isinstance(ty.a, EvmTy) or ty.a.ctx != t.ctx:
            self.fail(t, "sequence of non-action array")
        return self.same(t, {"t": x}), EvmTy(t.ctx, Array(ty.a.a))

    def t_MapArr(self, t, e):
        a, at = self.tc(t.arr)
        if not isinstance(at, Array):
            self.fail(t, "map over non-array")
        body, rt = self.under([at.a], t.body)
        return self.same(t, {"arr": a, "body": body}), Array(rt)

    def t_TreeLeaf(self, t, e):
        x, ty = self.tc(t.t)
        return self.same(t, {"t": x}), TreeTy(ty, t.fty)

    def t_TreeNode(self, t, e):
        l, lt = self.tc(t.l)
        if not isinstance(lt, TreeTy):
            self.fail(t, "node child is not a tree")
        x, _ = self.tc(t.x, lt.a)
        f, _ = self.tc(t.f, lt.f)
        r, _ = self.tc(t.r, lt)
        return self.same(t, {"l": l, "x": x, "f": f, "r": r}), lt

    def t_GetA(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, TreeTy):
            self.fail(t, "geta of non-tree")
        return self.same(t, {"t": x}), ty.a

    def t_UnTree(self, t, e):
        tr, tt = self.tc(t.tree)
        if not isinstance(tt, TreeTy):
            self.fail(t, "untree of non-tree")
        d, dt = self.tc(t.d)
        g, gt = self.tc(t.g)
        ok = (isinstance(gt, Arrow) and gt.a == dt and isinstance(gt.b, Arrow) and gt.b.a == tt.f
              and isinstance(gt.b.b, EvmTy) and gt.b.b.a == Prod(dt, dt))
        if not ok:
            self.fail(t, "untree: bad reverse step type %s" % _tyname(gt))
        return self.same(t, {"g": g, "d": d, "tree": tr}), EvmTy(gt.b.b.ctx, ListTy(dt))

    # -- lists
    def t_ListNil(self, t, e):
        return t, ListTy(t.ty)

    def t_ListCons(self, t, e):
        h, ht = self.tc(t.h)
        tl, _ = self.tc(t.t, ListTy(ht))
        return self.same(t, {"h": h, "t": tl}), ListTy(ht)

    def t_ListAppend(self, t, e):
        a, at = self.tc(t.a, e)
        if not isinstance(at, ListTy):
            self.fail(t, "append of non-list")
        b, _ = self.tc(t.b, at)
        return self.same(t, {"a": a, "b": b}), at

    def t_FoldList(self, t, e):
        lst, lt = self.tc(t.lst)
        if not isinstance(lt, ListTy):
            self.fail(t, "foldlist over non-list")
        init, it = self.tc(t.init, e)
        body, _ = self.under([lt.a, it], t.body, it)
        return self.same(t, {"lst": lst, "init": init, "body": body}), it

    # -- closures
    def t_Pack(self, t, e):
        if not isinstance(t.sig, SigmaTag):
            self.fail(t, "pack annotation must be a Sigma type")
        x, _ = self.tc(t.t, subst_hole(t.sig.body, t.tag))
        return self.same(t, {"t": x}), t.sig

    def t_UnpackCase(self, t, e):
        s, st = self.tc(t.scrut)
        if not isinstance(st, SigmaTag):
            self.fail(t, "unpack of non-Sigma %s" % _tyname(st))
        body, bt = self.under([st.body], t.body, e)
        return self.same(t, {"scrut": s, "body": body}), bt

    def t_ClosedLam(self, t, e):
        want = e.b if isinstance(e, ClosedArrow) else None
        body, rt = self.closed([t.ty], t.body, want)
        return self.same(t, {"body": body}), ClosedArrow(t.ty, rt)

    def t_LPackDyn(self, t, e):
        if not isinstance(t.sty, LSigma):
            self.fail(t, "lpack annotation must be LSigma")
        s, st = self.tc(t.src)
        if not isinstance(st, SigmaTag):
            self.fail(t, "lpack tag source is not a pack")
        x, _ = self.tc(t.t, t.sty.body)
        return self.same(t, {"src": s, "t": x}), t.sty

    def t_LCastSig(self, t, e):
        x, ty = self.tc(t.t)
        if not isinstance(ty, LSigma):
            self.fail(t, "cast out of non-LSigma %s" % _tyname(ty))
        return self.same(t, {"t": x}), t.zty


@deep
def typecheck(ctx, t: T.Term) -> Ty:
    ctx = ctx.to_list() if isinstance(ctx, Ctx) else list(ctx)
    return _Checker(ctx).tc(t)[1]


@deep
def elaborate(ctx, t: T.Term, expected: Optional[Ty] = None) -> Tuple[T.Term, Ty]:
    ctx = ctx.to_list() if isinstance(ctx, Ctx) else list(ctx)
    return _Checker(ctx).tc(t, expected)
