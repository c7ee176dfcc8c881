"""Cost-instrumented call-by-value evaluator.

Terms are compiled to Python closures over a frame (a list: captured
values, then the argument, then locals pushed by binders).  Every closure
adds its tabled step count to a shared Meter.  The table is the one in the
README; the short version: constant-time constructs cost 1 plus their
children, linear-time ones cost their size.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import cotangent as C
from . import envmap as EM
from . import evm
from ._deep import deep
from .cotangent import Meter
from .errors import CotangentMismatch, EmptyFold, EvalError, IndexOutOfBounds
from .lang import terms as T
from .lang.scope import free_levels
from .ops import OPS
from .values import NEG, NONNEG, Closure, TLeaf, TNode, VInl, VInr, VPack

Code = Callable[[list], object]


class _Scope:
    __slots__ = ("base", "caps", "ncap", "depth")

    def __init__(self, base, caps, depth):
        self.base = base
        self.caps = caps
        self.ncap = len(caps)
        self.depth = depth

    def index(self, level):
        if level < self.base:
            i = self.caps.get(level)
            if i is None:
                raise EvalError("variable level %d not captured" % level)
            return i
        return self.ncap + level - self.base

    def bind(self, k=1):
        return _Scope(self.base, self.caps, self.depth + k)


def apply(m: Meter, f, a):
    """Apply a closure value: 1 + cost of the body."""
    m.n += 1
    fr = list(f.caps)
    fr.append(a)
    return f.code(fr)


def _dense_cost(d) -> int:
    return C.size(d)


class Compiler:
    def __init__(self, meter: Meter):
        self.m = meter

    def compile(self, t: T.Term, sc: _Scope) -> Code:
        meth = getattr(self, "c_" + type(t).__name__)
        return meth(t, sc)

    # ---- source ------------------------------------------------------------

    def c_Var(self, t, sc):
        m = self.m
        i = sc.index(t.level)

        def var(fr):
            m.n += 1
            return fr[i]
        return var

    def c_RealLit(self, t, sc):
        m, v = self.m, float(t.value)

        def lit(fr):
            m.n += 1
            return v
        return lit

    def c_IntLit(self, t, sc):
        m, v = self.m, int(t.value)

        def lit(fr):
            m.n += 1
            return v
        return lit

    def c_UnitLit(self, t, sc):
        m = self.m

        def lit(fr):
            m.n += 1
            return None
        return lit

    def c_Let(self, t, sc):
        m = self.m
        b = self.compile(t.bound, sc)
        body = self.compile(t.body, sc.bind())

        def let(fr):
            m.n += 1
            fr.append(b(fr))
            r = body(fr)
            fr.pop()
            return r
        return let

    def c_Pair(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)

        def pair(fr):
            m.n += 1
            x = a(fr)
            return (x, b(fr))
        return pair

    def c_Fst(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def fst(fr):
            m.n += 1
            return a(fr)[0]
        return fst

    def c_Snd(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def snd(fr):
            m.n += 1
            return a(fr)[1]
        return snd

    def c_Inl(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def inl(fr):
            m.n += 1
            return VInl(a(fr))
        return inl

    def c_Inr(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def inr(fr):
            m.n += 1
            return VInr(a(fr))
        return inr

    def c_Case(self, t, sc):
        m = self.m
        s = self.compile(t.scrut, sc)
        l = self.compile(t.left, sc.bind())
        r = self.compile(t.right, sc.bind())

        def case(fr):
            m.n += 1
            v = s(fr)
            fr.append(v.x)
            res = l(fr) if type(v) is VInl else r(fr)
            fr.pop()
            return res
        return case

    def c_Sign(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def sign(fr):
            m.n += 1
            return NEG if a(fr) < 0.0 else NONNEG
        return sign

    def c_PrimOp(self, t, sc):
        m = self.m
        f = OPS[t.op].primal
        args = [self.compile(x, sc) for x in t.args]
        k = 1 + len(args)
        if len(args) == 1:
            a, = args

            def op1(fr):
                m.n += k
                return f(a(fr))
            return op1
        if len(args) == 2:
            a, b = args

            def op2(fr):
                m.n += k
                x = a(fr)
                return f(x, b(fr))
            return op2

        def opn(fr):
            m.n += k
            return f(*[x(fr) for x in args])
        return opn

    def _lambda(self, t, sc, caps_levels):
        m = self.m
        caps = {lv: i for i, lv in enumerate(caps_levels)}
        inner = _Scope(sc.depth, caps, sc.depth + 1)
        body = self.compile(t.body, inner)
        idx = [sc.index(lv) for lv in caps_levels]
        return m, body, idx

    def c_Lam(self, t, sc):
        caps_levels = sorted(free_levels(t.body, sc.depth))
        m, body, idx = self._lambda(t, sc, caps_levels)

        def lam(fr):
            m.n += 1
            return Closure(body, [fr[i] for i in idx])
        return lam

    def c_ClosedLam(self, t, sc):
        m = self.m
        body = self.compile(t.body, _Scope(0, {}, 1))
        clo = Closure(body, [])

        def clam(fr):
            m.n += 1
            return clo
        return clam

    def c_App(self, t, sc):
        m = self.m
        f = self.compile(t.f, sc)
        a = self.compile(t.a, sc)

        def app(fr):
            g = f(fr)
            x = a(fr)
            m.n += 1
            nf = list(g.caps)
            nf.append(x)
            return g.code(nf)
        return app

    def c_Build(self, t, sc):
        m = self.m
        n = self.compile(t.n, sc)
        body = self.compile(t.body, sc.bind())

        def build(fr):
            k = n(fr)
            if k < 0:
                raise IndexOutOfBounds("negative build length %d" % k)
            m.n += 1 + k
            out = []
            for i in range(k):
                fr.append(i)
                out.append(body(fr))
                fr.pop()
            return out
        return build

    def c_Index(self, t, sc):
        m = self.m
        a = self.compile(t.arr, sc)
        i = self.compile(t.idx, sc)

        def index(fr):
            m.n += 1
            xs = a(fr)
            k = i(fr)
            if not 0 <= k < len(xs):
                raise IndexOutOfBounds("index %d out of bounds for length %d" % (k, len(xs)))
            return xs[k]
        return index

    def c_Fold(self, t, sc):
        m = self.m
        a = self.compile(t.arr, sc)
        body = self.compile(t.body, sc.bind())

        def fold(fr):
            xs = a(fr)
            if not xs:
                raise EmptyFold("fold over an empty array")
            m.n += 1 + len(xs)
            return reduce_pairwise(xs, fr, body)
        return fold

    def c_Length(self, t, sc):
        m = self.m
        a = self.compile(t.arr, sc)

        def length(fr):
            m.n += 1
            return len(a(fr))
        return length

    # ---- linear API -------------------------------------------------------------

    def c_LZero(self, t, sc):
        m = self.m
        if t.dense:
            z = C.dense_zero(t.ty)
            k = C.size(z)
        else:
            z = C.zero(t.ty)
            k = 1

        def lzero(fr):
            m.n += k
            return z
        return lzero

    def c_LPlus(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)
        plus = C.plus

        def lplus(fr):
            x = a(fr)
            return plus(x, b(fr), m)
        return lplus

    def c_LPairC(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)

        def lpair(fr):
            m.n += 1
            x = a(fr)
            return C.CPair(x, b(fr))
        return lpair

    def _unary_lin(self, t, sc, fn):
        m = self.m
        a = self.compile(t.t, sc)

        def go(fr):
            m.n += 1
            return fn(a(fr))
        return go

    def c_LFst(self, t, sc):
        ty, dense, f = t.ty, t.dense, C.lfst
        return self._unary_lin(t, sc, lambda d: f(d, ty, dense))

    def c_LSnd(self, t, sc):
        ty, dense, f = t.ty, t.dense, C.lsnd
        return self._unary_lin(t, sc, lambda d: f(d, ty, dense))

    def c_LInl(self, t, sc):
        return self._unary_lin(t, sc, C.CInl)

    def c_LInr(self, t, sc):
        return self._unary_lin(t, sc, C.CInr)

    def c_LCastL(self, t, sc):
        ty, dense, f = t.ty, t.dense, C.lcast_l
        return self._unary_lin(t, sc, lambda d: f(d, ty, dense))

    def c_LCastR(self, t, sc):
        ty, dense, f = t.ty, t.dense, C.lcast_r
        return self._unary_lin(t, sc, lambda d: f(d, ty, dense))

    def c_DOpT(self, t, sc):
        m = self.m
        tr = OPS[t.op].transpose
        d = self.compile(t.d, sc)
        ps = [self.compile(x, sc) for x in t.primals]
        k = 1 + len(ps)

        def dopt(fr):
            m.n += k
            dv = d(fr)
            xs = [p(fr) for p in ps]
            r = tr(*xs, dv)
            if len(r) == 1:
                return r[0]
            acc = r[0]
            for x in r[1:]:
                acc = (acc, x)
            return acc
        return dopt

    # ---- monad ------------------------------------------------------------------------

    def c_EvmReturn(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def ret(fr):
            m.n += 1
            return evm.ret(a(fr))
        return ret

    def c_EvmBind(self, t, sc):
        m = self.m
        a = self.compile(t.m, sc)
        k = self.compile(t.k, sc)

        def bind(fr):
            m.n += 1
            act = a(fr)
            cont = k(fr)

            def go(st):
                v = act.go(st)
                return apply(m, cont, v).go(st)
            return evm.Action(go)
        return bind

    def c_EvmSeq(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)

        def seq(fr):
            m.n += 1
            x = a(fr)
            return evm.seq(x, b(fr))
        return seq

    def c_EvmOne(self, t, sc):
        d = self.compile(t.d, sc)
        level = t.level
        one = evm.one

        def one_(fr):
            return one(level, d(fr))
        return one_

    def c_EvmScope(self, t, sc):
        a = self.compile(t.m, sc)
        ty = t.ty
        scope = evm.scope

        def scope_(fr):
            return scope(ty, a(fr))
        return scope_

    def c_EvmRun(self, t, sc):
        m = self.m
        a = self.compile(t.m, sc)
        e = self.compile(t.env, sc)

        def run(fr):
            act = a(fr)
            env = e(fr)
            if isinstance(env, EM.EnvMap):
                env = map_to_tuple(env, t.ctx)
            return evm.run(act, env, m)
        return run

    # ---- whole-environment cotangents ------------------------------------------------

    def c_EnvZero(self, t, sc):
        m = self.m
        types = t.ctx.to_list()
        if t.repr == "dense":
            val = tuple(C.dense_zero(ty) for ty in types)
            k = 1 + sum(1 + C.size(z) for z in val)
        elif t.repr == "sparse":
            val = tuple(C.zero(ty) for ty in types)
            k = 1 + 2 * len(types)
        else:
            val = EM.EMPTY
            k = 1

        def envzero(fr):
            m.n += k
            return val
        return envzero

    def c_EnvOne(self, t, sc):
        m = self.m
        d = self.compile(t.d, sc)
        lvl = t.level
        if t.repr == "map":
            def envone_map(fr):
                m.n += 2
                return EM.singleton(lvl, d(fr))
            return envone_map
        types = t.ctx.to_list()
        zs = [C.dense_zero(ty) if t.repr == "dense" else C.zero(ty) for ty in types]
        if t.repr == "dense":
            k = 1 + sum(1 + C.size(z) for i, z in enumerate(zs) if i != lvl) + 1
        else:
            k = 1 + 2 * len(types)
        pre, post = tuple(zs[:lvl]), tuple(zs[lvl + 1:])

        def envone(fr):
            m.n += k
            return pre + (d(fr),) + post
        return envone

    def c_EnvPlus(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)
        plus = C.plus

        def envplus(fr):
            m.n += 1
            x = a(fr)
            y = b(fr)
            if type(x) is tuple:
                return tuple([plus(p, q, m) for p, q in zip(x, y)])
            return EM.union(x, y, m)
        return envplus

    def c_EnvSplit(self, t, sc):
        m = self.m
        e = self.compile(t.e, sc)
        top = len(t.ctx) - 1
        tty = t.ctx.top()
        zero = C.zero(tty)

        def envsplit(fr):
            m.n += 1
            x = e(fr)
            if type(x) is tuple:
                return (x[:-1], x[-1])
            rest, v = EM.delete(x, top, m)
            return (rest, zero if v is None else v)
        return envsplit

    # ---- arrays --------------------------------------------------------------------------

    def c_BagOne(self, t, sc):
        m = self.m
        i = self.compile(t.i, sc)
        d = self.compile(t.d, sc)

        def bagone(fr):
            m.n += 1
            k = i(fr)
            return C.CBagOne(k, d(fr))
        return bagone

    def c_Collect(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def collect(fr):
            b = a(fr)
            m.n += 1 + C.bag_nodes(b)
            return [x for x in C.bag_items(b)]
        return collect

    def c_Scatter(self, t, sc):
        m = self.m
        a = self.compile(t.init, sc)
        p = self.compile(t.pairs, sc)
        plus = C.plus

        def scatter(fr):
            acc = list(a(fr))
            pairs = p(fr)
            m.n += 1 + len(acc) + len(pairs)
            n = len(acc)
            for i, d in pairs:
                if not 0 <= i < n:
                    raise IndexOutOfBounds("scatter index %d out of bounds" % i)
                acc[i] = plus(acc[i], d, m)
            return acc
        return scatter

    def c_Unzip(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def unzip(fr):
            xs = a(fr)
            m.n += 1 + len(xs)
            return ([x[0] for x in xs], [x[1] for x in xs])
        return unzip

    def c_ZipWith(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)
        body = self.compile(t.body, sc.bind(2))

        def zipwith(fr):
            xs = a(fr)
            ys = b(fr)
            if len(xs) != len(ys):
                raise IndexOutOfBounds("zipwith of arrays of different lengths")
            m.n += 1 + len(xs)
            out = []
            for x, y in zip(xs, ys):
                fr.append(x)
                fr.append(y)
                out.append(body(fr))
                fr.pop()
                fr.pop()
            return out
        return zipwith

    def c_FromList(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def fromlist(fr):
            items = a(fr).items
            m.n += 1 + len(items)
            acc = C.BAG_EMPTY
            for i, d in enumerate(items):
                one = C.CBagOne(i, d)
                acc = one if acc is C.BAG_EMPTY else C.CBagPlus(acc, one)
            return acc
        return fromlist

    def c_SequenceEvm(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)

        def sequence(fr):
            m.n += 1
            acts = a(fr)

            def go(st):
                m.n += len(acts)
                return [x.go(st) for x in acts]
            return evm.Action(go)
        return sequence

    def c_MapArr(self, t, sc):
        m = self.m
        a = self.compile(t.arr, sc)
        body = self.compile(t.body, sc.bind())

        def maparr(fr):
            xs = a(fr)
            m.n += 1 + len(xs)
            out = []
            for x in xs:
                fr.append(x)
                out.append(body(fr))
                fr.pop()
            return out
        return maparr

    def c_TreeLeaf(self, t, sc):
        return self._unary_lin(t, sc, TLeaf)

    def c_TreeNode(self, t, sc):
        m = self.m
        l, x, f, r = (self.compile(getattr(t, k), sc) for k in "lxfr")

        def node(fr):
            m.n += 1
            lv = l(fr)
            xv = x(fr)
            fv = f(fr)
            return TNode(lv, xv, fv, r(fr))
        return node

    def c_GetA(self, t, sc):
        return self._unary_lin(t, sc, lambda tr: tr.a)

    def c_UnTree(self, t, sc):
        m = self.m
        g = self.compile(t.g, sc)
        d = self.compile(t.d, sc)
        tree = self.compile(t.tree, sc)

        def untree(fr):
            m.n += 1
            gv = g(fr)
            dv = d(fr)
            tv = tree(fr)

            def go(st):
                out = []

                def walk(node, dd):
                    m.n += 1
                    if type(node) is TLeaf:
                        out.append(dd)
                        return
                    act = apply(m, apply(m, gv, dd), node.f)
                    d1, d2 = act.go(st)
                    walk(node.l, d1)
                    walk(node.r, d2)
                walk(tv, dv)
                return C.CList(out)
            return evm.Action(go)
        return untree

    # ---- lists -------------------------------------------------------------------------------

    def c_ListNil(self, t, sc):
        m = self.m

        def nil(fr):
            m.n += 1
            return C.CLIST_NIL
        return nil

    def c_ListCons(self, t, sc):
        m = self.m
        h = self.compile(t.h, sc)
        tl = self.compile(t.t, sc)

        def cons(fr):
            m.n += 1
            x = h(fr)
            return C.CList((x,) + tl(fr).items)
        return cons

    def c_ListAppend(self, t, sc):
        m = self.m
        a = self.compile(t.a, sc)
        b = self.compile(t.b, sc)

        def append(fr):
            x = a(fr)
            y = b(fr)
            m.n += 1 + len(x.items)
            return C.CList(x.items + y.items)
        return append

    def c_FoldList(self, t, sc):
        m = self.m
        init = self.compile(t.init, sc)
        lst = self.compile(t.lst, sc)
        body = self.compile(t.body, sc.bind(2))

        def foldlist(fr):
            acc = init(fr)
            items = lst(fr).items
            m.n += 1 + len(items)
            for z in reversed(items):
                fr.append(z)
                fr.append(acc)
                acc = body(fr)
                fr.pop()
                fr.pop()
            return acc
        return foldlist

    # ---- closures -----------------------------------------------------------------------

    def c_Pack(self, t, sc):
        m = self.m
        a = self.compile(t.t, sc)
        tag = t.tag

        def pack(fr):
            m.n += 1
            return VPack(tag, a(fr))
        return pack

    def c_UnpackCase(self, t, sc):
        m = self.m
        s = self.compile(t.scrut, sc)
        body = self.compile(t.body, sc.bind())

        def unpack(fr):
            m.n += 1
            fr.append(s(fr).x)
            r = body(fr)
            fr.pop()
            return r
        return unpack

    def c_LPackDyn(self, t, sc):
        m = self.m
        src = self.compile(t.src, sc)
        a = self.compile(t.t, sc)

        def lpack(fr):
            m.n += 1
            p = src(fr)
            return C.CSig(p.tag, a(fr))
        return lpack

    def c_LCastSig(self, t, sc):
        tag, zty, f = t.tag, t.zty, C.lcast_sig
        return self._unary_lin(t, sc, lambda d: f(tag, d, zty))


def reduce_pairwise(xs, fr, body):
    """Balanced left-to-right pairwise reduction used by fold."""
    while len(xs) > 1:
        nxt = []
        for i in range(0, len(xs) - 1, 2):
            fr.append((xs[i], xs[i + 1]))
            nxt.append(body(fr))
            fr.pop()
        if len(xs) % 2:
            nxt.append(xs[-1])
        xs = nxt
    return xs[0]


def map_to_tuple(mp: EM.EnvMap, ctx) -> tuple:
    types = ctx.to_list()
    vals = [C.zero(ty) for ty in types]
    for k, v in mp.items():
        vals[k] = v
    return tuple(vals)


def compile_term(t: T.Term, depth: int, meter: Meter) -> Code:
    return Compiler(meter).compile(t, _Scope(0, {}, depth))


@deep
def evaluate(t: T.Term, env: Sequence, meter: Optional[Meter] = None) -> Tuple[object, int]:
    """Evaluate t with env[i] bound to level i; returns (value, cost)."""
    m = meter if meter is not None else Meter()
    start = m.n
    code = compile_term(t, len(env), m)
    v = code(list(env))
    return v, m.n - start
