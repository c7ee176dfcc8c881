"""Independent differentiation oracles: forward mode with dual numbers, and
central finite differences.  Both work on source programs directly (higher
order included) and return dense gradients in the leaf order used by
cotangent.densify."""
from __future__ import annotations

import math
from typing import Callable, List, Optional, Sequence

from . import cotangent as C
from ._deep import call_deep
from .errors import EmptyFold, IndexOutOfBounds, PartialOp, UserError
from .evaluator import evaluate
from .lang import terms as T
from .lang.types import INT, REAL, UNIT, Array, Arrow, Prod, Sum, Ty
from .ops import apply_op, get_op
from .values import NEG, NONNEG, VInl, VInr


class Dual:
    __slots__ = ("p", "t")

    def __init__(self, p: float, t: float = 0.0):
        self.p = p
        self.t = t

    def __repr__(self):
        return "Dual(%r, %r)" % (self.p, self.t)


def _d_add(x, y):
    return Dual(x.p + y.p, x.t + y.t)


def _d_sub(x, y):
    return Dual(x.p - y.p, x.t - y.t)


def _d_mul(x, y):
    return Dual(x.p * y.p, x.t * y.p + x.p * y.t)


def _d_neg(x):
    return Dual(-x.p, -x.t)


def _d_recip(x):
    r = apply_op(get_op("recip"), [x.p])
    return Dual(r, -x.t * r * r)


def _d_sin(x):
    return Dual(apply_op(get_op("sin"), [x.p]), x.t * math.cos(x.p))


def _d_cos(x):
    return Dual(apply_op(get_op("cos"), [x.p]), -x.t * math.sin(x.p))


def _d_exp(x):
    e = apply_op(get_op("exp"), [x.p])
    return Dual(e, x.t * e)


def _d_log(x):
    return Dual(apply_op(get_op("log"), [x.p]), x.t / x.p)


DUAL_OPS = {"add": _d_add, "sub": _d_sub, "mul": _d_mul, "neg": _d_neg, "recip": _d_recip,
            "sin": _d_sin, "cos": _d_cos, "exp": _d_exp, "log": _d_log}


def forward_eval(t: T.Term, env: list):
    """Evaluate a source term over dual numbers."""
    return call_deep(_fwd, t, list(env))


def _fwd(t, env):
    c = type(t)
    if c is T.Var:
        return env[t.level]
    if c is T.Let:
        env.append(_fwd(t.bound, env))
        try:
            return _fwd(t.body, env)
        finally:
            env.pop()
    if c is T.RealLit:
        return Dual(t.value)
    if c is T.IntLit:
        return t.value
    if c is T.UnitLit:
        return None
    if c is T.Pair:
        return (_fwd(t.a, env), _fwd(t.b, env))
    if c is T.Fst:
        return _fwd(t.t, env)[0]
    if c is T.Snd:
        return _fwd(t.t, env)[1]
    if c is T.Inl:
        return VInl(_fwd(t.t, env))
    if c is T.Inr:
        return VInr(_fwd(t.t, env))
    if c is T.Case:
        s = _fwd(t.scrut, env)
        env.append(s.x)
        try:
            return _fwd(t.left if type(s) is VInl else t.right, env)
        finally:
            env.pop()
    if c is T.Sign:
        return NEG if _fwd(t.t, env).p < 0 else NONNEG
    if c is T.PrimOp:
        return DUAL_OPS[t.op](*[_fwd(a, env) for a in t.args])
    if c is T.Lam:
        saved = list(env)

        def fn(x):
            saved.append(x)
            try:
                return _fwd(t.body, saved)
            finally:
                saved.pop()
        return fn
    if c is T.App:
        f = _fwd(t.f, env)
        return f(_fwd(t.a, env))
    if c is T.Build:
        n = _fwd(t.n, env)
        out = []
        for i in range(max(n, 0)):
            env.append(i)
            try:
                out.append(_fwd(t.body, env))
            finally:
                env.pop()
        return out
    if c is T.Index:
        xs = _fwd(t.arr, env)
        i = _fwd(t.idx, env)
        if not 0 <= i < len(xs):
            raise IndexOutOfBounds("index %d out of bounds for length %d" % (i, len(xs)))
        return xs[i]
    if c is T.Length:
        return len(_fwd(t.arr, env))
    if c is T.Fold:
        xs = _fwd(t.arr, env)
        if not xs:
            raise EmptyFold("fold over an empty array")
        while len(xs) > 1:
            nxt = []
            for i in range(0, len(xs) - 1, 2):
                env.append((xs[i], xs[i + 1]))
                try:
                    nxt.append(_fwd(t.body, env))
                finally:
                    env.pop()
            if len(xs) % 2:
                nxt.append(xs[-1])
            xs = nxt
        return xs[0]
    raise TypeError("forward oracle does not handle %s" % c.__name__)


# ---- dense layout of primal values ------------------------------------------------------

def slots(ty: Ty, v) -> List[Optional[list]]:
    """For each dense slot, the path to the real leaf it stands for, or None
    for slots of an absent sum side."""
    out: List[Optional[list]] = []
    _slots(ty, v, [], out)
    return out


def _width(ty):
    if ty is REAL:
        return 1
    if ty is INT or ty is UNIT:
        return 0
    if isinstance(ty, (Prod, Sum)):
        return _width(ty.a) + _width(ty.b)
    raise ValueError("no fixed dense width for %r" % (ty,))


def _slots(ty, v, path, out):
    if ty is REAL:
        out.append(list(path))
    elif ty is INT or ty is UNIT:
        return
    elif isinstance(ty, Prod):
        _slots(ty.a, v[0], path + [0], out)
        _slots(ty.b, v[1], path + [1], out)
    elif isinstance(ty, Sum):
        if type(v) is VInl:
            _slots(ty.a, v.x, path + ["x"], out)
            out.extend([None] * _width(ty.b))
        else:
            out.extend([None] * _width(ty.a))
            _slots(ty.b, v.x, path + ["x"], out)
    elif isinstance(ty, Array):
        for i, x in enumerate(v):
            _slots(ty.a, x, path + [i], out)
    else:
        raise ValueError("inputs of type %r cannot be differentiated" % (ty,))


def _map_leaves(ty, v, fn, path=()):
    """Rebuild v with each real leaf replaced by fn(path, leaf)."""
    if ty is REAL:
        return fn(path, v)
    if ty is INT or ty is UNIT:
        return v
    if isinstance(ty, Prod):
        return (_map_leaves(ty.a, v[0], fn, path + (0,)), _map_leaves(ty.b, v[1], fn, path + (1,)))
    if isinstance(ty, Sum):
        if type(v) is VInl:
            return VInl(_map_leaves(ty.a, v.x, fn, path + ("x",)))
        return VInr(_map_leaves(ty.b, v.x, fn, path + ("x",)))
    if isinstance(ty, Array):
        return [_map_leaves(ty.a, x, fn, path + (i,)) for i, x in enumerate(v)]
    raise ValueError("inputs of type %r cannot be differentiated" % (ty,))


def _all_slots(ctx, point):
    out = []
    for k, (ty, v) in enumerate(zip(ctx, point)):
        for s in slots(ty, v):
            out.append(None if s is None else (k, tuple(s)))
    return out


def _dense_out(ty, v) -> List[float]:
    """Dense vector of a value in the output type's leaf order (reals only)."""
    out: List[float] = []

    def go(ty, v):
        if ty is REAL:
            out.append(v)
        elif ty is INT or ty is UNIT:
            pass
        elif isinstance(ty, Prod):
            go(ty.a, v[0])
            go(ty.b, v[1])
        elif isinstance(ty, Sum):
            if type(v) is VInl:
                go(ty.a, v.x)
                out.extend([0.0] * _width(ty.b))
            else:
                out.extend([0.0] * _width(ty.a))
                go(ty.b, v.x)
        elif isinstance(ty, Array):
            for x in v:
                go(ty.a, x)
        else:
            raise ValueError("outputs of type %r cannot be differentiated" % (ty,))
    go(ty, v)
    return out


def _seed_vector(out_ty: Ty, seed, out_value) -> List[float]:
    from .chad.transform import d2_type
    if out_ty is REAL:
        return [float(seed)]
    return C.densify(d2_type(out_ty), seed, like=_like(out_ty, out_value))


def _like(ty, v):
    # densify only needs the primal to size arrays
    if isinstance(ty, Array):
        return v
    if isinstance(ty, Prod):
        return (_like(ty.a, v[0]), _like(ty.b, v[1]))
    return None


def jvp(ctx: Sequence[Ty], t: T.Term, point: Sequence, direction: Sequence[float]):
    """Forward-mode directional derivative; returns (primal, output tangent)."""
    slots_ = _all_slots(ctx, point)
    dirs = {}
    for s, d in zip(slots_, direction):
        if s is not None:
            dirs[s] = d
    env = [
        _map_leaves(ty, v, lambda path, x, k=k: Dual(float(x), dirs.get((k, path), 0.0)))
        for k, (ty, v) in enumerate(zip(ctx, point))
    ]
    return forward_eval(t, env)


def _strip(v, part):
    if type(v) is Dual:
        return v.p if part == "p" else v.t
    if type(v) is tuple:
        return tuple(_strip(x, part) for x in v)
    if type(v) is list:
        return [_strip(x, part) for x in v]
    if type(v) is VInl:
        return VInl(_strip(v.x, part))
    if type(v) is VInr:
        return VInr(_strip(v.x, part))
    return v


def grad_forward(ctx: Sequence[Ty], t: T.Term, point: Sequence, seed=1.0,
                 out_ty: Optional[Ty] = None) -> List[float]:
    """Dense gradient by one forward pass per input slot."""
    from .lang.typecheck import typecheck
    out_ty = out_ty or typecheck(list(ctx), t)
    slots_ = _all_slots(ctx, point)
    grads = []
    sv = None
    for j, s in enumerate(slots_):
        if s is None:
            grads.append(0.0)
            continue
        e = [0.0] * len(slots_)
        e[j] = 1.0
        res = jvp(ctx, t, point, e)
        if sv is None:
            sv = _seed_vector(out_ty, seed, _strip(res, "p"))
        tan = _dense_out(out_ty, _strip(res, "t"))
        grads.append(math.fsum(a * b for a, b in zip(sv, tan)))
    return grads


def grad_fd(ctx: Sequence[Ty], t: T.Term, point: Sequence, seed=1.0,
            out_ty: Optional[Ty] = None, rel_h: float = 1e-6) -> List[float]:
    """Central finite differences with h = rel_h * max(1, |x|) per input slot."""
    from .lang.typecheck import typecheck
    out_ty = out_ty or typecheck(list(ctx), t)
    slots_ = _all_slots(ctx, point)
    base, _ = evaluate(t, list(point))
    sv = _seed_vector(out_ty, seed, base)
    grads = []
    for s in slots_:
        if s is None:
            grads.append(0.0)
            continue
        k, path = s
        x0 = _get(point[k], path)
        h = rel_h * max(1.0, abs(x0))

        def shifted(delta):
            pt = list(point)
            pt[k] = _map_leaves(ctx[k], point[k],
                                lambda p, x: x + delta if p == path else x)
            v, _ = evaluate(t, pt)
            return _dense_out(out_ty, v)
        hi, lo = shifted(h), shifted(-h)
        grads.append(math.fsum(w * (a - b) for w, a, b in zip(sv, hi, lo)) / (2 * h))
    return grads


def _get(v, path):
    for p in path:
        v = v.x if p == "x" else v[p]
    return v


def relative_error(a: Sequence[float], b: Sequence[float]) -> float:
    """max|a - b| / max(1, max|b|)."""
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    diff = max(abs(x - y) for x, y in zip(a, b))
    scale = max(1.0, max(abs(y) for y in b))
    return diff / scale


def random_point(types: Sequence[Ty], rng, length: int = 4) -> list:
    """In-domain inputs: reals uniform in [0.5, 1.5], ints in [1, length]."""
    def go(ty):
        if ty is REAL:
            return rng.uniform(0.5, 1.5)
        if ty is INT:
            return rng.randint(1, length)
        if ty is UNIT:
            return None
        if isinstance(ty, Prod):
            return (go(ty.a), go(ty.b))
        if isinstance(ty, Sum):
            return VInl(go(ty.a)) if rng.random() < 0.5 else VInr(go(ty.b))
        if isinstance(ty, Array):
            return [go(ty.a) for _ in range(length)]
        raise UserError("cannot sample inputs of type %r" % (ty,))
    return [go(t) for t in types]
