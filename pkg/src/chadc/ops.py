"""Primitive real operations with their transposed derivatives."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

from .errors import PartialOp


@dataclass(frozen=True)
class OpDef:
    name: str
    arity: int
    primal: Callable[..., float]
    # (primals..., d) -> tuple of d_i
    transpose: Callable[..., Tuple[float, ...]]
    # domain predicate; None means total
    domain: Callable[..., bool] = None


def _recip(x):
    if x == 0.0:
        raise PartialOp("recip of 0")
    return 1.0 / x


def _log(x):
    if not x > 0.0:
        raise PartialOp("log of non-positive %r" % x)
    return math.log(x)


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _finite(f):
    # trig of an infinity is nan, not an exception
    def g(x):
        return f(x) if math.isfinite(x) else math.nan
    return g


_sin = _finite(math.sin)
_cos = _finite(math.cos)


def _recip_t(x, d):
    if x == 0.0:
        raise PartialOp("recip derivative at 0")
    return (-d / (x * x),)


def _log_t(x, d):
    if not x > 0.0:
        raise PartialOp("log derivative at non-positive %r" % x)
    return (d / x,)


OPS: Dict[str, OpDef] = {o.name: o for o in [
    OpDef("add", 2, lambda x, y: x + y, lambda x, y, d: (d, d)),
    OpDef("sub", 2, lambda x, y: x - y, lambda x, y, d: (d, -d)),
    OpDef("mul", 2, lambda x, y: x * y, lambda x, y, d: (d * y, d * x)),
    OpDef("neg", 1, lambda x: -x, lambda x, d: (-d,)),
    OpDef("recip", 1, _recip, _recip_t, lambda x: x != 0.0),
    OpDef("sin", 1, _sin, lambda x, d: (d * _cos(x),)),
    OpDef("cos", 1, _cos, lambda x, d: (-d * _sin(x),)),
    OpDef("exp", 1, _exp, lambda x, d: (d * _exp(x),)),
    OpDef("log", 1, _log, _log_t, lambda x: x > 0.0),
]}


def get_op(name: str) -> OpDef:
    try:
        return OPS[name]
    except KeyError:
        raise KeyError("unknown primitive %r" % name) from None


def apply_op(op: OpDef, args: Sequence[float]) -> float:
    if len(args) != op.arity:
        raise ValueError("%s expects %d arguments" % (op.name, op.arity))
    return op.primal(*args)


def apply_op_transpose(op: OpDef, primals: Sequence[float], d: float) -> Tuple[float, ...]:
    if len(primals) != op.arity:
        raise ValueError("%s expects %d arguments" % (op.name, op.arity))
    return op.transpose(*primals, d)
