"""JSON encodings of points, seeds and gradients.

Points: Real is a number, Int an integer, Unit contributes nothing, a
product is the flat list of its components' encodings in leaf order, an
array is a JSON array of element encodings, and a sum value is
{"inl": v} or {"inr": v}.

Seeds and gradients use the dense leaf order of cotangent.densify: a
number for Real, otherwise a flat list of numbers.
"""
from __future__ import annotations

import json
import math
from typing import Dict, List, Sequence, Union

from . import cotangent as C
from .errors import UserError
from .lang.types import INT, LREAL, LUNIT, REAL, UNIT, Array, Bag, LProd, LSum, Prod, Sum, Ty
from .values import VInl, VInr


class JsonInputError(UserError):
    pass


def _flat_items(ty):
    """Leaf types of a product, in order (products flattened, units dropped)."""
    if isinstance(ty, Prod):
        return _flat_items(ty.a) + _flat_items(ty.b)
    if ty is UNIT:
        return []
    return [ty]


def decode_value(ty: Ty, j):
    if ty is REAL:
        if isinstance(j, bool) or not isinstance(j, (int, float)):
            raise JsonInputError("expected a number for Real, got %r" % (j,))
        return float(j)
    if ty is INT:
        if isinstance(j, bool) or not isinstance(j, int):
            raise JsonInputError("expected an integer for Int, got %r" % (j,))
        return j
    if ty is UNIT:
        return None
    if isinstance(ty, Prod):
        items = _flat_items(ty)
        if len(items) == 1 and not isinstance(j, list):
            j = [j]
        if not isinstance(j, list) or len(j) != len(items):
            raise JsonInputError("expected a list of %d items for %r" % (len(items), ty))
        it = iter(j)
        return _rebuild_prod(ty, it)
    if isinstance(ty, Sum):
        if isinstance(j, dict) and len(j) == 1 and "inl" in j:
            return VInl(decode_value(ty.a, j["inl"]))
        if isinstance(j, dict) and len(j) == 1 and "inr" in j:
            return VInr(decode_value(ty.b, j["inr"]))
        raise JsonInputError('expected {"inl": v} or {"inr": v} for %r' % (ty,))
    if isinstance(ty, Array):
        if not isinstance(j, list):
            raise JsonInputError("expected a JSON array for %r" % (ty,))
        return [decode_value(ty.a, x) for x in j]
    raise JsonInputError("inputs of type %r are not supported" % (ty,))


def _rebuild_prod(ty, it):
    if isinstance(ty, Prod):
        a = _rebuild_prod(ty.a, it)
        b = _rebuild_prod(ty.b, it)
        return (a, b)
    if ty is UNIT:
        return None
    return decode_value(ty, next(it))


def encode_value(ty: Ty, v):
    if ty is REAL:
        return _num(v)
    if ty is INT:
        return v
    if ty is UNIT:
        return None
    if isinstance(ty, Prod):
        out: list = []
        _flatten_prod(ty, v, out)
        return out
    if isinstance(ty, Sum):
        return {"inl": encode_value(ty.a, v.x)} if type(v) is VInl else {"inr": encode_value(ty.b, v.x)}
    if isinstance(ty, Array):
        return [encode_value(ty.a, x) for x in v]
    return repr(v)


def _flatten_prod(ty, v, out):
    if isinstance(ty, Prod):
        _flatten_prod(ty.a, v[0], out)
        _flatten_prod(ty.b, v[1], out)
    elif ty is not UNIT:
        out.append(encode_value(ty, v))


def _num(x: float):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def decode_point(names: Sequence[str], types: Sequence[Ty], j) -> list:
    """A point is a JSON object keyed by argument name, or a positional list."""
    if isinstance(j, dict):
        extra = set(j) - set(names)
        if extra:
            raise JsonInputError("unknown arguments in point: %s" % ", ".join(sorted(extra)))
        missing = [n for n in names if n not in j]
        if missing:
            raise JsonInputError("point is missing: %s" % ", ".join(missing))
        return [decode_value(t, j[n]) for n, t in zip(names, types)]
    if isinstance(j, list) and len(j) == len(names):
        return [decode_value(t, x) for t, x in zip(types, j)]
    if len(names) == 1 and not isinstance(j, (dict,)):
        return [decode_value(types[0], j)]
    raise JsonInputError("point must be an object keyed by argument names")


def parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise JsonInputError("%s is not valid JSON: %s" % (what, e)) from None


# ---- dense cotangents -------------------------------------------------------------------

def undensify(ty: Ty, vec: Sequence[float], like=None):
    """Sparse cotangent from a dense vector (inverse of densify where the
    sum side is unambiguous)."""
    it = iter(vec)
    d = _undense(ty, it, like)
    rest = list(it)
    if rest:
        raise JsonInputError("seed has %d extra entries" % len(rest))
    return d


def _take(it):
    try:
        x = next(it)
    except StopIteration:
        raise JsonInputError("seed has too few entries") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise JsonInputError("seed entries must be numbers, got %r" % (x,))
    return float(x)


def _undense(ty, it, like):
    if ty is LREAL:
        return _take(it)
    if ty is LUNIT:
        return C.CUNIT
    if isinstance(ty, LProd):
        la, lb = like if isinstance(like, tuple) else (None, None)
        return C.lpair(_undense(ty.a, it, la), _undense(ty.b, it, lb))
    if isinstance(ty, LSum):
        a = [_take(it) for _ in range(C.dense_len(ty.a))]
        b = [_take(it) for _ in range(C.dense_len(ty.b))]
        if any(b) and any(a):
            raise JsonInputError("a sum seed may be non-zero on one side only")
        if any(a):
            return C.CInl(undensify(ty.a, a))
        if any(b):
            return C.CInr(undensify(ty.b, b))
        return C.CSZERO
    if isinstance(ty, Bag):
        if like is None:
            raise JsonInputError("array seeds need the output value")
        acc = C.BAG_EMPTY
        for i, x in enumerate(like):
            d = _undense(ty.a.b, it, x)
            acc = C.plus(acc, C.CBagOne(i, d))
        return acc
    raise JsonInputError("cannot build a seed of type %r" % (ty,))


def decode_seed(out_ty: Ty, d2: Ty, j, out_value=None):
    if d2 is LREAL:
        if isinstance(j, list) and len(j) == 1:
            j = j[0]
        return _take(iter([j]))
    if not isinstance(j, list):
        j = [j]
    return undensify(d2, j, like=_like(out_ty, out_value))


def _like(ty, v):
    if isinstance(ty, Array):
        return v
    if isinstance(ty, Prod) and isinstance(v, tuple):
        return (_like(ty.a, v[0]), _like(ty.b, v[1]))
    return None


def encode_gradient(names: Sequence[str], types: Sequence[Ty], cots: Sequence, point: Sequence,
                    d2=None) -> Dict[str, Union[float, List[float]]]:
    from .chad.transform import d2_type
    d2 = d2 or d2_type
    out: Dict[str, Union[float, List[float]]] = {}
    for n, ty, d, x in zip(names, types, cots, point):
        dense = C.densify(d2(ty), d, like=x)
        out[n] = _num(dense[0]) if ty is REAL else [_num(v) for v in dense]
    return out
