"""Program families for the complexity benchmarks.

Terms are built directly with de Bruijn levels so that generating large
instances stays linear.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from ..errors import SizeOutOfRange
from ..lang import terms as T
from ..lang.types import REAL, Array, Arrow, Prod, Ty


@dataclass(frozen=True)
class FamilySpec:
    name: str
    n: int
    mode: str = "monadic"


@dataclass
class Generated:
    spec: FamilySpec
    names: List[str]
    ctx: List[Ty]
    term: T.Term
    n_inputs: int          # real leaves fed to the program


def _op(name, *args):
    return T.PrimOp(name, tuple(args))


def deep_let(n: int):
    # let a1 = 2*x in let a2 = 2*a1 in ... in a_n
    body: T.Term = T.Var(n, "a%d" % n)
    for k in range(n, 0, -1):
        body = T.Let(REAL, _op("mul", T.RealLit(2.0), T.Var(k - 1)), body, "a%d" % k)
    return ["x"], [REAL], body, 1


def fanout(n: int):
    # ((fst x + snd x) + fst x) + ... with n leaves
    x = T.Var(0, "x")
    leaf = [T.Fst(x), T.Snd(x)]
    acc: T.Term = leaf[0]
    for k in range(1, n):
        acc = _op("add", acc, leaf[k % 2])
    return ["x"], [Prod(REAL, REAL)], acc, 2


def t_magic(n: int):
    # complete binary add-tree over 2^r inputs, r = floor(log2 n)
    r = n.bit_length() - 1
    m = 1 << r
    xs: List[T.Term] = [T.Var(i, "x%d" % (i + 1)) for i in range(m)]
    while len(xs) > 1:
        xs = [_op("add", xs[i], xs[i + 1]) for i in range(0, len(xs), 2)]
    return ["x%d" % (i + 1) for i in range(m)], [REAL] * m, xs[0], m


def case_ladder(n: int):
    # y_k = case sign y_{k-1} of neg -> neg y_{k-1} | nonneg -> sin y_{k-1}
    body: T.Term = T.Var(n, "y%d" % n)
    for k in range(n, 0, -1):
        prev = T.Var(k - 1)
        step = T.Case(T.Sign(prev), _op("neg", prev), _op("sin", prev), "u", "v")
        body = T.Let(REAL, step, body, "y%d" % k)
    return ["y0"], [REAL], body, 1


def array_buildfold(n: int):
    # fold (+) over build (length xs) (i. xs[i] * xs[i])
    xs = T.Var(0, "xs")
    sq = T.Build(T.Length(xs), _op("mul", T.Index(xs, T.Var(1)), T.Index(xs, T.Var(1))), "i")
    p = T.Var(1, "p")
    return ["xs"], [Array(REAL)], T.Fold(_op("add", T.Fst(p), T.Snd(p)), sq, "p"), n


def t_n(n: int):
    # (λx_{n-1}. (… (λx_1. x_1) x_2 …)) x_{n-1}) x_n ; x_j sits at level n-j
    body: T.Term = T.Var(n - 1, "x1")
    for j in range(2, n + 1):
        lam = T.Lam(REAL, body, "x%d" % (j - 1))
        body = T.App(lam, T.Var(n - j, "x%d" % j))
    return ["x%d" % n], [REAL], body, 1


FAMILIES: Dict[str, Tuple[Callable, int, int]] = {
    "deep-let": (deep_let, 1, 1 << 16),
    "fanout": (fanout, 1, 1 << 17),
    "t_magic": (t_magic, 2, 1 << 16),
    "case-ladder": (case_ladder, 1, 1 << 16),
    "array-buildfold": (array_buildfold, 1, 10 ** 6),
    "t_n": (t_n, 1, 2048),
}

HIGHER_ORDER = ("t_n",)


def gen_family(spec: FamilySpec) -> Generated:
    try:
        fn, lo, hi = FAMILIES[spec.name]
    except KeyError:
        raise SizeOutOfRange("unknown family %r (known: %s)"
                             % (spec.name, ", ".join(FAMILIES))) from None
    if not lo <= spec.n <= hi:
        raise SizeOutOfRange("%s needs %d <= n <= %d, got %d" % (spec.name, lo, hi, spec.n))
    names, ctx, term, k = fn(spec.n)
    return Generated(spec, names, ctx, term, k)


def family_point(g: Generated, seed: int = 0) -> list:
    """Fixed pseudo-random inputs, uniform in [0.5, 1.5]."""
    rng = random.Random("%s/%d/%d" % (g.spec.name, g.spec.n, seed))
    out = []
    for ty in g.ctx:
        out.append(_random_value(ty, rng, g.n_inputs))
    return out


def _random_value(ty, rng, n):
    if ty is REAL:
        return rng.uniform(0.5, 1.5)
    if isinstance(ty, Prod):
        return (_random_value(ty.a, rng, n), _random_value(ty.b, rng, n))
    if isinstance(ty, Array):
        return [_random_value(ty.a, rng, n) for _ in range(n)]
    raise ValueError("no random inputs for %r" % (ty,))
