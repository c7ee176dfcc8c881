"""Shared test helpers: the program corpus and a random well-typed term generator."""
from __future__ import annotations

import random
from pathlib import Path
from typing import List

from chadc.lang import parse_program
from chadc.lang import terms as T
from chadc.lang.scope import iter_terms
from chadc.lang.types import REAL, UNIT, Prod, Sum, mentions_array

CORPUS_DIR = Path(__file__).parent / "corpus"
ARRAY_NODES = (T.Build, T.Index, T.Fold, T.Length)


def corpus_paths() -> List[Path]:
    return sorted(CORPUS_DIR.glob("*.chad"))


def load(path):
    return parse_program(Path(path).read_text())


def is_higher_order(prog) -> bool:
    return any(isinstance(x, (T.Lam, T.App)) for x in iter_terms(prog.body))


def has_arrays(prog) -> bool:
    return (any(mentions_array(t) for t in prog.types)
            or any(isinstance(x, ARRAY_NODES) for x in iter_terms(prog.body)))


def corpus(kind: str = "all"):
    """(name, program) pairs; kind is all, first-order, plain, arrays or higher-order.

    plain means first order without arrays."""
    out = []
    for p in corpus_paths():
        prog = load(p)
        ho, arr = is_higher_order(prog), has_arrays(prog)
        keep = {"all": True, "first-order": not ho, "plain": not ho and not arr,
                "arrays": arr and not ho, "higher-order": ho}[kind]
        if keep:
            out.append((p.stem, prog))
    return out


def mode_for(prog) -> str:
    return "defunctionalise" if is_higher_order(prog) else "monadic"


# ---- random first-order terms ---------------------------------------------------

PAIR = Prod(REAL, REAL)
BOOL = Sum(UNIT, UNIT)
SAFE_OPS = (("add", 2), ("mul", 2), ("sub", 2), ("neg", 1), ("sin", 1), ("cos", 1))


class TermGen:
    """Random well-typed terms over Real, Unit, Prod(Real, Real) and sign sums.

    Only total primitives are used so every generated term evaluates."""

    def __init__(self, seed: int, max_depth: int = 4):
        self.rng = random.Random(seed)
        self.max_depth = max_depth

    def term(self, env, ty, depth=0):
        rng = self.rng
        vars_ = [i for i, t in enumerate(env) if t == ty]
        leaf = depth >= self.max_depth
        if ty == UNIT:
            return T.UnitLit()
        if ty == BOOL:
            return T.Sign(self.term(env, REAL, depth + 1))
        if leaf:
            if vars_ and rng.random() < 0.8:
                return T.Var(rng.choice(vars_))
            if ty == REAL:
                return T.RealLit(round(rng.uniform(-2, 2), 3))
            return T.Pair(self.term(env, REAL, depth + 1), self.term(env, REAL, depth + 1))
        k = rng.randrange(6)
        if k == 0 and vars_:
            return T.Var(rng.choice(vars_))
        if k == 1:
            bty = rng.choice((REAL, PAIR, UNIT))
            return T.Let(bty, self.term(env, bty, depth + 1), self.term(env + [bty], ty, depth + 1))
        if k == 2:
            return T.Case(T.Sign(self.term(env, REAL, depth + 1)),
                          self.term(env + [UNIT], ty, depth + 1),
                          self.term(env + [UNIT], ty, depth + 1))
        if k == 3:
            s = self.term(env, PAIR, depth + 1)
            if ty == REAL:
                return T.Fst(s) if rng.random() < 0.5 else T.Snd(s)
            return s
        if k == 4:
            lt = Sum(REAL, PAIR)
            inj = (T.Inl(self.term(env, REAL, depth + 1), PAIR) if rng.random() < 0.5
                   else T.Inr(self.term(env, PAIR, depth + 1), REAL))
            return T.Case(inj, self.term(env + [lt.a], ty, depth + 1),
                          self.term(env + [lt.b], ty, depth + 1))
        if ty == REAL:
            name, n = rng.choice(SAFE_OPS)
            return T.PrimOp(name, tuple(self.term(env, REAL, depth + 1) for _ in range(n)))
        return T.Pair(self.term(env, REAL, depth + 1), self.term(env, REAL, depth + 1))


def random_program(seed: int, max_depth: int = 4):
    """(ctx, term) with a Real result over inputs x: Real, y: Real, p: Prod(Real, Real)."""
    ctx = [REAL, REAL, PAIR]
    return ctx, TermGen(seed, max_depth).term(list(ctx), REAL)



# ---- random cotangents ----------------------------------------------------------

def random_ltype(rng, depth: int):
    """A random nesting of LProd/LSum over LReal and LUnit, at most `depth` deep."""
    from chadc.lang.types import LREAL, LUNIT, LProd, LSum
    if depth <= 0 or rng.random() < 0.2:
        return LREAL if rng.random() < 0.8 else LUNIT
    c = LProd if rng.random() < 0.6 else LSum
    return c(random_ltype(rng, depth - 1), random_ltype(rng, depth - 1))


def random_cots(rng, ty, k: int, p_zero: float = 0.25):
    """k shape-valid cotangents of ty that can be added to each other.

    Sum nodes agree on their injection side (or are zero), so plus never
    hits the inl/inr mismatch."""
    from chadc import cotangent as C
    from chadc.lang.types import LREAL, LUNIT, LProd, LSum
    if ty is LREAL:
        return [rng.uniform(-4, 4) for _ in range(k)]
    if ty is LUNIT:
        return [C.CUNIT] * k
    if isinstance(ty, LProd):
        xs, ys = random_cots(rng, ty.a, k, p_zero), random_cots(rng, ty.b, k, p_zero)
        return [C.CPZERO if rng.random() < p_zero else C.CPair(x, y) for x, y in zip(xs, ys)]
    if isinstance(ty, LSum):
        left = rng.random() < 0.5
        xs = random_cots(rng, ty.a if left else ty.b, k, p_zero)
        inj = C.CInl if left else C.CInr
        return [C.CSZERO if rng.random() < p_zero else inj(x) for x in xs]
    raise ValueError(ty)


def random_bag(rng, length: int, items: int):
    from chadc import cotangent as C
    b = C.BAG_EMPTY
    for _ in range(items):
        b = C.plus(b, C.CBagOne(rng.randrange(length), rng.uniform(-2, 2)))
    return b
