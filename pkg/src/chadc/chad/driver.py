"""Gradient driver: wraps a transformed term so a single evaluation returns
the primal result together with the input cotangent for a given seed."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .. import cotangent as C
from .. import envmap as EM
from .._deep import call_deep
from ..cotangent import Meter
from ..evaluator import evaluate, map_to_tuple
from ..lang import terms as T
from ..lang.scope import fresh, resolve, unresolve
from ..lang.types import Ty
from .transform import Mode, TransformConfig, Transformed, chad_transform, d2_type


@dataclass
class GradResult:
    primal: object
    cotangents: Tuple            # one cotangent per input, sparse or dense
    cost_derivative: int
    cost_primal: Optional[int] = None


def driver_term(tr: Transformed) -> T.Term:
    """Term in context D1(ctx) + [seed] evaluating to (primal, env cotangent)."""
    seed = fresh("seed")
    names = list(tr.names) + [seed]
    p = fresh("p")
    back = T.App(T.Snd(T.Var(None, p)), T.Var(None, seed))
    if tr.cfg.monadic:
        back = T.Snd(T.EvmRun(tr.d2_ctx, back, T.EnvZero(tr.d2_ctx, "sparse")))
    named = T.Let(None, tr.named if tr.named is not None else unresolve(tr.term, tr.names), T.Pair(T.Fst(T.Var(None, p)), back), p)
    return resolve(named, names)


def _normalise_env(env, tr: Transformed):
    if isinstance(env, EM.EnvMap):
        return map_to_tuple(env, tr.d2_ctx)
    return env


def run_gradient(tr: Transformed, point: Sequence, seed, meter: Optional[Meter] = None) -> GradResult:
    return call_deep(_run_gradient, tr, point, seed, meter)


def _run_gradient(tr, point, seed, meter):
    m = meter if meter is not None else Meter()
    term = driver_term(tr)
    (prim, env), cost = evaluate(term, list(point) + [seed], m)
    return GradResult(prim, tuple(_normalise_env(env, tr)), cost)


def grad(cfg: TransformConfig, ctx: Sequence[Ty], t: T.Term, point: Sequence,
         seed=1.0, names: Optional[Sequence[str]] = None) -> GradResult:
    tr = chad_transform(cfg, ctx, t, names)
    return run_gradient(tr, point, seed)


def dense_gradient(ctx: Sequence[Ty], res: GradResult, point: Sequence) -> List[float]:
    """All input cotangents as one dense vector in leaf order."""
    out: List[float] = []
    for ty, d, x in zip(ctx, res.cotangents, point):
        out.extend(C.densify(d2_type(ty), d, like=x))
    return out
