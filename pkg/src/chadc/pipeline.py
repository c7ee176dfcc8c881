"""Mode names shared by the CLI and the benchmarks, and the pass pipeline
each one runs before evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .chad.driver import GradResult, run_gradient
from .chad.transform import Mode, TransformConfig, Transformed, chad_transform
from .cotangent import Meter
from .hoc.closure import closure_convert
from .hoc.defunc import defunctionalise
from .lang.terms import Term
from .lang.types import Ty

MODES = ("naive-dense", "naive-treemap", "monadic", "naive-ho", "defunctionalise", "closure-chad")
FIRST_ORDER_MODES = ("naive-dense", "naive-treemap", "monadic")


@dataclass
class Prepared:
    mode: str
    ctx: List[Ty]           # context of the program that gets differentiated
    term: Term              # the program that gets differentiated
    transformed: Transformed


def prepare(mode: str, ctx: Sequence[Ty], t: Term, names: Optional[Sequence[str]] = None) -> Prepared:
    ctx = list(ctx)
    if mode == "defunctionalise":
        d = defunctionalise(closure_convert(ctx, t))
        ctx, t, cfg = d.ctx, d.term, TransformConfig(Mode.MONADIC)
    elif mode == "closure-chad":
        c = closure_convert(ctx, t)
        ctx, t, cfg = c.ctx, c.term, TransformConfig(Mode.CLOSED)
    elif mode in MODES:
        cfg = TransformConfig(Mode(mode))
    else:
        raise ValueError("unknown mode %r" % mode)
    return Prepared(mode, ctx, t, chad_transform(cfg, ctx, t, names))


def gradient(mode: str, ctx: Sequence[Ty], t: Term, point: Sequence, seed=1.0,
             meter: Optional[Meter] = None) -> GradResult:
    p = prepare(mode, ctx, t)
    return run_gradient(p.transformed, point, seed, meter)
