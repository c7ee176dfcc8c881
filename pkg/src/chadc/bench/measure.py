"""Cost measurement and the regression rules on measured ratios."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .. import cotangent as C
from ..chad.driver import run_gradient
from ..evaluator import evaluate
from ..evm import C_RUN
from ..pipeline import prepare
from .families import FamilySpec, family_point, gen_family

# additive allowances subtracted before comparing ratios: per context entry
# (run plus building the zero tuple) and per unit of seed size
C_CTX = C_RUN + 2
C_SEED = C.C_PHI

RULES = ("flat-ratio", "log-growth", "doubling", "linear")


@dataclass
class Row:
    n: int
    cost_primal: int
    cost_derivative: int
    ratio: float
    adjusted_ratio: float
    n_ctx: int
    seed_size: int

    def to_json(self) -> dict:
        return {"n": self.n, "cost_primal": self.cost_primal,
                "cost_derivative": self.cost_derivative, "ratio": self.ratio,
                "adjusted_ratio": self.adjusted_ratio, "n_ctx": self.n_ctx,
                "seed_size": self.seed_size}


@dataclass
class Report:
    family: str
    mode: str
    rule: str
    rows: List[Row]
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"family": self.family, "mode": self.mode,
                "rows": [r.to_json() for r in self.rows], "rule": self.rule,
                "pass": self.passed, "detail": self.detail}


def measure(ctx, t, mode: str, point: Sequence, seed=1.0, n: Optional[int] = None) -> Row:
    _, cost_primal = evaluate(t, list(point))
    prep = prepare(mode, ctx, t)
    res = run_gradient(prep.transformed, point, seed)
    n_ctx = len(prep.ctx)
    ssize = C.size(seed)
    adj = (res.cost_derivative - C_CTX * n_ctx - C_SEED * ssize) / cost_primal
    return Row(n if n is not None else 0, cost_primal, res.cost_derivative,
               res.cost_derivative / cost_primal, adj, n_ctx, ssize)


def measure_family(family: str, mode: str, n: int, seed: int = 0) -> Row:
    g = gen_family(FamilySpec(family, n, mode))
    return measure(g.ctx, g.term, mode, family_point(g, seed), 1.0, n)


def check_rule(rule: str, rows: Sequence[Row]):
    """Evaluate a regression rule; returns (passed, detail)."""
    if len(rows) < 2:
        return False, "need at least two sizes"
    if rule == "flat-ratio":
        lo, hi = rows[0].adjusted_ratio, rows[-1].adjusted_ratio
        return hi <= 1.2 * lo, "adjusted ratio %.4g at n=%d vs %.4g at n=%d (limit 1.2x)" % (
            hi, rows[-1].n, lo, rows[0].n)
    if rule == "log-growth":
        lo, hi = rows[0].adjusted_ratio, rows[-1].adjusted_ratio
        return hi >= 1.5 * lo, "adjusted ratio %.4g at n=%d vs %.4g at n=%d (need 1.5x)" % (
            hi, rows[-1].n, lo, rows[0].n)
    if rule == "doubling":
        qs = [b.cost_derivative / a.cost_derivative for a, b in zip(rows, rows[1:])]
        ok = all(1.8 <= q <= 2.2 for q in qs)
        return ok, "successive derivative cost ratios %s (need each in [1.8, 2.2])" % (
            ", ".join("%.4f" % q for q in qs))
    if rule == "linear":
        qs = [b.cost_derivative / a.cost_derivative * (a.n * 2 / b.n) for a, b in zip(rows, rows[1:])]
        ok = all(q <= 2.3 for q in qs)
        return ok, "derivative cost growth per doubling %s (limit 2.3)" % (
            ", ".join("%.4f" % q for q in qs))
    raise ValueError("unknown rule %r (known: %s)" % (rule, ", ".join(RULES)))


def default_rule(family: str, mode: str) -> str:
    return "linear" if family == "t_n" else "flat-ratio"


def regression_check(family: str, mode: str, sizes: Sequence[int], rule: Optional[str] = None,
                     seed: int = 0) -> Report:
    rule = rule or default_rule(family, mode)
    if rule not in RULES:
        raise ValueError("unknown rule %r (known: %s)" % (rule, ", ".join(RULES)))
    sizes = sorted(sizes)
    rows = [measure_family(family, mode, n, seed) for n in sizes]
    ok, detail = check_rule(rule, rows)
    return Report(family, mode, rule, rows, ok, detail)
