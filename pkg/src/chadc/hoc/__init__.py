"""Higher-order CHAD: naive rules, closure conversion, defunctionalisation."""
from typing import Sequence

from ..chad.transform import Mode, TransformConfig, Transformed, chad_transform
from ..lang.terms import Term
from ..lang.types import Ty
from .closure import Converted, LambdaSite, cc_type, closure_convert, lambda_inventory
from .defunc import Defunctionalised, defunctionalise, defunctionalise_program


def chad_naive_ho(ctx: Sequence[Ty], t: Term) -> Transformed:
    return chad_transform(TransformConfig(Mode.NAIVE_HO), ctx, t)


def chad_closed(conv: Converted) -> Transformed:
    """Differentiate a closure-converted program without defunctionalising."""
    return chad_transform(TransformConfig(Mode.CLOSED), conv.ctx, conv.term)


__all__ = ["Converted", "Defunctionalised", "LambdaSite", "cc_type", "chad_closed",
           "chad_naive_ho", "closure_convert", "defunctionalise", "defunctionalise_program",
           "lambda_inventory"]
