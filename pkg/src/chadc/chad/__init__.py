"""CHAD code transformations and the gradient driver."""
from .transform import (Chad, Mode, TransformConfig, Transformed, chad_transform, d1_type,
                        d2_type)
from .driver import GradResult, dense_gradient, driver_term, grad, run_gradient

__all__ = ["Chad", "Mode", "TransformConfig", "Transformed", "chad_transform", "d1_type",
           "d2_type", "GradResult", "dense_gradient", "driver_term", "grad", "run_gradient"]
