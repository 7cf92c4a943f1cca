"""Valuations on boxes and planar convex bodies: decomposition, grids, probes."""

from .boxes import Box, make_box, origin_box, scale_translate, union_compatible
from .core import EMPTY, ValuationLabError
from .decomposition import (
    BoxValuationOracle,
    ComponentFamily,
    check_valuation,
    extract_components,
    reconstruct,
)
from .valuations import (
    Combination,
    Euler,
    Perimeter,
    PhiF,
    PhiL,
    PhiSing,
    Vol,
    evaluate,
)

__all__ = [
    "Box", "make_box", "origin_box", "scale_translate", "union_compatible",
    "EMPTY", "ValuationLabError",
    "BoxValuationOracle", "ComponentFamily", "check_valuation", "extract_components",
    "reconstruct",
    "Combination", "Euler", "Perimeter", "PhiF", "PhiL", "PhiSing", "Vol", "evaluate",
]
