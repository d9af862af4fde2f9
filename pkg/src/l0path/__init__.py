"""Approximate l0-penalized regularization paths (SBR, CSBR, l0-PD)."""

from .csbr import StoppingRule, csbr
from .dictionary import (
    ActiveSetState,
    Dictionary,
    Observation,
    as_support,
    build_dictionary,
    empty_state,
)
from .l0pd import L0pdConfig, l0pd
from .path import PathResult, solution_at
from .polygon import ConcavePolygon, LineS, ccv_descent, singleton_polygon
from .sbr import SbrOutcome, delta_e_rmv, ell_rmv, sbr

__version__ = "0.1.0"

__all__ = [
    "ActiveSetState",
    "ConcavePolygon",
    "Dictionary",
    "L0pdConfig",
    "LineS",
    "Observation",
    "PathResult",
    "SbrOutcome",
    "StoppingRule",
    "as_support",
    "build_dictionary",
    "ccv_descent",
    "csbr",
    "delta_e_rmv",
    "ell_rmv",
    "empty_state",
    "l0pd",
    "sbr",
    "singleton_polygon",
    "solution_at",
]
