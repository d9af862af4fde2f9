"""Model order selection over a path and support-recovery scores."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyGrid, NoEligibleSegment, OutOfRange
from .path import PathResult, solution_at

log = logging.getLogger(__name__)

N_LAMBDA = 11
GRID_DECADES = 4.0
# noise-free data only reach the true support once lambda is far below lambda_1
NOISE_FREE_DECADES = 10.0
# E(S) at or below this fraction of the largest path error counts as an exact fit
ZERO_ERROR_RTOL = 1e-14


def _candidates(path):
    cards = [len(s) for s in path.supports]
    errs = [float(e) for e in path.errors]
    return cards, errs


def _zero_fit(cards, errs, max_card=None):
    """Index of the sparsest segment with a numerically exact fit, if any.

    Segments above ``max_card`` are not eligible.
    """
    scale = max(errs) if errs else 0.0
    zero = [j for j, e in enumerate(errs)
            if e <= ZERO_ERROR_RTOL * scale and (max_card is None or cards[j] <= max_card)]
    if not zero or scale == 0.0:
        return None
    return min(zero, key=lambda j: (cards[j], j))


def _argmin(crit: dict, cards):
    if not crit:
        raise NoEligibleSegment("no path segment is eligible for this criterion")
    return min(crit, key=lambda j: (crit[j], cards[j], j))


def mdlc_select(path, m: int) -> int:
    """Index of the segment minimising log E + log(m) (|S|+1) / (m - |S| - 2)."""
    cards, errs = _candidates(path)
    z = _zero_fit(cards, errs, max_card=m - 3)
    if z is not None:
        return z
    crit = {}
    for j, (k, e) in enumerate(zip(cards, errs)):
        if e > 0 and m - k - 2 > 0:
            crit[j] = math.log(e) + math.log(m) * (k + 1) / (m - k - 2)
    return _argmin(crit, cards)


IC_ALPHA = {
    "aic": lambda m: 2.0,
    "mdl": lambda m: math.log(m),
    "hannan_quinn": lambda m: 2.0 * math.log(math.log(m)),
}


def ic_alpha(rule, m: int) -> float:
    if isinstance(rule, str):
        key = {"hq": "hannan_quinn", "bic": "mdl"}.get(rule.lower(), rule.lower())
        if key not in IC_ALPHA:
            raise ValueError(f"unknown criterion {rule!r}")
        return IC_ALPHA[key](m)
    return float(rule)


def ic_select(path, m: int, alpha_rule="mdl") -> int:
    """Index of the segment minimising m log E + alpha |S|.

    ``alpha_rule`` is "aic" (2), "mdl" (log m), "hannan_quinn" (2 log log m)
    or a number.
    """
    alpha = ic_alpha(alpha_rule, m)
    cards, errs = _candidates(path)
    # an exact fit with as many atoms as samples carries no information
    z = _zero_fit(cards, errs, max_card=m - 1)
    if z is not None:
        return z
    crit = {j: m * math.log(e) + alpha * k for j, (k, e) in enumerate(zip(cards, errs)) if e > 0}
    return _argmin(crit, cards)


def support_error(s_true, s_est):
    """(|S* \\ S| + |S \\ S*|, |S* & S|)."""
    a, b = set(s_true), set(s_est)
    return len(a - b) + len(b - a), len(a & b)


@dataclass
class LambdaGrid:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise EmptyGrid("lambda grid is empty")
        if np.any(self.values <= 0) or np.any(np.diff(self.values) >= 0):
            raise ValueError("grid values must be positive and strictly decreasing")

    @property
    def n_points(self) -> int:
        return int(self.values.size)

    @property
    def top(self) -> float:
        return float(self.values[0])

    @property
    def bottom(self) -> float:
        return float(self.values[-1])


def grid_decades(snr_db: float) -> float:
    return NOISE_FREE_DECADES if math.isinf(snr_db) else GRID_DECADES


def default_grid(lambda_1: float, n_points: int = N_LAMBDA, decades: float = GRID_DECADES) -> LambdaGrid:
    """Log-spaced grid from lambda_1 down to lambda_1 * 10**-decades."""
    if not lambda_1 > 0:
        raise EmptyGrid("the grid needs a positive top value (y is orthogonal to every atom)")
    top = math.log10(lambda_1)
    return LambdaGrid(np.logspace(top, top - decades, n_points))


@dataclass
class TrialScores:
    se: int
    tp: int
    order: int
    lambda_opt: float
    mdlc_se: int
    mdlc_tp: int
    mdlc_order: int
    j_values: list  # E(S) + lambda |S| at each grid point (None when out of range)

    def to_dict(self) -> dict:
        return asdict(self)


def score_trial(instance, path: PathResult, grid: LambdaGrid, m: int) -> TrialScores:
    """Best-over-grid support recovery and the MDLc estimate of one trial.

    ``instance`` is an :class:`~l0path.problems.Instance` or the true support itself.
    """
    support_star = getattr(instance, "support_star", instance)
    if grid.n_points == 0:
        raise EmptyGrid("lambda grid is empty")
    best = None
    j_values = []
    for lam in grid.values:
        try:
            s, _ = solution_at(path, float(lam))
        except OutOfRange:
            log.warning("grid point %g lies below the computed path; skipped", lam)
            j_values.append(None)
            continue
        jj = path.segment_index(float(lam))
        j_values.append(float(path.errors[jj] + lam * len(s)))
        se, tp = support_error(support_star, s)
        # grid runs downwards, so strict improvement keeps the sparser side on ties
        if best is None or se < best[0]:
            best = (se, tp, len(s), float(lam))
    if best is None:
        raise EmptyGrid("no grid point falls inside the computed path")
    sel = mdlc_select(path, m)
    mse, mtp = support_error(support_star, path.supports[sel])
    return TrialScores(best[0], best[1], best[2], best[3], mse, mtp, len(path.supports[sel]), j_values)
