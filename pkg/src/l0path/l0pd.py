"""l0 regularization path descent.

Keeps a concave polygon of candidate supports over all lambda >= 0. Each
iteration explores the unexplored edge of lowest cardinality and tries to
fold in its best insertion and its best removal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .csbr import StoppingRule
from .dictionary import ActiveSetState, Dictionary, Observation, as_support
from .errors import IterCapExceeded
from .path import PathResult
from .polygon import LineS, singleton_polygon
from .sbr import best_insertion, best_removal

log = logging.getLogger(__name__)

L0pdConfig = StoppingRule


@dataclass
class L0pdStats:
    iterations: int = 0
    inserted: int = 0
    pretest_skips: int = 0
    explored_cards: list = field(default_factory=list)


def l0pd(dictionary: Dictionary, obs: Observation, cfg: StoppingRule | None = None,
         check_each_step: bool = False, stats: L0pdStats | None = None, on_explore=None):
    """Run l0-PD and return ``(polygon, path)``.

    ``on_explore`` (optional) is called as ``on_explore(poly, j, info)`` before
    the two descent calls of every iteration; it exists for testing.
    """
    cfg = cfg or StoppingRule()
    stats = stats if stats is not None else L0pdStats()
    root = ActiveSetState.empty(dictionary, obs)
    poly = singleton_polygon(root.error)
    errors = {(): root.error}  # one error per support, so repeated lines compare exactly

    def line_for(support, err):
        support = as_support(support)
        err = errors.setdefault(support, err)
        return LineS(support, err, explored=False)

    while True:
        j = next((k for k, e in enumerate(poly.edges) if not e.explored), None)
        if j is None:
            break
        edge = poly.edges[j]
        lam_hi = poly.breakpoints[j]
        if cfg.hit(lam_hi, edge.card, edge.error):
            break
        if stats.iterations >= cfg.iter_cap:
            raise IterCapExceeded(f"l0-PD stopped after {cfg.iter_cap} iterations",
                                  partial=(poly, _to_path(poly, dictionary, obs)))
        stats.iterations += 1
        stats.explored_cards.append(edge.card)
        edge.explored = True

        state = ActiveSetState.from_support(dictionary, obs, edge.support)
        d_add, l_add = best_insertion(state)
        s_add = None
        if l_add is not None:
            s_add = line_for(state.support + (l_add,), state.error - d_add)
        s_rmv = None
        d_rmv = None
        if j > 0:
            d_rmv, l_rmv = best_removal(state)
            s_rmv = line_for(tuple(a for a in state.support if a != l_rmv), state.error + d_rmv)
        if on_explore is not None:
            on_explore(poly, j, {"state": state, "d_add": d_add, "d_rmv": d_rmv, "s_add": s_add, "s_rmv": s_rmv})

        if s_add is not None:
            # an insertion line can only go below the polygon under lambda_{j+1} < dE_add
            if d_add < poly.breakpoints[j + 1]:
                stats.pretest_skips += 1
            elif poly.descend(s_add):
                stats.inserted += 1
        if s_rmv is not None:
            jj = poly.index_of(edge.support)
            if jj is not None and d_rmv > poly.breakpoints[jj]:
                stats.pretest_skips += 1
            elif poly.descend(s_rmv):
                stats.inserted += 1
        if check_each_step:
            problems = poly.check_invariants()
            if problems:
                raise AssertionError(f"polygon invariants broken at iteration {stats.iterations}: {problems}")

    return poly, _to_path(poly, dictionary, obs, cfg, stats)


def _to_path(poly, dictionary, obs, cfg=None, stats=None) -> PathResult:
    coefs = []
    for e in poly.edges:
        s = ActiveSetState.from_support(dictionary, obs, e.support)
        coefs.append(s.amplitudes()[list(e.support)])
    info = {}
    if cfg is not None:
        info["stop"] = cfg.to_dict()
    if stats is not None:
        info["iterations"] = stats.iterations
        info["pretest_skips"] = stats.pretest_skips
    info["explored"] = [e.explored for e in poly.edges]
    return PathResult(
        lambdas=list(poly.breakpoints[1:]),
        supports=[e.support for e in poly.edges],
        errors=[e.error for e in poly.edges],
        coefs=coefs,
        continuous=[True] * len(poly.edges),
        producer="l0pd",
        n_atoms=dictionary.n,
        info=info,
    )
