"""Concave polygons lambda -> min_j {E(S_j) + lambda |S_j|}.

A polygon is a list of lines ordered by increasing slope (cardinality).
Breakpoints are not stored separately: they are always recomputed from
neighbouring lines, with ``inf`` on top and ``0`` at the bottom.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dictionary import Support, as_support

INF = math.inf
BELOW_SLACK = 1e-12


@dataclass
class LineS:
    """The line lambda -> error + lambda * card attached to a support."""

    support: Support
    error: float
    explored: bool = False
    card: int = field(init=False)

    def __post_init__(self):
        self.support = as_support(self.support)
        self.error = float(self.error)
        if not math.isfinite(self.error):
            raise ValueError("line intercept must be finite")
        self.card = len(self.support)

    def __call__(self, lam: float) -> float:
        return self.error + lam * self.card


def _crossing(upper: LineS, lower: LineS) -> float:
    """lambda at which a line of smaller slope meets one of larger slope."""
    return (upper.error - lower.error) / (lower.card - upper.card)


class ConcavePolygon:
    def __init__(self, edges):
        self.edges: list = list(edges)
        self._refresh()

    # -- structure ----------------------------------------------------------
    def _refresh(self):
        self.edges.sort(key=lambda e: e.card)
        self._prune()
        bps = [INF]
        for a, b in zip(self.edges, self.edges[1:]):
            bps.append(_crossing(a, b))
        bps.append(0.0)
        self.breakpoints = bps

    def _prune(self):
        # Standard lower-envelope sweep over slopes, restricted to lambda >= 0.
        # Normally a no-op after ccv_descent; it only guards against round-off.
        kept = []
        for e in self.edges:
            if kept and kept[-1].card == e.card:
                if e.error < kept[-1].error:
                    kept[-1] = e
                continue
            while len(kept) >= 2 and _crossing(kept[-2], kept[-1]) <= _crossing(kept[-1], e):
                kept.pop()
            kept.append(e)
        while len(kept) >= 2 and _crossing(kept[-2], kept[-1]) <= 0.0:
            kept.pop()
        self.edges = kept

    def __len__(self):
        return len(self.edges)

    def supports(self):
        return [e.support for e in self.edges]

    def index_of(self, support) -> int | None:
        s = as_support(support)
        for j, e in enumerate(self.edges):
            if e.support == s:
                return j
        return None

    def interval(self, j: int):
        """(lambda_{j+1}, lambda_j) delimiting edge j."""
        return self.breakpoints[j + 1], self.breakpoints[j]

    def copy(self) -> "ConcavePolygon":
        return ConcavePolygon(LineS(e.support, e.error, e.explored) for e in self.edges)

    # -- queries ------------------------------------------------------------
    def evaluate(self, lam: float):
        """Value of the polygon at ``lam`` and the index of the active edge.

        At an interior vertex the larger-cardinality edge is reported.
        """
        if lam < 0:
            raise ValueError("lambda must be non-negative")
        j = sum(1 for b in self.breakpoints[1:-1] if b >= lam)
        return self.edges[j](lam), j

    def values(self, lams) -> np.ndarray:
        lams = np.asarray(lams, dtype=float)
        errs = np.array([e.error for e in self.edges])
        cards = np.array([e.card for e in self.edges], dtype=float)
        return np.min(errs[None, :] + lams[:, None] * cards[None, :], axis=1)

    def intersect(self, line: LineS):
        """Interval of lambda >= 0 on which ``line`` lies strictly below.

        Returns ``(lam_inf, lam_sup)``; an empty intersection is signalled by
        ``lam_inf > lam_sup`` (the sentinel ``(1.0, 0.0)``).
        """
        lo_best, hi_best = INF, -INF
        for j, e in enumerate(self.edges):
            lo, hi = self.breakpoints[j + 1], self.breakpoints[j]
            a = line.error - e.error + BELOW_SLACK
            b = line.card - e.card
            if b == 0:
                if a >= 0:
                    continue
            elif b > 0:
                hi = min(hi, -a / b)
            else:
                lo = max(lo, -a / b)
            if lo < hi:
                lo_best = min(lo_best, lo)
                hi_best = max(hi_best, hi)
        if lo_best < hi_best:
            return max(lo_best, 0.0), hi_best
        return 1.0, 0.0

    # -- update -------------------------------------------------------------
    def descend(self, new: LineS) -> bool:
        """Fold ``new`` into the polygon if it lowers it somewhere.

        Edges whose whole interval lies in the below-interval are dropped. The
        new edge keeps its ``explored`` flag (callers pass unexplored lines).
        Returns whether the line was inserted; a support already present as an
        edge is never inserted.
        """
        if self.index_of(new.support) is not None:
            return False
        lam_inf, lam_sup = self.intersect(new)
        if not lam_inf < lam_sup:
            return False
        kept = []
        for j, e in enumerate(self.edges):
            lo, hi = self.breakpoints[j + 1], self.breakpoints[j]
            if lam_inf <= lo and hi <= lam_sup:
                continue
            kept.append(e)
        kept.append(new)
        self.edges = kept
        self._refresh()
        return True

    # -- checks ---------------------------------------------------------------
    def check_invariants(self, rtol: float = 1e-9) -> list:
        """Return a list of violated structural properties (empty when valid)."""
        problems = []
        bps = self.breakpoints
        if not self.edges:
            return ["polygon has no edges"]
        if bps[0] != INF or bps[-1] != 0.0:
            problems.append("breakpoints must run from inf down to 0")
        cards = [e.card for e in self.edges]
        if any(b <= a for a, b in zip(cards, cards[1:])):
            problems.append(f"cardinalities not strictly increasing: {cards}")
        if any(not (b < a) for a, b in zip(bps, bps[1:])):
            problems.append(f"breakpoints not strictly decreasing: {bps}")
        for j in range(1, len(self.edges)):
            lam = bps[j]
            left, right = self.edges[j - 1](lam), self.edges[j](lam)
            if abs(left - right) > rtol * max(1.0, abs(left), abs(right)):
                problems.append(f"discontinuity at breakpoint {j} (lambda={lam})")
        return problems

    # -- serialisation ----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "edges": [
                {"support": list(e.support), "error": e.error, "card": e.card, "explored": e.explored}
                for e in self.edges
            ],
            "breakpoints": ["inf" if b == INF else b for b in self.breakpoints],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConcavePolygon":
        return cls(LineS(e["support"], e["error"], e.get("explored", False)) for e in data["edges"])

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def __repr__(self):
        return f"ConcavePolygon({len(self.edges)} edges)"


def singleton_polygon(err_empty: float) -> ConcavePolygon:
    if err_empty < 0:
        raise ValueError("the empty-support error must be non-negative")
    return ConcavePolygon([LineS((), err_empty)])


def evaluate(poly: ConcavePolygon, lam: float):
    return poly.evaluate(lam)


def intersect(poly: ConcavePolygon, line: LineS):
    return poly.intersect(line)


def ccv_descent(poly: ConcavePolygon, new: LineS):
    """Functional form of :meth:`ConcavePolygon.descend` (returns a new polygon)."""
    out = poly.copy()
    inserted = out.descend(new)
    return out, inserted
