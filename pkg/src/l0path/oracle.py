"""Exact l0 paths by exhaustive enumeration, for small dictionaries.

Everything here is computed from dense per-subset least squares and a
gift-wrapping hull over (cardinality, best error) points; it shares no code
with the active-set or polygon machinery it is used to check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .dictionary import lstsq_error
from .errors import TooLarge

MAX_ATOMS = 14
TIE_RTOL = 1e-9
MERGE_TOL = 1e-12


@dataclass
class ExactPaths:
    """Exact constrained and penalized paths of one (A, y) instance.

    ``errors`` maps every enumerated support to E(S). ``constrained[k]`` is
    the set of minimizers of E(S) subject to |S| <= k. The penalized path has
    intervals ``(breakpoints[i+1], breakpoints[i])`` with ``breakpoints[0] =
    inf`` and ``breakpoints[-1] = 0``; ``penalized[i]`` is the solution set on
    interval i and ``at_breakpoint[i]`` the one at ``breakpoints[i]`` (i >= 1).
    """

    errors: dict
    norm_sq: float
    constrained: list
    best_by_card: list
    breakpoints: list
    penalized: list
    at_breakpoint: dict
    hull_cards: list
    tol: float = field(default=0.0)

    def curve(self, lams) -> np.ndarray:
        """Exact l0-curve min_S E(S) + lambda |S|."""
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        e = np.asarray(self.best_by_card)
        k = np.arange(e.size, dtype=float)
        return np.min(e[None, :] + lams[:, None] * k[None, :], axis=1)

    def solution_set(self, lam: float) -> set:
        """Brute-force minimizers of E(S) + lam |S| (ties within ``tol``)."""
        vals = {s: e + lam * len(s) for s, e in self.errors.items()}
        best = min(vals.values())
        return {s for s, v in vals.items() if v <= best + self.tol}

    @property
    def n_intervals(self) -> int:
        return len(self.penalized)


def _enumerate(A, y, max_card):
    n = A.shape[1]
    errs = {}
    for k in range(max_card + 1):
        for s in itertools.combinations(range(n), k):
            errs[s] = lstsq_error(A, y, s)
    return errs


def _lower_hull(points):
    """Vertices of the lower convex hull of (k, e) points, walking from k=0.

    Gift wrapping: from the current vertex, the next one minimises the slope
    to every point of larger abscissa (furthest point on ties), and the walk
    stops once the best slope is no longer negative.
    """
    hull = [0]
    cur = 0
    while True:
        k0, e0 = points[cur]
        best, best_slope = None, 0.0
        for idx in range(cur + 1, len(points)):
            k, e = points[idx]
            slope = (e - e0) / (k - k0)
            if slope < best_slope or (best is not None and slope == best_slope):
                best, best_slope = idx, slope
        if best is None:
            return hull
        hull.append(best)
        cur = best


def exact_paths(A, y, max_card: int | None = None) -> ExactPaths:
    """Enumerate every support and derive the exact l0 paths."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    kmax = min(m, n) if max_card is None else min(m, n, int(max_card))
    if n > MAX_ATOMS and max_card is None:
        raise TooLarge(f"exhaustive enumeration needs n <= {MAX_ATOMS}, got n={n}")
    if math.comb(n, kmax) > 5_000_000:
        raise TooLarge(f"too many subsets for n={n}, max_card={kmax}")
    errs = _enumerate(A, y, kmax)
    norm_sq = float(y @ y)
    tol = TIE_RTOL * (1.0 + norm_sq)

    best_by_card = []
    for k in range(kmax + 1):
        best_by_card.append(min(e for s, e in errs.items() if len(s) == k))
    constrained = []
    for k in range(kmax + 1):
        e_min = min(best_by_card[: k + 1])
        constrained.append({s for s, e in errs.items() if len(s) <= k and e <= e_min + tol})

    points = [(k, e) for k, e in enumerate(best_by_card)]
    hull = _lower_hull(points)
    bps = [math.inf]
    for a, b in zip(hull, hull[1:]):
        bps.append((points[a][1] - points[b][1]) / (points[b][0] - points[a][0]))
    bps.append(0.0)
    # merge degenerate (numerically empty) intervals
    i = 1
    while i < len(bps) - 1:
        if bps[i] - bps[i + 1] < MERGE_TOL:
            del hull[i]
            del bps[i]
            if i < len(hull):
                a, b = hull[i - 1], hull[i]
                bps[i] = (points[a][1] - points[b][1]) / (points[b][0] - points[a][0])
        else:
            i += 1

    penalized = []
    for kk in hull:
        e = best_by_card[kk]
        penalized.append({s for s, v in errs.items() if len(s) == kk and v <= e + tol})
    paths = ExactPaths(errs, norm_sq, constrained, best_by_card, bps, penalized, {}, list(hull), tol)
    for i in range(1, len(bps) - 1):
        paths.at_breakpoint[i] = paths.solution_set(bps[i])
    return paths


@dataclass
class Report:
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "Report", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)
        for k, v in other.stats.items():
            self.stats[k] = self.stats.get(k, 0) + v


def _probe_points(lo: float, hi: float, tol: float) -> list:
    if math.isinf(hi):
        pts = [lo + (1.0 + lo) * f for f in (0.5, 3.0, 100.0)]
    elif lo == 0.0:
        pts = [hi * 0.75, hi * 0.3, hi * 1e-3]
    else:
        pts = [lo + f * (hi - lo) for f in (0.1, 0.37, 0.5, 0.81, 0.9)]
    # a probe closer than the tie tolerance to a vertex cannot separate the two sides
    return [p for p in pts if min(p - lo, hi - p) > 10 * tol]


def check_theorem1(paths: ExactPaths, grid=None) -> Report:
    """Piecewise constancy of the penalized solution set, plus the breakpoint inclusions.

    ``grid`` optionally adds extra lambda values; each is checked against the
    interval that contains it.
    """
    rep = Report()
    bps = paths.breakpoints
    probes = []
    for i in range(len(paths.penalized)):
        lo, hi = bps[i + 1], bps[i]
        for lam in _probe_points(lo, hi, paths.tol):
            probes.append((i, lam))
    for lam in grid if grid is not None else []:
        for i in range(len(paths.penalized)):
            lo, hi = bps[i + 1], bps[i]
            if lo < lam < hi and min(lam - lo, hi - lam) > 10 * paths.tol:
                probes.append((i, float(lam)))
    for i, lam in probes:
        got = paths.solution_set(lam)
        if got != paths.penalized[i]:
            rep.violations.append(f"piecewise-constant: solution set at lambda={lam:.6g} differs from interval {i}")
    rep.stats["probes"] = len(probes)

    last = len(paths.penalized) - 1
    if paths.penalized[0] != {()}:
        rep.violations.append("breakpoint-inclusion: solution set above lambda_1 is not {{}}")
    for i in range(len(paths.penalized)):
        upper = paths.at_breakpoint.get(i)  # at lambda_i (None for i=0, lambda=inf)
        lower = paths.at_breakpoint.get(i + 1) if i < last else None  # None at lambda=0
        for bp_set, where in ((upper, i), (lower, i + 1)):
            if bp_set is not None and not paths.penalized[i] <= bp_set:
                rep.violations.append(f"breakpoint-inclusion: interval {i} not contained in breakpoint {where} set")
    return rep


def check_theorem2(paths: ExactPaths) -> Report:
    """Penalized path is contained in the constrained path, interval by interval."""
    rep = Report()
    constrained_union = set().union(*paths.constrained)
    non_supported = 0
    for i, sol in enumerate(paths.penalized):
        k = len(next(iter(sol)))
        if sol != paths.constrained[k]:
            rep.violations.append(f"penalized-in-constrained: interval {i} set differs from constrained set k={k}")
        if not sol <= constrained_union:
            rep.violations.append(f"penalized-in-constrained: interval {i} has supports outside the constrained path")
    penalized_union = set().union(*paths.penalized)
    for sols in paths.constrained:
        if not sols <= penalized_union:
            non_supported += 1
    rep.stats["non_supported_cards"] = non_supported
    rep.stats["intervals"] = len(paths.penalized)
    return rep


def envelope_lines(paths: ExactPaths):
    """All (support, error) pairs, i.e. every line of the l0-curve envelope."""
    return list(paths.errors.items())


DOMINANCE_SLACK = 1e-9


def dominance_grid(paths: ExactPaths, path=None, n_log: int = 200) -> np.ndarray:
    """Dense positive lambda grid: vertices of both curves, their midpoints and a log sweep."""
    pts = [b for b in paths.breakpoints if math.isfinite(b) and b > 0]
    if path is not None:
        pts += [float(v) for v in path.lambdas if v > 0]
    top = max(pts + [1.0]) * 2.0
    pts += list(np.logspace(math.log10(top), math.log10(top) - 12, n_log))
    pts = np.unique(np.asarray(pts, dtype=float))
    mids = 0.5 * (pts[1:] + pts[:-1])
    return np.unique(np.concatenate([pts, mids]))


def check_dominance(paths: ExactPaths, path, grid=None, slack: float = DOMINANCE_SLACK) -> Report:
    """An approximate path never goes below the exact l0-curve."""
    rep = Report()
    lams = dominance_grid(paths, path) if grid is None else np.asarray(grid, dtype=float)
    lams = lams[lams > path.lambdas[-1]]
    approx = path.values(lams)
    exact = paths.curve(lams)
    bad = np.flatnonzero(approx < exact - slack)
    for i in bad[:5]:
        rep.violations.append(
            f"dominance: {path.producer} at lambda={lams[i]:.6g} gives {approx[i]:.12g} < exact {exact[i]:.12g}")
    rep.stats["dominance_points"] = int(lams.size)
    rep.stats["curve_equal_points"] = int(np.sum(np.abs(approx - exact) <= 1e-9 * (1.0 + paths.norm_sq)))
    return rep
