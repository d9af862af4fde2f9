import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from l0path import Dictionary, Observation, StoppingRule, csbr, l0pd
from l0path.errors import IterCapExceeded
from l0path.l0pd import L0pdStats
from l0path.oracle import check_dominance, exact_paths
from l0path.polygon import LineS

from conftest import random_problem

EQUAL_SHARE = 0.8


def sparse_noise_free(seed, m=12, n=10, k=2):
    rng = np.random.default_rng([99, seed])
    A = rng.standard_normal((m, n))
    x = np.zeros(n)
    x[rng.choice(n, k, replace=False)] = rng.standard_normal(k)
    return A, A @ x


def test_worked_case(i2):
    poly, path = l0pd(*i2)
    assert [(e.support, e.card) for e in poly.edges] == [((), 0), ((1,), 1), ((0, 1), 2)]
    np.testing.assert_allclose([e.error for e in poly.edges], [25.0, 9.0, 0.0], atol=1e-12)
    assert poly.breakpoints == [math.inf, pytest.approx(16.0), pytest.approx(9.0), 0.0]
    assert path.lambdas == [pytest.approx(16.0), pytest.approx(9.0), 0.0]
    assert path.supports == [(), (1,), (0, 1)]
    assert all(path.continuous)


def test_zero_data():
    stats = L0pdStats()
    poly, path = l0pd(Dictionary(np.eye(3)), Observation(np.zeros(3)), stats=stats)
    assert poly.supports() == [()] and stats.iterations == 1
    assert path.supports == [()]


def test_invariants_every_iteration(rng):
    for _ in range(10):
        A, y = random_problem(rng, 20, 15)
        poly, _ = l0pd(A, y, check_each_step=True)
        assert poly.check_invariants() == []
        assert all(e.explored for e in poly.edges)


def test_dominance_and_equality_share():
    equal = 0
    trials = 30
    for seed in range(trials):
        A, y = sparse_noise_free(seed)
        _, path = l0pd(Dictionary(A), Observation(y))
        rep = check_dominance(exact_paths(A, y), path)
        assert rep.ok, rep.violations
        equal += rep.stats["curve_equal_points"] == rep.stats["dominance_points"]
    assert equal >= EQUAL_SHARE * trials


def test_pretest_skips_are_sound(rng):
    fired = {"add": 0, "rmv": 0}

    def check(poly, j, info):
        # exploration always takes the lowest-cardinality unexplored edge
        assert all(e.explored for e in poly.edges[:j])
        if info["s_add"] is not None and info["d_add"] < poly.breakpoints[j + 1]:
            fired["add"] += 1
            lo, hi = poly.intersect(LineS(info["s_add"].support, info["s_add"].error))
            assert not lo < hi
        if info["s_rmv"] is not None and info["d_rmv"] > poly.breakpoints[j]:
            fired["rmv"] += 1
            lo, hi = poly.intersect(LineS(info["s_rmv"].support, info["s_rmv"].error))
            assert not lo < hi

    for _ in range(15):
        A, y = random_problem(rng, 20, 12)
        l0pd(A, y, on_explore=check)
    assert fired["add"] > 0 and fired["rmv"] > 0


def test_early_stop_uses_upper_breakpoint(rng):
    A, y = random_problem(rng, 40, 30)
    lam1 = float(np.max((A.columns.T @ y.y) ** 2 / A.col_norms_sq))
    stop = 0.05 * lam1
    seen = []
    l0pd(A, y, StoppingRule(lambda_stop=stop), on_explore=lambda poly, j, info: seen.append(poly.breakpoints[j]))
    assert seen and all(v > stop for v in seen)
    poly, path = l0pd(A, y, StoppingRule(lambda_stop=stop))
    first = next((j for j, e in enumerate(poly.edges) if not e.explored), None)
    assert first is not None and poly.breakpoints[first] <= stop


def test_k_and_eps_stop(rng):
    A, y = random_problem(rng, 30, 20)
    poly, _ = l0pd(A, y, StoppingRule(k_stop=3))
    assert all(e.card < 3 for e in poly.edges if e.explored)
    poly, _ = l0pd(A, y, StoppingRule(eps_stop=0.5 * y.norm_sq))
    assert all(e.error > 0.5 * y.norm_sq for e in poly.edges if e.explored)


def test_iteration_cap(rng):
    A, y = random_problem(rng, 20, 12)
    with pytest.raises(IterCapExceeded) as exc:
        l0pd(A, y, StoppingRule(iter_cap=3))
    poly, path = exc.value.partial
    assert poly.check_invariants() == [] and path.supports[0] == ()


def test_explored_cards_staircase(rng):
    A, y = random_problem(rng, 25, 18)
    stats = L0pdStats()
    l0pd(A, y, stats=stats)
    assert stats.explored_cards[0] == 0
    assert stats.iterations == len(stats.explored_cards)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_polygon_below_its_explored_lines(seed):
    rng = np.random.default_rng(seed)
    A, y = random_problem(rng, 10, 7)
    poly, path = l0pd(A, y)
    assert poly.check_invariants() == []
    lams = np.linspace(0, path.lambdas[0] * 1.5, 50)[1:]
    np.testing.assert_allclose(path.values(lams), poly.values(lams), rtol=1e-12, atol=1e-12)
    # it is never above the CSBR curve at lambda where CSBR's support is also a polygon line
    c = csbr(A, y)
    for j, s in enumerate(c.supports):
        idx = poly.index_of(s)
        if idx is not None:
            assert poly.edges[idx].error == pytest.approx(c.errors[j], rel=1e-9, abs=1e-12)
