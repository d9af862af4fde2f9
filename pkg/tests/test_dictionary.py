import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from l0path import ActiveSetState, Dictionary, Observation, build_dictionary
from l0path.dictionary import amplitudes, insert_atom, lstsq_error, remove_atom, trial_errors
from l0path.errors import AlreadyActive, DimensionMismatch, NotActive, RankDeficient, ZeroColumn
from l0path.problems import PRESETS, draw_instance, scenario_dictionary

from conftest import dense_error, random_problem


def test_identity_norms():
    assert list(build_dictionary(np.eye(2)).col_norms_sq) == [1.0, 1.0]


def test_lower_triangular_norms():
    d = build_dictionary(np.tril(np.ones((3, 3))))
    assert list(d.col_norms_sq) == [3.0, 2.0, 1.0]


def test_scenario_a_shape():
    assert scenario_dictionary(PRESETS["A"]).shape == (300, 282)


def test_dictionary_is_immutable():
    d = Dictionary(np.eye(3))
    with pytest.raises(ValueError):
        d.columns[0, 0] = 5.0


def test_zero_column_rejected():
    a = np.eye(3)
    a[:, 1] = 0
    with pytest.raises(ZeroColumn) as exc:
        Dictionary(a)
    assert exc.value.index == 1


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        ActiveSetState.empty(Dictionary(np.eye(3)), Observation([1.0, 2.0]))


def test_empty_state_error(i2):
    A, y = i2
    assert ActiveSetState.empty(A, y).error == 25.0
    assert ActiveSetState.empty(A, Observation([0.0, 0.0])).error == 0.0


def test_empty_state_scenario_e():
    inst = draw_instance(PRESETS["E"], 3)
    y = np.array(inst.y.y)
    assert ActiveSetState.empty(inst.dictionary, inst.y).error == pytest.approx(float(np.dot(y, y)), rel=1e-15)


def test_i2_insert_remove(i2):
    A, y = i2
    s = insert_atom(ActiveSetState.empty(A, y), 1)
    assert s.error == pytest.approx(9.0)
    s01 = insert_atom(s, 0)
    assert s01.error == pytest.approx(0.0, abs=1e-12)
    assert remove_atom(s01, 0).error == pytest.approx(9.0)
    np.testing.assert_allclose(amplitudes(s), [0.0, 4.0])
    np.testing.assert_allclose(amplitudes(ActiveSetState.empty(A, y)), [0.0, 0.0])


def test_i2_trial_errors(i2):
    A, y = i2
    e0 = ActiveSetState.empty(A, y)
    np.testing.assert_allclose(trial_errors(e0), [16.0, 9.0])
    full = ActiveSetState.from_support(A, y, (0, 1))
    np.testing.assert_allclose(trial_errors(full), [9.0, 16.0])


def test_already_active_and_not_active(i2):
    A, y = i2
    s = ActiveSetState.from_support(A, y, (1,))
    with pytest.raises(AlreadyActive):
        s.insert(1)
    with pytest.raises(NotActive):
        s.remove(0)


def test_rank_deficient_atom():
    a = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
    A = Dictionary(a)
    s = ActiveSetState.from_support(A, Observation([1.0, 2.0, 0.0]), (0, 1))
    with pytest.raises(RankDeficient) as exc:
        s.insert(2)
    assert exc.value.index == 2
    assert np.isinf(trial_errors(s)[2])
    with pytest.raises(RankDeficient):
        ActiveSetState.from_support(A, Observation([1.0, 2.0, 0.0]), (0, 1, 2))


def test_insert_matches_dense_solve(rng):
    A, y = random_problem(rng, 6, 5)
    for _ in range(20):
        k = rng.integers(0, 5)
        s = tuple(sorted(rng.choice(5, size=k, replace=False)))
        i = int(rng.choice([j for j in range(5) if j not in s]))
        st_ = ActiveSetState.from_support(A, y, s).insert(i)
        assert st_.error == pytest.approx(dense_error(A.columns, y.y, s + (i,)), rel=1e-9, abs=1e-12)


def test_remove_matches_dense_solve(rng):
    A, y = random_problem(rng, 8, 6)
    for _ in range(20):
        k = rng.integers(1, 7)
        order = [int(v) for v in rng.permutation(6)[:k]]
        st_ = ActiveSetState.empty(A, y)
        for i in order:
            st_ = st_.insert(i)
        i = int(rng.choice(order))
        rest = tuple(sorted(set(order) - {i}))
        assert st_.remove(i).error == pytest.approx(dense_error(A.columns, y.y, rest), rel=1e-9, abs=1e-12)


def test_remove_then_reinsert(rng):
    A, y = random_problem(rng, 8, 6)
    s = ActiveSetState.from_support(A, y, (0, 2, 3, 5))
    for i in s.support:
        assert s.remove(i).insert(i).error == pytest.approx(s.error, rel=1e-9)


def test_trial_errors_match_dense(rng):
    A, y = random_problem(rng, 7, 5)
    for s in [(), (1,), (0, 3), (1, 2, 4), (0, 1, 2, 3, 4)]:
        state = ActiveSetState.from_support(A, y, s)
        got = trial_errors(state)
        for i in range(5):
            nxt = tuple(sorted(set(s) ^ {i}))
            assert got[i] == pytest.approx(dense_error(A.columns, y.y, nxt), rel=1e-9, abs=1e-12)


def test_lstsq_error_agrees_with_pinv(rng):
    A, y = random_problem(rng, 9, 6)
    for s in [(), (2,), (0, 4, 5)]:
        assert lstsq_error(A.columns, y.y, s) == pytest.approx(dense_error(A.columns, y.y, s), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(3, 9), n=st.integers(2, 8), data=st.data())
def test_state_is_least_squares_fit(seed, m, n, data):
    rng = np.random.default_rng(seed)
    A, y = random_problem(rng, m, n)
    k = data.draw(st.integers(0, min(m, n)))
    order = [int(v) for v in rng.permutation(n)[:k]]
    state = ActiveSetState.empty(A, y)
    for i in order:
        state = state.insert(i)
    x = state.amplitudes()
    assert set(np.flatnonzero(x)) <= set(order)
    r = y.y - A.columns @ x
    assert float(r @ r) == pytest.approx(state.error, rel=1e-9, abs=1e-10)
    assert state.error == pytest.approx(dense_error(A.columns, y.y, order), rel=1e-8, abs=1e-10)
    # incremental and batch construction agree
    batch = ActiveSetState.from_support(A, y, order)
    assert batch.error == pytest.approx(state.error, rel=1e-8, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_gains_and_costs_are_error_differences(seed):
    rng = np.random.default_rng(seed)
    A, y = random_problem(rng, 8, 6)
    s = tuple(sorted(rng.choice(6, size=3, replace=False)))
    state = ActiveSetState.from_support(A, y, s)
    gains = state.insertion_gains()
    costs = state.removal_costs()
    for i in range(6):
        if i in s:
            assert np.isnan(gains[i])
            rest = tuple(sorted(set(s) - {i}))
            assert costs[i] == pytest.approx(dense_error(A.columns, y.y, rest) - state.error, rel=1e-8, abs=1e-10)
        else:
            assert gains[i] == pytest.approx(state.error - dense_error(A.columns, y.y, s + (i,)), rel=1e-8, abs=1e-10)
