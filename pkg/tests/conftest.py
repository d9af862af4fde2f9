import numpy as np
import pytest

from l0path import Dictionary, Observation


def dense_error(A, y, support):
    """Independent least-squares error through the pseudo-inverse."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    s = list(support)
    if not s:
        return float(y @ y)
    x = np.linalg.pinv(A[:, s]) @ y
    r = y - A[:, s] @ x
    return float(r @ r)


def forward_ols(A, y, steps):
    """Greedy forward selection by exhaustive dense re-solves."""
    chosen = []
    for _ in range(steps):
        best, best_e = None, None
        for i in range(A.shape[1]):
            if i in chosen:
                continue
            e = dense_error(A, y, chosen + [i])
            if best_e is None or e < best_e:
                best, best_e = i, e
        chosen.append(best)
    return chosen


def random_problem(rng, m, n):
    A = rng.standard_normal((m, n))
    y = rng.standard_normal(m)
    return Dictionary(A), Observation(y)


@pytest.fixture
def i2():
    return Dictionary(np.eye(2)), Observation([3.0, 4.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {ok} {detail}")
