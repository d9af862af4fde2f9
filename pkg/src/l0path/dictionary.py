"""Dictionaries, observations and least-squares over active sets.

The active set keeps a lower-triangular Cholesky factor ``L`` of the Gram
matrix ``A_S^T A_S`` together with two cached solves,

    W = L^{-1} A_S^T A      (|S| x n)
    z = L^{-1} A_S^T y      (|S|,)

from which every single-replacement error E(S +/- {i}) follows in closed form.
Insertion appends one row to ``L``/``W``/``z``; removal deletes a row and
re-triangularises the trailing block with Givens rotations, so neither
refactors from scratch. Only :meth:`ActiveSetState.from_support` does.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import cholesky, solve_triangular

from .errors import AlreadyActive, DimensionMismatch, NotActive, RankDeficient, ZeroColumn

ZERO_COLUMN_RTOL = 1e-12
PIVOT_RTOL = 1e-10

Support = tuple  # strictly increasing tuple of atom indices


def as_support(indices: Iterable[int]) -> Support:
    """Canonical (sorted, duplicate-free) tuple form of an index set."""
    s = tuple(sorted(int(i) for i in indices))
    if len(set(s)) != len(s):
        raise ValueError(f"duplicate atom indices in {s}")
    return s


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class Dictionary:
    """Immutable dense m x n dictionary with cached column norms.

    Parameters
    ----------
    matrix : array_like, shape (m, n)
        Columns are the atoms.
    """

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatch(f"dictionary must be a non-empty 2-D matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("dictionary contains non-finite entries")
        norms_sq = np.einsum("ij,ij->j", a, a)
        scale = norms_sq.max() if norms_sq.size else 0.0
        # threshold on the norm, hence the squared tolerance on squared norms
        bad = np.flatnonzero(norms_sq <= (ZERO_COLUMN_RTOL**2) * scale) if scale > 0 else np.arange(a.shape[1])
        if bad.size:
            raise ZeroColumn(int(bad[0]))
        self._a = _readonly(a)
        self._norms_sq = _readonly(norms_sq)

    @property
    def columns(self) -> np.ndarray:
        return self._a

    @property
    def col_norms_sq(self) -> np.ndarray:
        return self._norms_sq

    @property
    def shape(self):
        return self._a.shape

    @property
    def m(self) -> int:
        return self._a.shape[0]

    @property
    def n(self) -> int:
        return self._a.shape[1]

    @property
    def max_card(self) -> int:
        return min(self.m, self.n)

    @cached_property
    def gram(self) -> np.ndarray:
        """Full Gram matrix A^T A, computed on first use."""
        return _readonly(self._a.T @ self._a)

    def __repr__(self):
        return f"Dictionary(m={self.m}, n={self.n})"


def build_dictionary(matrix) -> Dictionary:
    return Dictionary(matrix)


class Observation:
    """Immutable data vector y with its squared norm."""

    def __init__(self, y):
        v = np.asarray(y, dtype=float).reshape(-1)
        if v.size < 1:
            raise DimensionMismatch("observation vector is empty")
        self._y = _readonly(v)
        self._norm_sq = float(v @ v)

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def norm_sq(self) -> float:
        return self._norm_sq

    def __len__(self):
        return self._y.size


class ActiveSetState:
    """Least-squares fit of y on the atoms of a support S.

    Instances are treated as values: :meth:`insert` and :meth:`remove`
    return new states and leave ``self`` untouched.
    """

    __slots__ = ("dictionary", "obs", "_order", "_L", "_W", "_z", "_corr", "error")

    def __init__(self, dictionary, obs, order, L, W, z, corr, error):
        self.dictionary = dictionary
        self.obs = obs
        self._order = order  # atoms in Cholesky (insertion) order
        self._L = L
        self._W = W
        self._z = z
        self._corr = corr  # A^T y
        self.error = error

    # -- construction -----------------------------------------------------
    @classmethod
    def empty(cls, dictionary: Dictionary, obs: Observation) -> "ActiveSetState":
        if len(obs) != dictionary.m:
            raise DimensionMismatch(f"y has length {len(obs)} but the dictionary has {dictionary.m} rows")
        corr = dictionary.columns.T @ obs.y
        corr.setflags(write=False)
        n = dictionary.n
        return cls(dictionary, obs, (), np.zeros((0, 0)), np.zeros((0, n)), np.zeros(0), corr, obs.norm_sq)

    @classmethod
    def from_support(cls, dictionary: Dictionary, obs: Observation, support: Iterable[int]) -> "ActiveSetState":
        """State on ``support`` (atoms taken in increasing order).

        Factorizes the active Gram block in one go; falls back to one insertion
        at a time when a pivot is too small, so the failing atom is reported.
        """
        state = cls.empty(dictionary, obs)
        s = list(as_support(support))
        if not s:
            return state
        for i in s:
            if not 0 <= i < dictionary.n:
                raise IndexError(f"atom index {i} out of range [0, {dictionary.n})")
        G = dictionary.gram
        try:
            L = cholesky(G[np.ix_(s, s)], lower=True)
        except LinAlgError:
            L = None
        if L is None or len(s) > dictionary.max_card or np.any(np.diag(L) ** 2 <= PIVOT_RTOL * dictionary.col_norms_sq[s]):
            for i in s:
                state = state.insert(i)
            return state
        W = solve_triangular(L, G[s], lower=True)
        z = solve_triangular(L, state._corr[s], lower=True)
        return state._with(tuple(s), L, W, z)

    # -- accessors ----------------------------------------------------------
    @property
    def support(self) -> Support:
        return tuple(sorted(self._order))

    @property
    def card(self) -> int:
        return len(self._order)

    def __contains__(self, i) -> bool:
        return int(i) in self._order

    @property
    def chol(self) -> np.ndarray:
        """Cholesky factor of the active Gram matrix, in insertion order."""
        return self._L

    @property
    def insertion_order(self) -> tuple:
        return self._order

    def _coefs(self) -> np.ndarray:
        if not self._order:
            return np.zeros(0)
        return solve_triangular(self._L, self._z, lower=True, trans="T")

    def _residual(self, coefs) -> np.ndarray:
        if not self._order:
            return self.obs.y.copy()
        return self.obs.y - self.dictionary.columns[:, list(self._order)] @ coefs

    def amplitudes(self) -> np.ndarray:
        """Least-squares amplitudes as a length-n vector supported on S."""
        x = np.zeros(self.dictionary.n)
        if self._order:
            x[list(self._order)] = self._coefs()
        return x

    def residual(self) -> np.ndarray:
        return self._residual(self._coefs())

    # -- moves --------------------------------------------------------------
    def insert(self, i: int) -> "ActiveSetState":
        i = int(i)
        d = self.dictionary
        if not 0 <= i < d.n:
            raise IndexError(f"atom index {i} out of range [0, {d.n})")
        if i in self._order:
            raise AlreadyActive(i)
        k = len(self._order)
        if k + 1 > d.max_card:
            raise RankDeficient(i, pivot=0.0)
        l = self._W[:, i]
        pivot_sq = d.col_norms_sq[i] - l @ l
        if pivot_sq <= PIVOT_RTOL * d.col_norms_sq[i]:
            raise RankDeficient(i, pivot=float(pivot_sq))
        piv = np.sqrt(pivot_sq)

        L = np.zeros((k + 1, k + 1))
        L[:k, :k] = self._L
        L[k, :k] = l
        L[k, k] = piv
        w_new = (d.gram[i] - l @ self._W) / piv
        W = np.vstack([self._W, w_new])
        z = np.append(self._z, (self._corr[i] - l @ self._z) / piv)
        return self._with(self._order + (i,), L, W, z)

    def remove(self, i: int) -> "ActiveSetState":
        i = int(i)
        if i not in self._order:
            raise NotActive(i)
        p = self._order.index(i)
        k = len(self._order)
        L = np.delete(np.delete(self._L, p, axis=0), p, axis=1)
        W = np.delete(self._W, p, axis=0)
        z = np.delete(self._z, p)
        if p < k - 1:
            # trailing block [l32 | L33] is r x (r+1); rotate column 0 away
            col = self._L[p + 1 :, p].copy()
            blk = L[p:, p:]  # view: L33 (r x r)
            wrow = self._W[p].copy()
            zval = self._z[p]
            Wt = W[p:]
            zt = z[p:]
            r = k - 1 - p
            for t in range(r):
                a = col[t]
                if a == 0.0:
                    continue
                b = blk[t, t]
                rr = np.hypot(a, b)
                c, s = b / rr, a / rr
                ct = col[t:].copy()
                bt = blk[t:, t].copy()
                col[t:] = c * ct - s * bt
                blk[t:, t] = s * ct + c * bt
                w0 = wrow.copy()
                wrow = c * w0 - s * Wt[t]
                Wt[t] = s * w0 + c * Wt[t]
                z0 = zval
                zval = c * z0 - s * zt[t]
                zt[t] = s * z0 + c * zt[t]
        order = self._order[:p] + self._order[p + 1 :]
        return self._with(order, L, W, z)

    def _with(self, order, L, W, z) -> "ActiveSetState":
        new = ActiveSetState(self.dictionary, self.obs, order, L, W, z, self._corr, 0.0)
        if order:
            res = new._residual(new._coefs())
            new.error = float(res @ res)
        else:
            new.error = self.obs.norm_sq
        return new

    # -- single replacement trials -----------------------------------------
    def insertion_gains(self) -> np.ndarray:
        """E(S) - E(S+{i}) for every i not in S; NaN on active atoms, -inf when
        the atom is numerically dependent on S or S is already maximal."""
        d = self.dictionary
        gains = np.full(d.n, -np.inf)
        if len(self._order) >= d.max_card:
            gains[list(self._order)] = np.nan
            return gains
        if self._order:
            res = self.residual()
            rho = d.columns.T @ res
            pivots = d.col_norms_sq - np.einsum("ij,ij->j", self._W, self._W)
        else:
            rho = np.asarray(self._corr)
            pivots = np.array(d.col_norms_sq)
        ok = pivots > PIVOT_RTOL * d.col_norms_sq
        gains[ok] = rho[ok] ** 2 / pivots[ok]
        gains[list(self._order)] = np.nan
        return gains

    def removal_costs(self) -> dict:
        """E(S-{i}) - E(S) for each active atom i."""
        if not self._order:
            return {}
        x = self._coefs()
        k = len(self._order)
        Linv = solve_triangular(self._L, np.eye(k), lower=True)
        ginv_diag = np.einsum("ij,ij->j", Linv, Linv)
        costs = x**2 / ginv_diag
        return {atom: float(c) for atom, c in zip(self._order, costs)}

    def trial_errors(self) -> np.ndarray:
        """E(S +/- {i}) for every atom i; +inf for infeasible insertions."""
        gains = self.insertion_gains()
        out = np.where(np.isnan(gains), np.nan, self.error - gains)
        out[np.isneginf(gains)] = np.inf
        for atom, c in self.removal_costs().items():
            out[atom] = self.error + c
        return out

    def __repr__(self):
        return f"ActiveSetState(support={self.support}, error={self.error:.6g})"


def empty_state(dictionary: Dictionary, obs: Observation) -> ActiveSetState:
    return ActiveSetState.empty(dictionary, obs)


def insert_atom(state: ActiveSetState, i: int) -> ActiveSetState:
    return state.insert(i)


def remove_atom(state: ActiveSetState, i: int) -> ActiveSetState:
    return state.remove(i)


def trial_errors(state: ActiveSetState) -> np.ndarray:
    return state.trial_errors()


def amplitudes(state: ActiveSetState) -> np.ndarray:
    return state.amplitudes()


def lstsq_error(A: np.ndarray, y: np.ndarray, support: Sequence[int]) -> float:
    """Squared residual of the least-squares fit of y on A[:, support] (dense solve)."""
    y = np.asarray(y, dtype=float)
    if len(support) == 0:
        return float(y @ y)
    sub = np.asarray(A, dtype=float)[:, list(support)]
    coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
    r = y - sub @ coef
    return float(r @ r)
