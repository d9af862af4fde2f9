"""Approximate regularization paths shared by CSBR and l0-PD."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .dictionary import as_support
from .errors import OutOfRange


@dataclass
class PathResult:
    """Supports S_0 = {} , S_1, ..., S_J and breakpoints lambda_1 > ... > lambda_{J+1}.

    ``supports[j]`` is the solution on ``(lambdas[j], lambdas[j-1]]`` with
    ``lambdas[-1]`` read as +inf, so ``supports[0]`` covers ``(lambda_1, inf)``.
    ``continuous[j]`` tells whether the curve is continuous at ``lambdas[j]``.
    """

    lambdas: list
    supports: list
    errors: list
    coefs: list  # least-squares amplitudes aligned with each support
    continuous: list
    producer: str
    n_atoms: int
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.supports = [as_support(s) for s in self.supports]
        if len(self.lambdas) != len(self.supports):
            raise ValueError("lambdas and supports must have the same length")
        if self.supports and self.supports[0] != ():
            raise ValueError("the first support of a path must be empty")
        if any(not b < a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ValueError("breakpoints must be strictly decreasing")
        if self.lambdas and self.lambdas[-1] < 0:
            raise ValueError("breakpoints must be non-negative")

    def __len__(self):
        return len(self.supports)

    @property
    def cards(self) -> list:
        return [len(s) for s in self.supports]

    @property
    def lambda_min(self) -> float:
        return self.lambdas[-1]

    def segment_index(self, lam: float) -> int:
        """Index j such that lam lies in (lambda_{j+1}, lambda_j]."""
        if not lam > 0:
            raise OutOfRange(f"lambda must be positive, got {lam}")
        if not lam > self.lambdas[-1]:
            raise OutOfRange(f"lambda={lam} is at or below the computed range (> {self.lambdas[-1]})")
        # lambdas is decreasing; count breakpoints that are >= lam
        neg = [-v for v in self.lambdas]
        return bisect.bisect_right(neg, -lam)

    def values(self, lams) -> np.ndarray:
        """Approximate l0-curve value E(S_j) + lambda |S_j| at each lambda."""
        out = []
        for lam in np.atleast_1d(lams):
            j = self.segment_index(float(lam))
            out.append(self.errors[j] + lam * len(self.supports[j]))
        return np.asarray(out)

    def amplitudes(self, j: int) -> np.ndarray:
        x = np.zeros(self.n_atoms)
        if self.supports[j]:
            x[list(self.supports[j])] = self.coefs[j]
        return x

    def to_dict(self) -> dict:
        return {
            "producer": self.producer,
            "n_atoms": self.n_atoms,
            "lambdas": [float(v) for v in self.lambdas],
            "supports": [list(s) for s in self.supports],
            "errors": [float(e) for e in self.errors],
            "amplitudes": [[float(v) for v in c] for c in self.coefs],
            "continuous": [bool(c) for c in self.continuous],
            "info": self.info,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PathResult":
        return cls(
            lambdas=list(data["lambdas"]),
            supports=[tuple(s) for s in data["supports"]],
            errors=list(data["errors"]),
            coefs=[np.asarray(c, dtype=float) for c in data["amplitudes"]],
            continuous=list(data["continuous"]),
            producer=data["producer"],
            n_atoms=int(data["n_atoms"]),
            info=dict(data.get("info", {})),
        )


def solution_at(path: PathResult, lam: float):
    """Support and amplitude vector of the path segment containing ``lam``."""
    j = path.segment_index(lam)
    return path.supports[j], path.amplitudes(j)


def lambda_max(corr: np.ndarray, col_norms_sq: np.ndarray) -> float:
    """Largest breakpoint max_i <y, a_i>^2 / ||a_i||^2."""
    v = np.asarray(corr) ** 2 / np.asarray(col_norms_sq)
    return float(v.max()) if v.size else 0.0


def segment_table(path: PathResult) -> str:
    rows = ["lambda_hi         lambda_lo         |S|  E(S)"]
    for j, s in enumerate(path.supports):
        hi = math.inf if j == 0 else path.lambdas[j - 1]
        lo = path.lambdas[j]
        rows.append(f"{hi:<17.6g} {lo:<17.6g} {len(s):<4d} {path.errors[j]:.6g}")
    return "\n".join(rows)
