"""Continuation SBR: SBR solved at adaptively decreasing breakpoints."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .dictionary import ActiveSetState, Dictionary, Observation
from .errors import CapExceeded, IterCapExceeded
from .path import PathResult
from .sbr import best_insertion, sbr

log = logging.getLogger(__name__)

CLAMP_RTOL = 1e-12


@dataclass(frozen=True)
class StoppingRule:
    """Early stopping: lambda_j <= lambda_stop, |S_j| >= k_stop or E(S_j) <= eps_stop."""

    lambda_stop: float = 0.0
    k_stop: int | None = None
    eps_stop: float | None = None
    iter_cap: int = 100_000

    def __post_init__(self):
        if self.lambda_stop < 0:
            raise ValueError("lambda_stop must be non-negative")

    def hit(self, lam: float, card: int, error: float) -> bool:
        if lam <= self.lambda_stop:
            return True
        if self.k_stop is not None and card >= self.k_stop:
            return True
        if self.eps_stop is not None and error <= self.eps_stop:
            return True
        return False

    def to_dict(self) -> dict:
        return {"lambda_stop": self.lambda_stop, "k_stop": self.k_stop, "eps_stop": self.eps_stop}


def csbr(dictionary: Dictionary, obs: Observation, stop: StoppingRule | None = None) -> PathResult:
    """Approximate l0-penalized path by continuation over lambda.

    The first breakpoint is lambda_1 = max_i <y, a_i>^2 / ||a_i||^2. At each
    breakpoint SBR is warm-started from the previous support plus its best
    insertion (whose removal is forbidden in the first SBR iteration); the next
    breakpoint is the best insertion gain of the SBR output.

    A breakpoint is flagged continuous when SBR made no replacement there.
    If round-off makes the next breakpoint fail to decrease, it is clamped just
    below the current one and its index is listed in ``info["clamped"]``.
    """
    stop = stop or StoppingRule()
    root = ActiveSetState.empty(dictionary, obs)
    lam, ell = best_insertion(root)

    lambdas = [lam]
    supports = [()]
    errors = [root.error]
    coefs = [root.amplitudes()[[]]]
    continuous = []
    clamped = []
    replacements = []

    if ell is None or lam <= 0.0:
        return PathResult([0.0], [()], errors, coefs, [True], "csbr", dictionary.n,
                          info={"stop": stop.to_dict(), "clamped": [], "replacements": []})

    state = root.insert(ell)
    while lam > 0:
        if len(supports) > stop.iter_cap:
            partial = PathResult(lambdas, supports, errors, coefs, continuous + [True], "csbr", dictionary.n)
            raise IterCapExceeded(f"CSBR stopped after {stop.iter_cap} breakpoints", partial=partial)
        try:
            out = sbr(dictionary, obs, lam, state=state, forbid_first_removal=ell)
        except CapExceeded as exc:
            out = exc.partial
            log.warning("SBR cap reached at lambda=%g; keeping partial iterate", lam)
        s = out.state
        supports.append(s.support)
        errors.append(s.error)
        coefs.append(s.amplitudes()[list(s.support)])
        continuous.append(out.replacements == 0)
        replacements.append(out.replacements)

        nxt, ell = out.delta_e_add, out.ell_add
        if nxt >= lam:
            clamped.append(len(lambdas))
            nxt = lam * (1.0 - CLAMP_RTOL)
            log.debug("non-decreasing breakpoint after SBR at lambda=%g; clamped", lam)
        if ell is None:
            nxt = 0.0
        lambdas.append(nxt)
        lam = nxt
        if lam <= 0 or stop.hit(lam, s.card, s.error):
            break
        state = s.insert(ell)

    continuous.append(True)
    info = {"stop": stop.to_dict(), "clamped": clamped, "replacements": replacements}
    return PathResult(lambdas, supports, errors, coefs, continuous, "csbr", dictionary.n, info=info)
