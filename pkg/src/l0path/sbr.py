"""Single Best Replacement descent for E(S) + lambda |S| at a fixed lambda."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dictionary import ActiveSetState, Dictionary, Observation
from .errors import CapExceeded, EmptySupport

ACCEPT_RTOL = 1e-12


@dataclass
class SbrOutcome:
    state: ActiveSetState
    delta_e_add: float
    ell_add: int | None
    replacements: int
    trace: list = field(default_factory=list)  # (move, atom, cost) with move in {"add", "rmv"}

    @property
    def support(self):
        return self.state.support

    @property
    def error(self) -> float:
        return self.state.error


def best_insertion(state: ActiveSetState, gains=None):
    """(delta_e_add, ell_add) of a state; ``(0.0, None)`` when no atom can be added."""
    if gains is None:
        gains = state.insertion_gains()
    finite = np.where(np.isfinite(gains), gains, -np.inf)
    if not np.any(np.isfinite(gains)):
        return 0.0, None
    i = int(np.argmax(finite))
    return max(float(finite[i]), 0.0), i


def best_removal(state: ActiveSetState):
    """(delta_e_rmv, ell_rmv): the cheapest removal, ties to the lowest index."""
    costs = state.removal_costs()
    if not costs:
        raise EmptySupport("removal requires a non-empty support")
    atom = min(costs, key=lambda a: (costs[a], a))
    return max(costs[atom], 0.0), atom


def delta_e_rmv(state: ActiveSetState) -> float:
    return best_removal(state)[0]


def ell_rmv(state: ActiveSetState) -> int:
    return best_removal(state)[1]


def sbr(
    dictionary: Dictionary,
    obs: Observation,
    lam: float,
    s_init=(),
    forbid_first_removal: int | None = None,
    max_iter: int | None = None,
    max_card: int | None = None,
    trace: bool = False,
    state: ActiveSetState | None = None,
) -> SbrOutcome:
    """Minimise E(S) + lam |S| by single best replacements from ``s_init``.

    Each iteration scores every insertion and removal and moves to the best
    one if it strictly lowers the cost. Ties go to the lowest atom index, and
    an insertion wins over a removal of equal cost. ``forbid_first_removal``
    excludes that atom's removal during the first iteration only.

    Raises
    ------
    CapExceeded
        When ``max_iter`` iterations or a support larger than ``max_card``
        would be needed; ``exc.partial`` holds the current outcome.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if state is None:
        state = ActiveSetState.from_support(dictionary, obs, s_init)
    if max_iter is None:
        max_iter = 20 * dictionary.n + 100
    slack = ACCEPT_RTOL * (1.0 + obs.norm_sq)
    moves = []
    it = 0
    while True:
        cost = state.error + lam * state.card
        gains = state.insertion_gains()
        add_cost, add_atom = np.inf, None
        if np.any(np.isfinite(gains)):
            g = np.where(np.isfinite(gains), gains, -np.inf)
            add_atom = int(np.argmax(g))
            add_cost = state.error - g[add_atom] + lam * (state.card + 1)
        rmv_cost, rmv_atom = np.inf, None
        costs = state.removal_costs()
        if it == 0 and forbid_first_removal is not None:
            costs.pop(int(forbid_first_removal), None)
        if costs:
            rmv_atom = min(costs, key=lambda a: (costs[a], a))
            rmv_cost = state.error + costs[rmv_atom] + lam * (state.card - 1)

        if add_cost <= rmv_cost:
            move, atom, new_cost = "add", add_atom, add_cost
        else:
            move, atom, new_cost = "rmv", rmv_atom, rmv_cost
        if atom is None or not new_cost < cost - slack:
            break
        if it >= max_iter or (move == "add" and max_card is not None and state.card + 1 > max_card):
            d_add, l_add = best_insertion(state, gains)
            partial = SbrOutcome(state, d_add, l_add, it, moves)
            raise CapExceeded(f"SBR cap reached after {it} replacements", partial=partial)
        state = state.insert(atom) if move == "add" else state.remove(atom)
        it += 1
        if trace:
            moves.append((move, atom, state.error + lam * state.card))

    d_add, l_add = best_insertion(state, gains)
    return SbrOutcome(state, d_add, l_add, it, moves)
