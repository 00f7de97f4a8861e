"""Finite two-player games induced by a contract and an action set.

Both agents are identical and the contract is symmetric, so a single payoff
matrix U describes the game: U[i, j] is the expected utility of an agent
playing action i while the other plays action j.  The module detects
super/submodularity in the productivity order, runs extremal best-response
dynamics, enumerates equilibria, and applies equilibrium-selection rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BestResponseCycleError, GameSizeError
from .model import ActionSet, Contract

SUPERMODULAR = "SUPERMODULAR"
SUBMODULAR = "SUBMODULAR"
BOTH = "BOTH"
NEITHER = "NEITHER"

PRINCIPAL_BEST = "PRINCIPAL_BEST"
PESSIMISTIC_PARETO = "PESSIMISTIC_PARETO"

# Best-response verification tolerance for equilibrium candidates.
EQ_TOL = 1e-9

# Default action-count cap for mixed-equilibrium enumeration.
MIXED_CAP = 12


@dataclass(frozen=True)
class InducedGame:
    """Normal form of the game a contract induces on an action set."""

    contract: Contract
    actions: ActionSet

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([a.prob for a in self.actions.actions], dtype=float)

    @cached_property
    def costs(self) -> np.ndarray:
        return np.array([a.cost for a in self.actions.actions], dtype=float)

    def payoff_column(self, j: int) -> np.ndarray:
        """Expected utilities of every own action against opponent action j."""
        w = self.contract
        q = self.probs[j]
        pay_success = q * w.w11 + (1.0 - q) * w.w10
        pay_failure = q * w.w01 + (1.0 - q) * w.w00
        return self.probs * pay_success + (1.0 - self.probs) * pay_failure - self.costs

    @cached_property
    def payoff(self) -> np.ndarray:
        """Full payoff matrix U[i, j]; built lazily (O(n^2) memory)."""
        w = self.contract
        q = self.probs
        pay_success = q * w.w11 + (1.0 - q) * w.w10
        pay_failure = q * w.w01 + (1.0 - q) * w.w00
        p = self.probs[:, None]
        return p * pay_success[None, :] + (1.0 - p) * pay_failure[None, :] - self.costs[:, None]

    def __len__(self) -> int:
        return len(self.actions)

    def to_json(self) -> dict:
        out = self.actions.to_json()
        out["payoff"] = self.payoff.tolist()
        return out


def induce_game(contract: Contract, actions: ActionSet) -> InducedGame:
    """Build the induced game; payoffs follow the bilinear expectation
    U(a_i, a_j) = E[wage | outcomes] - cost(a_i) with independent successes."""
    return InducedGame(contract, actions)


def expected_wage(contract: Contract, p_own: float, p_other: float) -> float:
    """Expected wage to an agent succeeding w.p. p_own against p_other."""
    w = contract
    return (
        p_own * p_other * w.w11
        + p_own * (1.0 - p_other) * w.w10
        + (1.0 - p_own) * p_other * w.w01
        + (1.0 - p_own) * (1.0 - p_other) * w.w00
    )


def check_modularity(game: InducedGame, tol: float = 1e-12) -> str:
    """Test increasing/decreasing differences over all ordered action pairs.

    Returns SUPERMODULAR, SUBMODULAR, BOTH (all differences vanish, e.g. any
    independent evaluation), or NEITHER.
    """
    asc = list(reversed(game.actions.ranking()))
    v = game.payoff[np.ix_(asc, asc)]
    m = len(asc)
    lo, hi = 0.0, 0.0
    iu, ju = np.triu_indices(m, 1)
    for i1 in range(m):
        for i2 in range(i1 + 1, m):
            d = v[i2] - v[i1]
            inc = d[ju] - d[iu]
            if inc.size:
                lo = min(lo, float(inc.min()))
                hi = max(hi, float(inc.max()))
    is_super = lo >= -tol
    is_sub = hi <= tol
    if is_super and is_sub:
        return BOTH
    if is_super:
        return SUPERMODULAR
    if is_sub:
        return SUBMODULAR
    return NEITHER


def _rank_positions(actions: ActionSet) -> np.ndarray:
    pos = np.empty(len(actions), dtype=int)
    for rank, idx in enumerate(actions.ranking()):
        pos[idx] = rank
    return pos


def max_best_response(game: InducedGame, j: int, rank_pos=None) -> int:
    """Largest best response (productivity order) to opponent action j."""
    if rank_pos is None:
        rank_pos = _rank_positions(game.actions)
    col = game.payoff_column(j)
    ties = np.flatnonzero(col == col.max())
    return int(ties[np.argmin(rank_pos[ties])])


def min_best_response(game: InducedGame, j: int, rank_pos=None) -> int:
    """Smallest best response (productivity order) to opponent action j."""
    if rank_pos is None:
        rank_pos = _rank_positions(game.actions)
    col = game.payoff_column(j)
    ties = np.flatnonzero(col == col.max())
    return int(ties[np.argmax(rank_pos[ties])])


def extremal_br_path(game: InducedGame, start: str = "MAX") -> tuple[int, list[int]]:
    """Iterate the extremal best-response map from the extremal action.

    From MAX, repeatedly apply the maximal best response starting at the
    largest action; from MIN, the minimal best response from the smallest.
    In a supermodular game the path is monotone and its limit is the
    maximal (resp. minimal) equilibrium action.  Raises
    BestResponseCycleError when a cycle is detected, which can only happen
    outside the supermodular class.
    """
    if start not in ("MAX", "MIN"):
        raise ValueError(f"start must be MAX or MIN, got {start!r}")
    rank_pos = _rank_positions(game.actions)
    br = max_best_response if start == "MAX" else min_best_response
    cur = game.actions.max_index if start == "MAX" else game.actions.min_index
    path = [cur]
    seen = {cur}
    for _ in range(len(game) + 1):
        nxt = br(game, cur, rank_pos)
        if nxt == cur:
            return cur, path
        if nxt in seen:
            raise BestResponseCycleError(path + [nxt])
        path.append(nxt)
        seen.add(nxt)
        cur = nxt
    raise BestResponseCycleError(path)  # unreachable: finite action set


def paired_br_limit(game: InducedGame) -> tuple[int, int]:
    """Limit of (a, b) -> (maxBR(b), minBR(a)) from (largest, smallest).

    For a submodular game both orderings of the limit pair are Nash
    equilibria and bracket every other equilibrium action.
    """
    rank_pos = _rank_positions(game.actions)
    a, b = game.actions.max_index, game.actions.min_index
    seen = {(a, b)}
    for _ in range((len(game) + 1) ** 2):
        nxt = (max_best_response(game, b, rank_pos), min_best_response(game, a, rank_pos))
        if nxt == (a, b):
            return a, b
        if nxt in seen:
            raise BestResponseCycleError([(a, b), nxt])
        seen.add(nxt)
        a, b = nxt
    raise BestResponseCycleError([(a, b)])


@dataclass(frozen=True)
class Profile:
    """A strategy profile; pure profiles carry their action-index pair."""

    x: tuple[float, ...]
    y: tuple[float, ...]
    indices: tuple[int, int] | None = None

    @property
    def is_pure(self) -> bool:
        return self.indices is not None

    @classmethod
    def pure(cls, i: int, j: int, n: int) -> "Profile":
        x = [0.0] * n
        y = [0.0] * n
        x[i] = 1.0
        y[j] = 1.0
        return cls(tuple(x), tuple(y), (i, j))


def agent_payoffs(game: InducedGame, profile: Profile) -> tuple[float, float]:
    u = game.payoff
    if profile.is_pure:
        i, j = profile.indices
        return float(u[i, j]), float(u[j, i])
    x = np.asarray(profile.x)
    y = np.asarray(profile.y)
    return float(x @ u @ y), float(y @ u @ x)


def principal_value(game: InducedGame, profile: Profile) -> float:
    """Expected output minus total wage bill under the profile.

    Wages are bilinear in the two success indicators, so mixed profiles
    reduce to the mean success probabilities.
    """
    x = np.asarray(profile.x)
    y = np.asarray(profile.y)
    px = float(x @ game.probs)
    py = float(y @ game.probs)
    w = game.contract
    return px + py - expected_wage(w, px, py) - expected_wage(w, py, px)


def verify_profile(game: InducedGame, profile: Profile, tol: float = EQ_TOL) -> bool:
    """Independent check: no pure deviation gains more than tol."""
    u = game.payoff
    x = np.asarray(profile.x)
    y = np.asarray(profile.y)
    ex1 = u @ y
    ex2 = u @ x
    return bool(x @ ex1 >= ex1.max() - tol and y @ ex2 >= ex2.max() - tol)


def enumerate_equilibria(
    game: InducedGame,
    mixed: bool = False,
    cap: int = MIXED_CAP,
    tol: float = EQ_TOL,
) -> list[Profile]:
    """All pure Nash profiles, plus strictly-mixed 2x2-support equilibria.

    Pure profiles come from an exhaustive best-response check.  With
    ``mixed=True`` (allowed up to ``cap`` actions) every support pair of size
    two per player is solved in closed form for the indifference mixture;
    candidates must mix strictly inside (0, 1) and survive the full
    unilateral-deviation check.  One-sided mixtures, which exist only on
    knife-edge payoff ties, are not enumerated.
    """
    n = len(game)
    if mixed and n > cap:
        raise GameSizeError(f"mixed enumeration capped at {cap} actions, got {n}")
    u = game.payoff
    colmax = u.max(axis=0)
    out: list[Profile] = []
    for i in range(n):
        for j in range(n):
            if u[i, j] >= colmax[j] - tol and u[j, i] >= colmax[i] - tol:
                out.append(Profile.pure(i, j, n))
    if not mixed:
        return out

    interior = 1e-9
    for i1 in range(n):
        for i2 in range(i1 + 1, n):
            for j1 in range(n):
                for j2 in range(j1 + 1, n):
                    # Opponent weight q on j1 making row player indifferent
                    # between i1 and i2; weight r on i1 symmetric for columns.
                    a1 = u[i1, j1] - u[i2, j1]
                    b1 = u[i2, j2] - u[i1, j2]
                    a2 = u[j1, i1] - u[j2, i1]
                    b2 = u[j2, i2] - u[j1, i2]
                    if abs(a1 + b1) < 1e-12 or abs(a2 + b2) < 1e-12:
                        continue
                    q = b1 / (a1 + b1)
                    r = b2 / (a2 + b2)
                    if not (interior < q < 1.0 - interior and interior < r < 1.0 - interior):
                        continue
                    x = [0.0] * n
                    y = [0.0] * n
                    x[i1], x[i2] = r, 1.0 - r
                    y[j1], y[j2] = q, 1.0 - q
                    prof = Profile(tuple(x), tuple(y))
                    if verify_profile(game, prof, tol):
                        out.append(prof)
    return out


@dataclass(frozen=True)
class EquilibriumReport:
    equilibria: list[Profile]
    selection: str
    selected: Profile
    principal_per_agent: float
    principal_total: float
    agent_payoffs: tuple[float, float] = field(default=(0.0, 0.0))


def select_and_value(
    game: InducedGame, equilibria: list[Profile], rule: str
) -> EquilibriumReport:
    """Apply an equilibrium-selection rule and value it for the principal.

    PRINCIPAL_BEST picks the equilibrium maximizing the principal's total.
    PESSIMISTIC_PARETO keeps the weakly Pareto-efficient equilibria (those no
    other equilibrium improves strictly for both agents) and then minimizes
    the principal's total.
    """
    if not equilibria:
        raise ValueError("equilibrium list is empty")
    if rule not in (PRINCIPAL_BEST, PESSIMISTIC_PARETO):
        raise ValueError(f"unknown selection rule {rule!r}")

    values = [principal_value(game, e) for e in equilibria]
    payoffs = [agent_payoffs(game, e) for e in equilibria]

    if rule == PRINCIPAL_BEST:
        best = max(range(len(equilibria)), key=lambda k: values[k])
        chosen = best
    else:
        efficient = [
            k
            for k in range(len(equilibria))
            if not any(
                payoffs[m][0] > payoffs[k][0] and payoffs[m][1] > payoffs[k][1]
                for m in range(len(equilibria))
            )
        ]
        chosen = min(efficient, key=lambda k: values[k])

    total = values[chosen]
    return EquilibriumReport(
        equilibria=list(equilibria),
        selection=rule,
        selected=equilibria[chosen],
        principal_per_agent=total / 2.0,
        principal_total=total,
        agent_payoffs=payoffs[chosen],
    )
