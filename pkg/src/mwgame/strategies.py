"""Malicious-expert strategies and the exact value of the two-state rule.

Strategies are deterministic functions of (round index, lattice state).
That is less information than the full game history, but every strategy
analyzed here is Markov in the current weight, and the optimal rule
extracted by the solver lies in this class as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Action, DomainError, GameParams, StateError, _check_unit, g
from .dp import PolicyTable


class AlwaysLie:
    def decide(self, t: int, state: int) -> Action:
        return Action.LIE


class AlwaysTruth:
    def decide(self, t: int, state: int) -> Action:
        return Action.TRUTH


class TwoState:
    """Lie at the episode's starting weight (k=0), tell the truth one step
    down (k=1). Under the fixed-eps forecaster the induced chain never leaves
    those two states."""

    def decide(self, t: int, state: int) -> Action:
        if state == 0:
            return Action.LIE
        if state == 1:
            return Action.TRUTH
        raise StateError(f"two-state rule queried at k={state}, defined only on k in {{0, 1}}")


@dataclass(frozen=True)
class DpPolicy:
    """Play the solver's optimal action for the rounds that remain."""

    table: PolicyTable

    def decide(self, t: int, state: int) -> Action:
        return self.table.action_at(self.table.horizon - t + 1, state)


@dataclass(frozen=True)
class FixedSequence:
    """Scripted actions, one per round; handy for replay and fuzz tests."""

    actions: tuple

    def decide(self, t: int, state: int) -> Action:
        if not 1 <= t <= len(self.actions):
            raise StateError(f"scripted strategy has {len(self.actions)} rounds, asked for round {t}")
        return self.actions[t - 1]


def strategy_from_token(token: str, policy: PolicyTable | None = None):
    """Build a strategy from its CLI token: lie | truth | two-state | dp-policy."""
    if token == "lie":
        return AlwaysLie()
    if token == "truth":
        return AlwaysTruth()
    if token == "two-state":
        return TwoState()
    if token == "dp-policy":
        if policy is None:
            raise DomainError("dp-policy needs a solved policy table")
        return DpPolicy(policy)
    raise DomainError(f"unknown strategy token {token!r}")


@dataclass(frozen=True)
class ChainDistribution:
    """Distribution of the two-state chain over (rho, g(rho))."""

    p_rho: float
    p_grho: float


def chain_distribution(t: int, mu: float) -> ChainDistribution:
    """Chain law at round t: starts at rho, fully mixed to (1-mu, mu) from t=2 on.

    Both rows of the transition matrix equal (1-mu, mu), so mixing completes
    after a single step.
    """
    if t < 1:
        raise DomainError(f"round index must be >= 1, got {t}")
    _check_unit("mu", mu)
    if t == 1:
        return ChainDistribution(1.0, 0.0)
    return ChainDistribution(1.0 - mu, mu)


def two_state_asymptotic(mu: float, eps: float, rho: float) -> float:
    """Long-run per-round loss of the two-state rule: 1-mu+mu(1-mu)(rho-g(rho)).

    Strictly above 1-mu for interior parameters.
    """
    _check_unit("mu", mu)
    return (1.0 - mu) + mu * (1.0 - mu) * (rho - g(rho, eps))


def two_state_exact_value(params: GameParams, by_recursion: bool = False) -> float:
    """Expected cumulative loss of the two-state rule over the full horizon.

    The chain mixes in one step, so the exact value collapses to the closed
    form (1-mu+mu*rho0) + (N-1) * two_state_asymptotic. `by_recursion`
    evaluates the O(N) distribution recursion instead, kept as a cross-check
    of the closed form.
    """
    n, mu, rho = params.horizon, params.mu, params.rho0
    lie_at_rho = (1.0 - mu) + mu * rho
    if not by_recursion:
        return lie_at_rho + (n - 1) * two_state_asymptotic(mu, params.eps, rho)
    truth_at_grho = (1.0 - mu) * (1.0 - g(rho, params.eps))
    p_rho, p_grho = 1.0, 0.0
    per_round = []
    for _ in range(n):
        per_round.append(p_rho * lie_at_rho + p_grho * truth_at_grho)
        p_rho, p_grho = (
            p_rho * (1.0 - mu) + p_grho * (1.0 - mu),
            p_rho * mu + p_grho * mu,
        )
    return math.fsum(per_round)
