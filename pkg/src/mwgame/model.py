"""Primitive quantities of the two-expert prediction game.

A forecaster aggregates two experts by weighted average and suffers the
absolute loss. Expert 1 is malicious: it knows the true outcome every round
and either lies or tells the truth. Expert 2 is honest and correct with
probability ``mu`` independently each round. Only the agreement between the
honest expert and the truth enters losses and weight updates, so a round is
fully described by an (Action, HonestOutcome) pair.

Under the fixed-eps multiplicative weights update, the malicious weight
moves on a discrete log-odds lattice: the integer state ``k`` carries weight

    rho(k) = 1 / (1 + (1/rho0 - 1) * eps**(-k)),

with k increasing by one after (lie, correct), decreasing by one after
(truth, wrong), and unchanged otherwise. State is carried as ``k`` and the
weight recomputed from closed form on demand, so repeated updates cannot
drift.

Everything here is a pure function of its arguments; values are immutable
and safe to share across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class DomainError(ValueError):
    """A parameter lies outside its valid domain."""


class ResourceError(RuntimeError):
    """A computation exceeds the configured size budget."""


class StateError(RuntimeError):
    """A strategy was queried at a state it is not defined on."""


class ContractError(RuntimeError):
    """An operation was applied to a value that violates its contract."""


class Action(Enum):
    TRUTH = "truth"
    LIE = "lie"


class HonestOutcome(Enum):
    """Whether the honest expert's prediction agreed with the truth."""

    CORRECT = "correct"
    WRONG = "wrong"


# Lattice states are plain integers: the signed log-odds offset from rho0
# in units of ln(1/eps).
LatticeState = int


@dataclass(frozen=True)
class GameParams:
    """One game instance: honest accuracy, learning parameter, horizon, start weight."""

    mu: float
    eps: float
    horizon: int
    rho0: float

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise DomainError(f"mu must lie in (0, 1), got {self.mu}")
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0.0 < self.rho0 < 1.0:
            raise DomainError(f"rho0 must lie in (0, 1), got {self.rho0}")
        if not (isinstance(self.horizon, int) and self.horizon >= 1):
            raise DomainError(f"horizon must be a positive integer, got {self.horizon}")


def validate_params(mu, eps, horizon, rho0) -> GameParams:
    """Validate and bundle (mu, eps, horizon, rho0); raises DomainError."""
    return GameParams(mu=mu, eps=eps, horizon=horizon, rho0=rho0)


def _check_unit(name, value):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {value}")


def g(rho: float, eps: float) -> float:
    """Post-round malicious weight after (lie, correct): g(p) = 1/(1+(1/p-1)/eps).

    Strictly decreases the weight for eps < 1.
    """
    _check_unit("rho", rho)
    _check_unit("eps", eps)
    return 1.0 / (1.0 + (1.0 / rho - 1.0) / eps)


def g_inv(rho: float, eps: float) -> float:
    """Post-round malicious weight after (truth, wrong): the inverse of g.

    g_inv(p) = 1/(1+(1/p-1)*eps); strictly increases the weight.
    """
    _check_unit("rho", rho)
    _check_unit("eps", eps)
    return 1.0 / (1.0 + (1.0 / rho - 1.0) * eps)


def rho_of_index(k: int, params: GameParams) -> float:
    """Weight at lattice state k: rho(0) = rho0, rho(k+1) = g(rho(k)).

    Evaluated in log-odds form, so it stays accurate for large |k|; results
    may round to subnormals or to exactly 0.0/1.0 far out on the lattice.
    """
    z = math.log(1.0 / params.rho0 - 1.0) + k * math.log(1.0 / params.eps)
    # stable logistic of -z
    if z >= 0.0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def round_loss(action: Action, outcome: HonestOutcome, rho: float) -> float:
    """Forecaster loss for one round at malicious weight rho."""
    _check_unit("rho", rho)
    if action is Action.LIE:
        return rho if outcome is HonestOutcome.CORRECT else 1.0
    return 0.0 if outcome is HonestOutcome.CORRECT else 1.0 - rho


def expected_loss(action: Action, rho: float, mu: float) -> float:
    """Expected one-round loss: lie -> 1-mu+mu*rho, truth -> (1-mu)(1-rho).

    The lie branch exceeds the truth branch by exactly rho.
    """
    _check_unit("rho", rho)
    _check_unit("mu", mu)
    if action is Action.LIE:
        return (1.0 - mu) + mu * rho
    return (1.0 - mu) * (1.0 - rho)


def step(state: LatticeState, action: Action, outcome: HonestOutcome) -> LatticeState:
    """Lattice transition: (lie, correct) -> k+1, (truth, wrong) -> k-1, else k."""
    if action is Action.LIE and outcome is HonestOutcome.CORRECT:
        return state + 1
    if action is Action.TRUTH and outcome is HonestOutcome.WRONG:
        return state - 1
    return state
