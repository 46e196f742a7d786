"""Seeded Monte Carlo engine for strategies against the two forecasters.

Forecasters:
  * FixedMW(eps): classical multiplicative weights. The engine advances the
    integer lattice state and derives the weight from closed form each
    round, so the float trajectory cannot drift.
  * AdaptiveMW: exponential weighting with the time-varying rate
    eta_t = sqrt(8 ln2 / t). The weight is tracked as a natural log-odds
    real; each round moves it by exactly -eta_t, 0, or +eta_t, which is
    exact in log-odds space.

Randomness: each episode owns a PCG64 generator seeded by a splitmix64 mix
of (master seed, episode index), so batches reproduce under any execution
schedule. Episodes are independent; aggregation is a deterministic fold in
episode-index order.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import (
    Action,
    ContractError,
    DomainError,
    GameParams,
    HonestOutcome,
    rho_of_index,
)
from .strategies import DpPolicy, FixedSequence, TwoState

_LN2 = math.log(2.0)
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class FixedMW:
    """Fixed-eps multiplicative weights forecaster."""

    eps: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must lie in (0, 1), got {self.eps}")


@dataclass(frozen=True)
class AdaptiveMW:
    """Exponential weighting with eta_t = sqrt(8 ln2 / t)."""


@dataclass
class EpisodeResult:
    """One simulated game path.

    `weights` has horizon+1 entries: the malicious weight entering each
    round, then the post-game weight. `hat_L` is the forecaster's cumulative
    loss; `L1` / `L2` count the experts' mistakes as exact integers.
    """

    losses: list
    hat_L: float
    L1: int
    L2: int
    weights: list
    seed: int
    actions: list = field(repr=False, default_factory=list)
    outcomes: list = field(repr=False, default_factory=list)
    forecaster: object = None


@dataclass(frozen=True)
class BatchStats:
    replications: int
    mean_avg_loss: float
    stderr: float
    regret_violations: int


class RegretCheck(NamedTuple):
    violation: bool
    slack: float


def eta_schedule(t: int) -> float:
    """Adaptive learning rate sqrt(8 ln2 / t); strictly decreasing."""
    if t < 1:
        raise DomainError(f"round index must be >= 1, got {t}")
    return math.sqrt(8.0 * _LN2 / t)


def adaptive_weight_update(p1: float, loss1: int, loss2: int, eta: float) -> float:
    """Renormalized weight after one exponential update with binary losses."""
    if not 0.0 < p1 < 1.0:
        raise DomainError(f"p1 must lie in (0, 1), got {p1}")
    if loss1 not in (0, 1) or loss2 not in (0, 1):
        raise DomainError("losses must be binary")
    if eta <= 0.0:
        raise DomainError(f"eta must be positive, got {eta}")
    if loss1 == loss2:
        return p1
    w1 = p1 * math.exp(-eta * loss1)
    w2 = (1.0 - p1) * math.exp(-eta * loss2)
    return w1 / (w1 + w2)


def regret_bound(n: int) -> float:
    """Path-wise regret bound of the adaptive schedule: 2 sqrt(n ln2 / 2) + sqrt(ln2 / 8)."""
    return 2.0 * math.sqrt(n * _LN2 / 2.0) + math.sqrt(_LN2 / 8.0)


def mix_seed(master_seed: int, index: int) -> int:
    """64-bit splitmix64 stream: the episode seed for (master seed, index)."""
    z = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _logistic(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _reject_bad_config(forecaster, strategy, params: GameParams):
    if isinstance(strategy, TwoState) and isinstance(forecaster, AdaptiveMW):
        raise DomainError(
            "the two-state strategy presumes the fixed-eps lattice;"
            " it is rejected under the adaptive forecaster"
        )
    if isinstance(forecaster, FixedMW) and forecaster.eps != params.eps:
        raise DomainError(
            f"forecaster eps {forecaster.eps} disagrees with game eps {params.eps}"
        )
    if isinstance(strategy, DpPolicy) and strategy.table.horizon != params.horizon:
        raise DomainError(
            f"policy table solved for horizon {strategy.table.horizon},"
            f" game horizon is {params.horizon}"
        )
    if isinstance(strategy, FixedSequence) and len(strategy.actions) < params.horizon:
        raise DomainError(
            f"scripted strategy covers {len(strategy.actions)} rounds,"
            f" game horizon is {params.horizon}"
        )


def run_episode(forecaster, strategy, params: GameParams, seed: int) -> EpisodeResult:
    """Play one seeded game of `params.horizon` rounds.

    Per round: draw the honest outcome Bernoulli(mu), query the strategy at
    the current (round, lattice state), record the forecaster loss and both
    experts' 0/1 losses, then update the weight by the forecaster's rule.
    Deterministic given the seed. Under the adaptive forecaster the lattice
    state handed to the strategy is the nominal +-1 counter of the same
    transitions; lattice-dependent strategies are rejected up front.
    """
    _reject_bad_config(forecaster, strategy, params)
    n, mu = params.horizon, params.mu
    rng = np.random.Generator(np.random.PCG64(seed))
    correct_draws = rng.random(n) < mu
    decide = strategy.decide
    adaptive = isinstance(forecaster, AdaptiveMW)

    losses = []
    actions = []
    outcomes = []
    weights = [params.rho0]
    L1 = 0
    L2 = 0
    k = 0
    rho = params.rho0
    if adaptive:
        etas = np.sqrt(8.0 * _LN2 / np.arange(1.0, n + 1.0))
        ell = math.log(params.rho0 / (1.0 - params.rho0))
    else:
        rho_cache = {0: params.rho0}

    for t in range(1, n + 1):
        action = decide(t, k)
        correct = bool(correct_draws[t - 1])
        if action is Action.LIE:
            L1 += 1
            loss = rho if correct else 1.0
            if correct:
                k += 1
                if adaptive:
                    ell -= etas[t - 1]
        else:
            loss = 0.0 if correct else 1.0 - rho
            if not correct:
                k -= 1
                if adaptive:
                    ell += etas[t - 1]
        if not correct:
            L2 += 1
        losses.append(loss)
        actions.append(action)
        outcomes.append(HonestOutcome.CORRECT if correct else HonestOutcome.WRONG)
        if adaptive:
            rho = _logistic(ell)
        else:
            rho = rho_cache.get(k)
            if rho is None:
                rho = rho_of_index(k, params)
                rho_cache[k] = rho
        weights.append(rho)

    return EpisodeResult(
        losses=losses,
        hat_L=math.fsum(losses),
        L1=L1,
        L2=L2,
        weights=weights,
        seed=seed,
        actions=actions,
        outcomes=outcomes,
        forecaster=forecaster,
    )


def check_regret_invariant(episode: EpisodeResult) -> RegretCheck:
    """Path-wise check that hat_L <= min(L1, L2) + regret_bound(N).

    The bound is deterministic per path under the adaptive forecaster;
    episodes from the fixed-eps forecaster are outside its contract.
    """
    if not isinstance(episode.forecaster, AdaptiveMW):
        raise ContractError("regret bound applies to adaptive-forecaster episodes only")
    n = len(episode.losses)
    limit = min(episode.L1, episode.L2) + regret_bound(n)
    return RegretCheck(violation=episode.hat_L > limit, slack=limit - episode.hat_L)


def run_batch(
    forecaster,
    strategy,
    params: GameParams,
    replications: int,
    master_seed: int,
    episode_sink=None,
) -> BatchStats:
    """Run seeded replications and aggregate mean / stderr of hat_L / N.

    Episode i gets seed mix_seed(master_seed, i). Aggregation is a Welford
    fold in episode-index order, so results do not depend on how episodes
    would be scheduled. Regret violations are counted under the adaptive
    forecaster only. `episode_sink`, when given, receives every
    EpisodeResult in index order (used for episode logging).
    """
    if replications < 1:
        raise DomainError(f"replications must be >= 1, got {replications}")
    _reject_bad_config(forecaster, strategy, params)
    n = params.horizon
    adaptive = isinstance(forecaster, AdaptiveMW)
    bound = regret_bound(n)
    mean = 0.0
    m2 = 0.0
    violations = 0
    for i in range(replications):
        episode = run_episode(forecaster, strategy, params, mix_seed(master_seed, i))
        x = episode.hat_L / n
        delta = x - mean
        mean += delta / (i + 1)
        m2 += delta * (x - mean)
        if adaptive and episode.hat_L > min(episode.L1, episode.L2) + bound:
            violations += 1
        if episode_sink is not None:
            episode_sink(episode)
    if replications > 1:
        stderr = math.sqrt(m2 / (replications - 1)) / math.sqrt(replications)
    else:
        stderr = 0.0
    return BatchStats(replications, mean, stderr, violations)


def write_episode_csv(episodes, path, digits: int | None = 9):
    """Per-round log rows t,action,outcome,rho,loss,hat_L,L1,L2.

    Episodes are written in order; cumulative columns restart with t=1 at
    each episode boundary.
    """

    def fmt(v):
        return repr(v) if digits is None else f"{v:.{digits}g}"

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "action", "outcome", "rho", "loss", "hat_L", "L1", "L2"])
        for episode in episodes:
            hat_l = 0.0
            l1 = 0
            l2 = 0
            for t, (action, outcome, loss) in enumerate(
                zip(episode.actions, episode.outcomes, episode.losses), start=1
            ):
                hat_l += loss
                l1 += action is Action.LIE
                l2 += outcome is HonestOutcome.WRONG
                writer.writerow(
                    [
                        t,
                        action.value,
                        outcome.value,
                        fmt(episode.weights[t - 1]),
                        fmt(loss),
                        fmt(hat_l),
                        l1,
                        l2,
                    ]
                )
