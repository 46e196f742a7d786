"""Exact backward induction for the malicious expert on the fixed-eps lattice.

The value recursion, with t rounds remaining at lattice state k of weight
rho = rho(k), is

    V(t+1, k) = max( (1-mu+mu*rho)   + mu*V(t, k+1)     + (1-mu)*V(t, k),
                     (1-mu)(1-rho)   + (1-mu)*V(t, k-1) + mu*V(t, k) ),

with V(0, .) = 0. Histories reaching the same (t, k) share their
continuation, so the reachable set is the triangle |k| <= horizon - t and
the solve costs O(N^2) cells instead of the O(4^N) game tree;
`brute_force_value` re-derives the value from the raw tree precisely to
validate that merge.

Each level depends only on the previous one, so `headline_value` keeps two
rolling rows (O(N) memory) while `solve` retains every level for policy
extraction and cell queries. Levels are internally computed with vectorized
slices; cells within one level are independent.
"""
from __future__ import annotations

import csv
import math

import numpy as np

from .model import Action, DomainError, GameParams, ResourceError, g, g_inv, rho_of_index

# (horizon+1)^2 cells; 25e6 keeps a full table plus policy under ~250 MB.
DEFAULT_CELL_BUDGET = 25_000_000

BRUTE_FORCE_MAX_HORIZON = 14


class ValueTable:
    """Triangular table of V(t, k) for 0 <= t <= horizon, |k| <= horizon - t."""

    def __init__(self, params: GameParams, levels):
        self.params = params
        self.horizon = params.horizon
        self._levels = levels

    def value_at(self, t: int, k: int) -> float:
        if not 0 <= t <= self.horizon:
            raise IndexError(f"round index {t} outside [0, {self.horizon}]")
        m = self.horizon - t
        if abs(k) > m:
            raise IndexError(f"state {k} outside the reachable triangle |k| <= {m} at t={t}")
        return float(self._levels[t][k + m])

    @property
    def final_value(self) -> float:
        """The headline value V(horizon, k=0)."""
        return self.value_at(self.horizon, 0)

    def average_value(self) -> float:
        """Per-round value V(horizon, 0) / horizon."""
        return self.final_value / self.horizon

    def cells(self):
        """Yield (t, k, value) over every stored cell."""
        for t in range(self.horizon + 1):
            m = self.horizon - t
            level = self._levels[t]
            for k in range(-m, m + 1):
                yield t, k, float(level[k + m])


class PolicyTable:
    """Maximizing action per cell, for 1 <= t <= horizon; ties resolve to lie."""

    def __init__(self, params: GameParams, lie_levels):
        self.params = params
        self.horizon = params.horizon
        self._lie_levels = lie_levels  # index t-1: bool array, True where lie is optimal

    def action_at(self, t: int, k: int) -> Action:
        if not 1 <= t <= self.horizon:
            raise IndexError(f"round index {t} outside [1, {self.horizon}]")
        m = self.horizon - t
        if abs(k) > m:
            raise IndexError(f"state {k} outside the reachable triangle |k| <= {m} at t={t}")
        return Action.LIE if self._lie_levels[t - 1][k + m] else Action.TRUTH


def _lattice_arrays(params: GameParams, kmax: int):
    """rho(k) and the two one-round expected losses for k in [-kmax, kmax]."""
    ks = np.arange(-kmax, kmax + 1, dtype=np.float64)
    z = math.log(1.0 / params.rho0 - 1.0) + ks * math.log(1.0 / params.eps)
    rho = np.empty_like(z)
    pos = z >= 0.0
    e = np.exp(-z[pos])
    rho[pos] = e / (1.0 + e)
    rho[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
    lie_loss = (1.0 - params.mu) + params.mu * rho
    truth_loss = (1.0 - params.mu) * (1.0 - rho)
    return rho, lie_loss, truth_loss


def _check_budget(params: GameParams, max_cells: int):
    n = params.horizon
    cells = (n + 1) * (n + 1)
    if cells > max_cells:
        raise ResourceError(
            f"horizon {n} needs {cells} cells, over the budget of {max_cells}"
        )


def _backward(params: GameParams, keep_levels: bool):
    n, mu = params.horizon, params.mu
    _, lie_loss, truth_loss = _lattice_arrays(params, n)
    prev = np.zeros(2 * n + 1)
    value_levels = [prev] if keep_levels else None
    lie_levels = [] if keep_levels else None
    for t in range(1, n + 1):
        m = n - t
        lo, hi = n - m, n + m + 1
        stay = prev[1:-1]
        lie = lie_loss[lo:hi] + mu * prev[2:] + (1.0 - mu) * stay
        truth = truth_loss[lo:hi] + (1.0 - mu) * prev[:-2] + mu * stay
        take_lie = lie >= truth
        cur = np.where(take_lie, lie, truth)
        if keep_levels:
            value_levels.append(cur)
            lie_levels.append(take_lie)
        prev = cur
    return value_levels, lie_levels, float(prev[0])


def solve(params: GameParams, max_cells: int = DEFAULT_CELL_BUDGET):
    """Solve the full triangle; returns (ValueTable, PolicyTable).

    O(N^2) time and memory. Raises ResourceError when (N+1)^2 exceeds
    `max_cells`.
    """
    _check_budget(params, max_cells)
    value_levels, lie_levels, _ = _backward(params, keep_levels=True)
    return ValueTable(params, value_levels), PolicyTable(params, lie_levels)


def headline_value(params: GameParams, max_cells: int = DEFAULT_CELL_BUDGET) -> float:
    """V(horizon, k=0) alone, via two rolling rows (O(N) memory, O(N^2) time)."""
    _check_budget(params, max_cells)
    _, _, value = _backward(params, keep_levels=False)
    return value


def brute_force_value(params: GameParams) -> float:
    """Maximal expected cumulative loss by direct recursion over the game tree.

    Carries the floating weight through chained g / g_inv applications and
    re-derives every history path from scratch (no memo table, no lattice
    merge), which is what makes it an independent check on `solve`.
    Exponential in the horizon; refuses N > 14.
    """
    if params.horizon > BRUTE_FORCE_MAX_HORIZON:
        raise ResourceError(
            f"game tree with horizon {params.horizon} is over the"
            f" brute-force limit of {BRUTE_FORCE_MAX_HORIZON}"
        )
    mu, eps = params.mu, params.eps

    def visit(t, rho):
        if t == 0:
            return 0.0
        stay = visit(t - 1, rho)
        lie = (1.0 - mu) + mu * rho + mu * visit(t - 1, g(rho, eps)) + (1.0 - mu) * stay
        truth = (1.0 - mu) * (1.0 - rho) + (1.0 - mu) * visit(t - 1, g_inv(rho, eps)) + mu * stay
        return lie if lie >= truth else truth

    return visit(params.horizon, params.rho0)


def write_tables_csv(values: ValueTable, policy, path, digits: int | None = 9):
    """Serialize value and policy tables as rows t,k,rho,value,action.

    Rows at t=0 (and all rows when `policy` is None) leave the action blank.
    `digits` is the significant-digit count; None writes full precision.
    """

    def fmt(v):
        return repr(v) if digits is None else f"{v:.{digits}g}"

    params = values.params
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "k", "rho", "value", "action"])
        for t, k, value in values.cells():
            action = "" if t == 0 or policy is None else policy.action_at(t, k).value
            writer.writerow([t, k, fmt(rho_of_index(k, params)), fmt(value), action])


def _self_consistency_residual(values: ValueTable) -> float:
    """Max |stored cell - recursion recomputed from stored continuations|."""
    params = values.params
    mu = params.mu
    worst = 0.0
    for t, k, stored in values.cells():
        if t == 0:
            worst = max(worst, abs(stored))
            continue
        rho = rho_of_index(k, params)
        stay = values.value_at(t - 1, k)
        lie = (1.0 - mu) + mu * rho + mu * values.value_at(t - 1, k + 1) + (1.0 - mu) * stay
        truth = (1.0 - mu) * (1.0 - rho) + (1.0 - mu) * values.value_at(t - 1, k - 1) + mu * stay
        worst = max(worst, abs(stored - max(lie, truth)))
    return worst
