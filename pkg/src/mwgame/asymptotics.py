"""Closed-form limiting objects and the finite-horizon convergence study.

In the rescaled coordinates (t, x), with x the log-odds of the malicious
weight in units of ln(1/eps), the negated scaled value solves a first-order
equation v_t + H(x, v_x) = 0 with a Hamiltonian that switches at the
interface x = 0:

    right half-line (x > 0):  H(p) = max(1-mu-mu*p, 1-mu+(1-mu)*p)
    left  half-line (x < 0):  H(p) = max(1-mu*p, (1-mu)*p)

Its solution is piecewise linear with kink lines x = (1-mu) t and
x = -mu t:

    v(t, x) = -(1-mu) t              for x >= (1-mu) t
    v(t, x) = -(1-mu^2) t + mu x     for -mu t <= x <= (1-mu) t
    v(t, x) = -t                     for x <= -mu t

Because the solution is piecewise linear, the residual check uses exact
branch derivatives rather than finite differences; a finite-difference mode
exists only as a cross-check. Points on the kink lines or the interface
have no classical derivatives and are rejected outright instead of being
assigned a one-sided value.

The interface Hamiltonian is the constrained maximum of the mixed running
cost over controls that keep the trajectory on x = 0; it equals 1 - mu^2,
attained at (alpha1, alpha2, c) = (0, 1, mu).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import dp
from .model import DomainError, GameParams, _check_unit
from .strategies import two_state_asymptotic


class Region(Enum):
    """Which half-line of the interface the Hamiltonian applies on."""

    RIGHT = "x > 0"
    LEFT = "x < 0"


KINK_EXCLUSION = 1e-9


def log_odds(rho: float, eps: float) -> float:
    """x = ln(1/rho - 1) / ln(1/eps); the inverse of rho = 1/(1+(1/eps)^x)."""
    _check_unit("rho", rho)
    _check_unit("eps", eps)
    return math.log(1.0 / rho - 1.0) / math.log(1.0 / eps)


def pde_solution(t: float, x: float, mu: float) -> float:
    """The piecewise-linear solution v(t, x); continuous across both kinks."""
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    _check_unit("mu", mu)
    if x >= (1.0 - mu) * t:
        return -(1.0 - mu) * t
    if x <= -mu * t:
        return -float(t)
    return -(1.0 - mu * mu) * t + mu * x


def hamiltonian(region: Region, p: float, mu: float) -> float:
    """Max-over-actions Hamiltonian on the given half-line, at slope p."""
    if region is Region.RIGHT:
        return max(1.0 - mu - mu * p, 1.0 - mu + (1.0 - mu) * p)
    if region is Region.LEFT:
        return max(1.0 - mu * p, (1.0 - mu) * p)
    raise DomainError(f"unknown region {region!r}")


def pde_residual(t: float, x: float, mu: float, method: str = "analytic") -> float:
    """v_t + H(x, v_x) at an off-kink point; identically zero for the solution.

    Derivatives come from the active linear branch. Raises DomainError
    within KINK_EXCLUSION of either kink line, of the interface x = 0, or
    for t <= 0. method="fd" uses central differences instead, as a
    step-size-dependent cross-check.
    """
    _check_unit("mu", mu)
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    d_top = x - (1.0 - mu) * t
    d_bottom = x + mu * t
    gap = min(abs(d_top), abs(d_bottom), abs(x))
    if gap <= KINK_EXCLUSION:
        raise DomainError(
            f"({t}, {x}) is within {KINK_EXCLUSION} of a kink line or the"
            " interface; derivatives are undefined there"
        )
    if method == "analytic":
        if d_top > 0.0:
            v_t, v_x = -(1.0 - mu), 0.0
        elif d_bottom < 0.0:
            v_t, v_x = -1.0, 0.0
        else:
            v_t, v_x = -(1.0 - mu * mu), mu
    elif method == "fd":
        h = min(1e-6, 0.25 * gap, 0.25 * t)
        v_t = (pde_solution(t + h, x, mu) - pde_solution(t - h, x, mu)) / (2.0 * h)
        v_x = (pde_solution(t, x + h, mu) - pde_solution(t, x - h, mu)) / (2.0 * h)
    else:
        raise DomainError(f"unknown residual method {method!r}")
    region = Region.RIGHT if x > 0.0 else Region.LEFT
    return v_t + hamiltonian(region, v_x, mu)


def tangential_hamiltonian(mu: float, grid_resolution: int):
    """Interface Hamiltonian by exhaustive grid search; returns (value, maximizer).

    Maximizes c(1-mu) + (1-c) alpha2 over (alpha1, alpha2, c) in [0,1]^3
    subject to c(alpha1+mu-1) + (1-c)(alpha2+mu-1) = 0. Per (alpha1, alpha2)
    grid node the constraint is linear in c, so c is solved exactly and
    discarded when outside [0,1]; no general solver is needed. Converges to
    1 - mu^2 at (0, 1, mu).
    """
    _check_unit("mu", mu)
    if grid_resolution < 2:
        raise DomainError(f"grid resolution must be >= 2, got {grid_resolution}")
    alpha = np.linspace(0.0, 1.0, grid_resolution)
    a1, a2 = np.meshgrid(alpha, alpha, indexing="ij")
    denom = a2 - a1
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (a2 + mu - 1.0) / denom
    feasible = (denom != 0.0) & (c >= 0.0) & (c <= 1.0)
    # denom == 0 is feasible only when alpha2 = 1-mu exactly; objective is
    # then 1-mu for every c, which never beats 1-mu^2.
    degenerate = (denom == 0.0) & (a2 + mu - 1.0 == 0.0)
    objective = np.where(feasible, c * (1.0 - mu) + (1.0 - c) * a2, -np.inf)
    objective[degenerate] = 1.0 - mu
    flat = int(np.argmax(objective))
    i, j = divmod(flat, grid_resolution)
    best_c = 0.5 if degenerate[i, j] else float(c[i, j])
    return float(objective[i, j]), (float(a1[i, j]), float(a2[i, j]), best_c)


@dataclass(frozen=True)
class BoundsReport:
    """Closed-form bounds on the per-round value for one parameter set."""

    mu: float
    eps: float
    rho: float
    lower: float
    upper: float
    pde_value_at_origin: float


def bounds_report(mu: float, eps: float, rho: float) -> BoundsReport:
    """Lower bound from the two-state rule, upper bound 1 - mu^2."""
    lower = two_state_asymptotic(mu, eps, rho)
    return BoundsReport(
        mu=mu,
        eps=eps,
        rho=rho,
        lower=lower,
        upper=1.0 - mu * mu,
        pde_value_at_origin=-pde_solution(1.0, 0.0, mu),
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    avg_value: float
    lower_bound: float
    upper_bound: float
    mu: float
    eps: float
    rho0: float


def convergence_study(mu, eps, rho0, horizons, max_cells=dp.DEFAULT_CELL_BUDGET):
    """Per-round solver value against both bounds over a ladder of horizons.

    Horizons must be strictly ascending. Each row is an independent solve;
    the study reports the empirical trend and deliberately asserts no limit
    value. O(N^2) work per row.
    """
    if list(horizons) != sorted(set(horizons)):
        raise DomainError("horizons must be strictly ascending")
    report = bounds_report(mu, eps, rho0)
    rows = []
    for n in horizons:
        params = GameParams(mu=mu, eps=eps, horizon=n, rho0=rho0)
        avg = dp.headline_value(params, max_cells=max_cells) / n
        rows.append(
            ConvergenceRow(
                n=n,
                avg_value=avg,
                lower_bound=report.lower,
                upper_bound=report.upper,
                mu=mu,
                eps=eps,
                rho0=rho0,
            )
        )
    return rows


def write_convergence_csv(rows, path_or_file, digits: int | None = 9):
    """Rows as CSV columns N,avg_value,lower_bound,upper_bound,mu,eps,rho0."""

    def fmt(v):
        return repr(v) if digits is None else f"{v:.{digits}g}"

    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(["N", "avg_value", "lower_bound", "upper_bound", "mu", "eps", "rho0"])
        for row in rows:
            writer.writerow(
                [
                    row.n,
                    fmt(row.avg_value),
                    fmt(row.lower_bound),
                    fmt(row.upper_bound),
                    fmt(row.mu),
                    fmt(row.eps),
                    fmt(row.rho0),
                ]
            )

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
