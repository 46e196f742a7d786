"""Two-expert prediction game with a malicious expert.

Exact finite-horizon dynamic programming for the malicious expert's value
against a fixed-eps multiplicative weights forecaster, seeded Monte Carlo
simulation against fixed and adaptive forecasters, and the closed-form
asymptotic bounds from the limiting first-order equation.
"""
from .model import (
    Action,
    ContractError,
    DomainError,
    GameParams,
    HonestOutcome,
    LatticeState,
    ResourceError,
    StateError,
    expected_loss,
    g,
    g_inv,
    rho_of_index,
    round_loss,
    step,
    validate_params,
)
from .dp import (
    PolicyTable,
    ValueTable,
    brute_force_value,
    headline_value,
    solve,
    write_tables_csv,
)
from .strategies import (
    AlwaysLie,
    AlwaysTruth,
    ChainDistribution,
    DpPolicy,
    FixedSequence,
    TwoState,
    chain_distribution,
    strategy_from_token,
    two_state_asymptotic,
    two_state_exact_value,
)
from .simulate import (
    AdaptiveMW,
    BatchStats,
    EpisodeResult,
    FixedMW,
    RegretCheck,
    adaptive_weight_update,
    check_regret_invariant,
    eta_schedule,
    mix_seed,
    regret_bound,
    run_batch,
    run_episode,
    write_episode_csv,
)
from .asymptotics import (
    BoundsReport,
    ConvergenceRow,
    Region,
    bounds_report,
    convergence_study,
    hamiltonian,
    log_odds,
    pde_residual,
    pde_solution,
    tangential_hamiltonian,
    write_convergence_csv,
)

__version__ = "0.1.0"
