"""occseg: occupational segregation through homophilous job-contact networks.

A library and CLI that computes labor-market equilibria of a two-group,
two-occupation education game with network-driven job finding, classifies
their stability, evaluates first- and second-best welfare policies,
reproduces the benchmark calibration and its sensitivities, and validates
the reduced-form employment function against a finite-population Monte
Carlo network simulation.
"""

__version__ = "0.1.0"

from .calibration import (
    DEFAULT_SPLIT_C1,
    CalibrationTargets,
    calibrate,
    find_alpha_hat,
)
from .equilibrium import (
    DynamicsTrace,
    EquilibriumCheck,
    EquilibriumReport,
    ProfileKind,
    Regime,
    Stability,
    check_equilibrium,
    classify_profile,
    classify_regime,
    enumerate_equilibria,
    find_mu_hat,
    jacobian_gaps,
    partial_roots,
    probed_gaps,
    simulate_dynamics,
    solve_partial,
    solve_symmetric,
    stability,
    symmetric_roots,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    InfeasibleTargetError,
    InvalidSplitError,
    MultipleRootsError,
    NoRootError,
    OccsegError,
    RelabelRequiredError,
    SingularSupplyError,
)
from .model import (
    CARA,
    CobbDouglas,
    MarketState,
    ModelParams,
    StrategyProfile,
    check_assumptions,
    employment_prob,
    group_employment_rates,
    labor_supplies,
    market_state,
    payoff_gaps,
    tie_probability,
    utility,
    wage_gap,
    wages,
)
from .sensitivity import ElasticityRow, ElasticityTable, elasticities
from .welfare import (
    FirstBest,
    WelfareReport,
    concavity_condition,
    first_best,
    integration_gain,
    maximin_gain,
    welfare,
    welfare_components,
    welfare_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
