"""Closed-form primitives of the job-contact-network labor market.

Two social groups (Reds and Greens) of equal measure 1/2 each choose one of
two educations (A or B), form friendship ties at rates that rise with shared
group and shared education, and find jobs at a rate that grows with the
measure of same-education friends.  Everything in this module is a pure
function of a parameter set and an education profile: employment rates,
effective labor supplies, marginal-product wages, CARA utilities, expected
payoffs and payoff gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import SingularSupplyError

#: Absolute tolerance for comparisons against zero.
ZERO_TOL = 1e-12


class CobbDouglas:
    """Constant-returns production ``theta * L_A**alpha * L_B**(1-alpha)``.

    Only the marginal products matter for the model; they are the wages paid
    to A- and B-workers.
    """

    def __init__(self, theta: float, alpha: float):
        self.theta = theta
        self.alpha = alpha

    def wage_A(self, L_A: float, L_B: float) -> float:
        return self.theta * self.alpha * (L_B / L_A) ** (1.0 - self.alpha)

    def wage_B(self, L_A: float, L_B: float) -> float:
        return self.theta * (1.0 - self.alpha) * (L_A / L_B) ** self.alpha


class CARA:
    """Constant absolute risk aversion utility ``1 - exp(-rho * w)``."""

    def __init__(self, rho: float):
        self.rho = rho

    def __call__(self, w: float) -> float:
        return 1.0 - math.exp(-self.rho * w)


@dataclass(frozen=True)
class ModelParams:
    """Structural parameters.

    Tie-formation rates: a cross-group, cross-education pair links with
    probability ``p``; sharing the education adds ``kappa``; sharing the
    group adds ``lam``.  Jobs arrive directly at rate ``c0`` and at rate
    ``c1`` per unit measure of same-education friends.  Production is
    Cobb-Douglas with scale ``theta`` and A-share ``alpha``; utility is CARA
    with coefficient ``rho``.

    Only the products ``c1*(p+kappa)`` and ``c1*lam`` are identified by the
    reduced-form employment function, so :meth:`from_products` stores
    ``c1 = 1`` and folds the products into ``p`` and ``lam``.  Such folded
    parameters are not genuine probabilities (``has_physical_split`` is
    False) and cannot seed a finite network.
    """

    p: float
    kappa: float
    lam: float
    c0: float
    c1: float
    theta: float
    alpha: float
    rho: float

    def __post_init__(self):
        if self.p < 0.0 or self.kappa < 0.0:
            raise ValueError("tie rates p and kappa must be nonnegative")
        if self.lam <= 0.0:
            raise ValueError("group homophily lam must be strictly positive")
        if self.c0 <= 0.0:
            raise ValueError("direct job-arrival rate c0 must be positive")
        if self.c1 < 0.0:
            raise ValueError("friend job-arrival rate c1 must be nonnegative")
        if self.theta <= 0.0:
            raise ValueError("productivity theta must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("Cobb-Douglas share alpha must lie in (0, 1)")
        if self.rho <= 0.0:
            raise ValueError("risk aversion rho must be positive")

    @classmethod
    def from_products(
        cls,
        c0: float,
        c1_pk: float,
        c1_lam: float,
        theta: float = 80_000.0,
        alpha: float = 0.5,
        rho: float = 1.0e-4,
    ) -> "ModelParams":
        """Build from the identified products, normalizing ``c1`` to 1."""
        return cls(
            p=c1_pk, kappa=0.0, lam=c1_lam, c0=c0, c1=1.0,
            theta=theta, alpha=alpha, rho=rho,
        )

    def with_alpha(self, alpha: float) -> "ModelParams":
        return replace(self, alpha=alpha)

    @property
    def s0(self) -> float:
        """Employment probability with direct search only, c0/(1+c0)."""
        return self.c0 / (1.0 + self.c0)

    @property
    def c1_pk(self) -> float:
        return self.c1 * (self.p + self.kappa)

    @property
    def c1_lam(self) -> float:
        return self.c1 * self.lam

    @property
    def s_H(self) -> float:
        """Employment of a fully specialized group under complete segregation."""
        return employment_prob((self.p + self.kappa + self.lam) / 2.0, self)

    @property
    def s_L(self) -> float:
        """Employment a lone deviator would get under complete segregation."""
        return employment_prob((self.p + self.kappa) / 2.0, self)

    @property
    def has_physical_split(self) -> bool:
        """True when (p, kappa, lam) are genuine tie probabilities."""
        return self.p + self.kappa + self.lam <= 1.0 + ZERO_TOL

    def production(self) -> CobbDouglas:
        return CobbDouglas(self.theta, self.alpha)

    def utility_fn(self) -> CARA:
        return CARA(self.rho)


@dataclass(frozen=True)
class StrategyProfile:
    """Shares of Reds and Greens choosing education A, clamped to [0, 1]."""

    mu_R: float
    mu_G: float

    def __post_init__(self):
        object.__setattr__(self, "mu_R", min(1.0, max(0.0, self.mu_R)))
        object.__setattr__(self, "mu_G", min(1.0, max(0.0, self.mu_G)))

    @property
    def mu_bar(self) -> float:
        return 0.5 * (self.mu_R + self.mu_G)

    def swap(self) -> "StrategyProfile":
        """Relabel the groups."""
        return StrategyProfile(self.mu_G, self.mu_R)

    def as_tuple(self) -> tuple[float, float]:
        return (self.mu_R, self.mu_G)


@dataclass(frozen=True)
class MarketState:
    """All derived market quantities at one education profile."""

    s_AR: float
    s_AG: float
    s_BR: float
    s_BG: float
    L_A: float
    L_B: float
    w_A: float
    w_B: float
    Pi_AR: float
    Pi_AG: float
    Pi_BR: float
    Pi_BG: float
    dPi_R: float
    dPi_G: float


def tie_probability(same_group: bool, same_education: bool, params: ModelParams) -> float:
    """Tie rate for a pair of workers: p, plus kappa if the educations match,
    plus lam if the groups match."""
    prob = params.p
    if same_education:
        prob += params.kappa
    if same_group:
        prob += params.lam
    return prob


def employment_prob(x: float, params: ModelParams) -> float:
    """Employment probability s(x) = (c0 + c1*x) / (1 + c0 + c1*x).

    ``x`` is the measure of same-education friends; the form is the
    stationary occupancy of a two-state process with job loss at rate 1 and
    job arrival at rate ``c0 + c1*x``.
    """
    if x < 0.0:
        raise ValueError("friend measure x must be nonnegative")
    c = params.c0 + params.c1 * x
    return c / (1.0 + c)


def group_employment_rates(
    profile: StrategyProfile, params: ModelParams
) -> tuple[float, float, float, float]:
    """Employment rates (s_AR, s_AG, s_BR, s_BG) of the four worker cells."""
    a = params.p + params.kappa
    b = 0.5 * params.lam
    mu_bar = profile.mu_bar
    s_AR = employment_prob(a * mu_bar + b * profile.mu_R, params)
    s_AG = employment_prob(a * mu_bar + b * profile.mu_G, params)
    s_BR = employment_prob(a * (1.0 - mu_bar) + b * (1.0 - profile.mu_R), params)
    s_BG = employment_prob(a * (1.0 - mu_bar) + b * (1.0 - profile.mu_G), params)
    return s_AR, s_AG, s_BR, s_BG


def labor_supplies(profile: StrategyProfile, params: ModelParams) -> tuple[float, float]:
    """Effective supplies (L_A, L_B): measure of workers educated and employed."""
    s_AR, s_AG, s_BR, s_BG = group_employment_rates(profile, params)
    L_A = 0.5 * (profile.mu_R * s_AR + profile.mu_G * s_AG)
    L_B = 0.5 * ((1.0 - profile.mu_R) * s_BR + (1.0 - profile.mu_G) * s_BG)
    return L_A, L_B


def wages(
    L_A: float,
    L_B: float,
    params: ModelParams,
    production: CobbDouglas | None = None,
) -> tuple[float, float]:
    """Marginal-product wages (w_A, w_B).

    Raises :class:`SingularSupplyError` when either supply is zero; the wage
    of the scarce side diverges and callers decide how to treat the limit.
    """
    if L_A <= ZERO_TOL or L_B <= ZERO_TOL:
        raise SingularSupplyError(
            f"wages undefined at L_A={L_A!r}, L_B={L_B!r}"
        )
    f = production if production is not None else params.production()
    return f.wage_A(L_A, L_B), f.wage_B(L_A, L_B)


def utility(w: float, params: ModelParams, utility_fn: CARA | None = None) -> float:
    """Utility of wage ``w``; CARA by default, with U(0) = 0."""
    if w < 0.0:
        raise ValueError("wage must be nonnegative")
    u = utility_fn if utility_fn is not None else params.utility_fn()
    return u(w)


def market_state(
    profile: StrategyProfile,
    params: ModelParams,
    production: CobbDouglas | None = None,
    utility_fn: CARA | None = None,
) -> MarketState:
    """Evaluate every derived quantity at ``profile``.

    Payoffs are expected utilities, Pi = s * U(w).  Alternative production
    or utility evaluators can be plugged in; Cobb-Douglas and CARA are the
    defaults and the only ones shipped.
    """
    s_AR, s_AG, s_BR, s_BG = group_employment_rates(profile, params)
    L_A, L_B = labor_supplies(profile, params)
    w_A, w_B = wages(L_A, L_B, params, production)
    U_A = utility(w_A, params, utility_fn)
    U_B = utility(w_B, params, utility_fn)
    Pi_AR = s_AR * U_A
    Pi_AG = s_AG * U_A
    Pi_BR = s_BR * U_B
    Pi_BG = s_BG * U_B
    return MarketState(
        s_AR=s_AR, s_AG=s_AG, s_BR=s_BR, s_BG=s_BG,
        L_A=L_A, L_B=L_B, w_A=w_A, w_B=w_B,
        Pi_AR=Pi_AR, Pi_AG=Pi_AG, Pi_BR=Pi_BR, Pi_BG=Pi_BG,
        dPi_R=Pi_AR - Pi_BR, dPi_G=Pi_AG - Pi_BG,
    )


def wage_gap(profile: StrategyProfile, params: ModelParams) -> float:
    """Relative wage gap 1 - w_B/w_A; equals 2 - 1/alpha at (1, 0)."""
    L_A, L_B = labor_supplies(profile, params)
    w_A, w_B = wages(L_A, L_B, params)
    return 1.0 - w_B / w_A


def payoff_gaps(mu_R: float, mu_G: float, params: ModelParams) -> tuple[float, float]:
    """Fast scalar path for (Pi_A - Pi_B) of each group.

    This is the hot call of every solver, so the closed forms are inlined
    rather than routed through :func:`market_state`.
    """
    a = params.p + params.kappa
    b = 0.5 * params.lam
    c0 = params.c0
    c1 = params.c1
    mu_bar = 0.5 * (mu_R + mu_G)

    c = c0 + c1 * (a * mu_bar + b * mu_R)
    s_AR = c / (1.0 + c)
    c = c0 + c1 * (a * mu_bar + b * mu_G)
    s_AG = c / (1.0 + c)
    c = c0 + c1 * (a * (1.0 - mu_bar) + b * (1.0 - mu_R))
    s_BR = c / (1.0 + c)
    c = c0 + c1 * (a * (1.0 - mu_bar) + b * (1.0 - mu_G))
    s_BG = c / (1.0 + c)

    L_A = 0.5 * (mu_R * s_AR + mu_G * s_AG)
    L_B = 0.5 * ((1.0 - mu_R) * s_BR + (1.0 - mu_G) * s_BG)
    if L_A <= ZERO_TOL or L_B <= ZERO_TOL:
        raise SingularSupplyError(
            f"payoff gaps undefined at mu=({mu_R!r}, {mu_G!r})"
        )

    alpha = params.alpha
    w_A = params.theta * alpha * (L_B / L_A) ** (1.0 - alpha)
    w_B = params.theta * (1.0 - alpha) * (L_A / L_B) ** alpha
    U_A = 1.0 - math.exp(-params.rho * w_A)
    U_B = 1.0 - math.exp(-params.rho * w_B)
    return s_AR * U_A - s_BR * U_B, s_AG * U_A - s_BG * U_B


@dataclass(frozen=True)
class AssumptionDiagnostics:
    """Numerical checks of the two uniqueness assumptions.

    The solvers never rely on these assumptions -- bounded CARA utility
    violates the infinite-scarce-wage condition by construction, and the
    elasticity condition fails at the calibrated parameters -- but the
    checks are exposed for inspection.
    """

    scarce_wage_utility_diverges: bool
    elasticity_condition_holds: bool
    elasticity_violations: int


def check_assumptions(params: ModelParams, grid_n: int = 21) -> AssumptionDiagnostics:
    """Probe both uniqueness assumptions on a coarse interior grid.

    The first (divergent utility of the scarce wage) is decided analytically:
    CARA utility is bounded by 1, so it never diverges.  The second requires
    an own-share change to move log U(w) more than log s, for both
    occupations; it is checked by central differences at interior profiles.
    """
    U = params.utility_fn()
    h = 1e-6
    violations = 0
    for i in range(1, grid_n + 1):
        for j in range(1, grid_n + 1):
            mu_R = i / (grid_n + 1)
            mu_G = j / (grid_n + 1)
            st = market_state(StrategyProfile(mu_R, mu_G), params)
            up = market_state(StrategyProfile(mu_R + h, mu_G), params)
            dn = market_state(StrategyProfile(mu_R - h, mu_G), params)
            dlog_s_A = (up.s_AR - dn.s_AR) / (2 * h) / st.s_AR
            dlog_s_B = (up.s_BR - dn.s_BR) / (2 * h) / st.s_BR
            dlog_U_A = (U(up.w_A) - U(dn.w_A)) / (2 * h) / U(st.w_A)
            dlog_U_B = (U(up.w_B) - U(dn.w_B)) / (2 * h) / U(st.w_B)
            if abs(dlog_s_A) >= abs(dlog_U_A):
                violations += 1
            if abs(dlog_s_B) >= abs(dlog_U_B):
                violations += 1
    return AssumptionDiagnostics(
        scarce_wage_utility_diverges=False,
        elasticity_condition_holds=violations == 0,
        elasticity_violations=violations,
    )
