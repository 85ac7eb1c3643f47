"""Moment-based calibration of the model and the regime threshold alpha-hat.

Four targets pin the reduced-form parameters: the share of jobs found
through friends, the ratio of group to education-plus-baseline tie rates,
the employment rate under complete segregation, and mean income at equal
Cobb-Douglas shares.  Only the products c1*(p+kappa) and c1*lam are
identified, so the default output folds them into a unit-c1 parameter set;
an explicit c1 recovers a genuine probability split for finite-network use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._roots import bisect_root
from .errors import InfeasibleTargetError, InvalidSplitError, NoRootError
from .model import ModelParams, utility


@dataclass(frozen=True)
class CalibrationTargets:
    """Moment targets; defaults reproduce the benchmark parameter table."""

    informal_share: float = 0.5
    homophily_ratio: float = 3.0
    target_employment: float = 0.95
    target_income: float = 40_000.0
    rho: float = 1.0e-4

    def __post_init__(self):
        if not 0.0 < self.informal_share < 1.0:
            raise ValueError("informal_share must lie in (0, 1)")
        if self.homophily_ratio <= 0.0:
            raise ValueError("homophily_ratio must be positive")
        if not 0.0 < self.target_employment < 1.0:
            raise ValueError("target_employment must lie in (0, 1)")
        if self.target_income <= 0.0:
            raise ValueError("target_income must be positive")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")


def calibrate(
    targets: CalibrationTargets | None = None,
    alpha: float = 0.5,
    c1: float | None = None,
) -> ModelParams:
    """Parameters satisfying the calibration targets.

    Under complete segregation a specialized worker's friend measure is
    (p+kappa+lam)/2, so the informal share sigma forces
    c1*(p+kappa+lam)/2 = c0 * sigma/(1-sigma), and the employment target t
    then yields c0 = (1-sigma) * t/(1-t).  The homophily ratio splits the
    tie products, and theta doubles the income target because wages equal
    theta/2 at (1,0) with alpha = 1/2.

    With ``c1`` given, a genuine probability split (p, 0, lam) is stored so
    the parameters can seed a finite network; the products are preserved.
    """
    t = targets if targets is not None else CalibrationTargets()
    sigma = t.informal_share
    c0 = (1.0 - sigma) * t.target_employment / (1.0 - t.target_employment)
    s0 = c0 / (1.0 + c0)
    if t.target_employment <= s0:
        raise InfeasibleTargetError(
            f"target employment {t.target_employment} does not exceed the "
            f"direct-search floor s0={s0}"
        )
    c1_total = 2.0 * c0 * sigma / (1.0 - sigma)  # c1 * (p + kappa + lam)
    r = t.homophily_ratio
    c1_pk = c1_total / (1.0 + r)
    c1_lam = c1_total * r / (1.0 + r)
    theta = 2.0 * t.target_income
    if c1 is None:
        return ModelParams.from_products(
            c0=c0, c1_pk=c1_pk, c1_lam=c1_lam, theta=theta, alpha=alpha, rho=t.rho
        )
    p = c1_pk / c1
    lam = c1_lam / c1
    if p + lam > 1.0 + 1e-12:
        raise InvalidSplitError(
            f"c1={c1} implies p+kappa+lam={p + lam} > 1; choose c1 >= {c1_total}"
        )
    return ModelParams(
        p=p, kappa=0.0, lam=lam, c0=c0, c1=c1, theta=theta, alpha=alpha, rho=t.rho
    )


#: Default explicit split for the finite-network module: c1 = 25 preserves
#: the calibrated products with p + kappa = .19 and lam = .57.
DEFAULT_SPLIT_C1 = 25.0


def find_alpha_hat(params: ModelParams, tol: float = 1e-8) -> float:
    """Cobb-Douglas share at which complete segregation stops being an
    equilibrium.

    Solves s_L * U(theta*alpha) = s_H * U(theta*(1-alpha)) on (1/2, 1):
    the deviator's gap at (1,0) switches sign exactly where the corner
    utility ratio equals s_H / s_L.
    """
    s_H, s_L = params.s_H, params.s_L

    def gap_at_corner(alpha: float) -> float:
        u_A = utility(params.theta * alpha, params)
        u_B = utility(params.theta * (1.0 - alpha), params)
        return s_L * u_A - s_H * u_B

    lo, hi = 0.5, 1.0 - 1e-12
    f_lo, f_hi = gap_at_corner(lo), gap_at_corner(hi)
    if f_lo > 0.0 or f_hi < 0.0:
        raise NoRootError("no threshold alpha-hat on (1/2, 1)")
    root = bisect_root(gap_at_corner, lo, hi, f_lo, f_hi, xtol=tol, ftol=1e-14)
    if math.isnan(root):
        raise NoRootError("alpha-hat bisection failed")
    return root
