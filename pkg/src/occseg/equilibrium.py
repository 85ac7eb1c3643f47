"""Finding, verifying, and classifying equilibria of the education game.

An equilibrium is a profile where no worker gains from switching education:
the payoff gap of a group must be <= 0 where its share is 0, = 0 where the
share is interior, and >= 0 where the share is 1.  Stability is judged
against the myopic adjustment flow d(mu_X)/dt = k * gap_X: interior
gap-zero coordinates need a negative own-derivative and, when both
coordinates are interior, a positive Jacobian determinant; pinned boundary
coordinates need a strict gap sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._roots import bisect_root, scan_brackets
from .errors import MultipleRootsError, NoRootError, RelabelRequiredError, SingularSupplyError
from .model import (
    MarketState,
    ModelParams,
    StrategyProfile,
    market_state,
    payoff_gaps,
    utility,
)

#: Interior coordinates are pushed this far off a singular corner when a
#: one-sided limit is needed.
CORNER_PROBE = 1e-9

#: Strictness margin for boundary stability sign conditions.
STRICT_TOL = 1e-10

#: Pre-scan resolution for one-dimensional root searches.
SCAN_STEP = 1e-3


class ProfileKind(enum.Enum):
    COMPLETE_SEGREGATION = "complete-segregation"
    PARTIAL_SEGREGATION = "partial-segregation"
    SYMMETRIC_INTERIOR = "symmetric-interior"
    CORNER = "corner"
    OTHER = "other"


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    BOUNDARY_STABLE = "boundary-stable"


class Regime(enum.Enum):
    COMPLETE = "complete"
    PARTIAL = "partial"


@dataclass(frozen=True)
class EquilibriumCheck:
    ok: bool
    ok_R: bool
    ok_G: bool
    gap_R: float
    gap_G: float


@dataclass(frozen=True)
class EquilibriumReport:
    profile: StrategyProfile
    kind: ProfileKind
    satisfies_conditions: bool
    stable: Stability
    jacobian: np.ndarray
    det_jacobian: float
    market: MarketState


@dataclass(frozen=True)
class DynamicsTrace:
    """Sampled trajectory of the adjustment flow, clipped to the unit square."""

    times: list[float]
    profiles: list[StrategyProfile]
    terminal: StrategyProfile
    converged: bool
    steps: int


def probed_gaps(mu_R: float, mu_G: float, params: ModelParams) -> tuple[float, float]:
    """Payoff gaps, taking a one-sided limit at the two singular corners.

    Supplies vanish only at (0,0) and (1,1); there the profile is nudged
    along the diagonal by ``CORNER_PROBE`` so the gap sign of the limit is
    observable.
    """
    try:
        return payoff_gaps(mu_R, mu_G, params)
    except SingularSupplyError:
        h = CORNER_PROBE
        if mu_R <= 0.5:
            return payoff_gaps(mu_R + h, mu_G + h, params)
        return payoff_gaps(mu_R - h, mu_G - h, params)


def classify_profile(profile: StrategyProfile, tol: float = 1e-9) -> ProfileKind:
    """Segregation taxonomy of a profile, independent of parameters."""
    mu_R, mu_G = profile.mu_R, profile.mu_G
    at_R = mu_R <= tol or mu_R >= 1.0 - tol
    at_G = mu_G <= tol or mu_G >= 1.0 - tol
    if at_R and at_G:
        opposite = abs(mu_R - mu_G) >= 1.0 - 2 * tol
        return ProfileKind.COMPLETE_SEGREGATION if opposite else ProfileKind.CORNER
    if at_R or at_G:
        return ProfileKind.PARTIAL_SEGREGATION
    if abs(mu_R - mu_G) <= tol:
        return ProfileKind.SYMMETRIC_INTERIOR
    return ProfileKind.OTHER


def check_equilibrium(
    profile: StrategyProfile, params: ModelParams, tol: float = 1e-8
) -> EquilibriumCheck:
    """Verify the per-group best-response conditions at ``profile``."""
    gap_R, gap_G = probed_gaps(profile.mu_R, profile.mu_G, params)

    def cond(mu: float, gap: float) -> bool:
        if mu <= tol:
            return gap <= tol
        if mu >= 1.0 - tol:
            return gap >= -tol
        return abs(gap) <= tol

    ok_R = cond(profile.mu_R, gap_R)
    ok_G = cond(profile.mu_G, gap_G)
    return EquilibriumCheck(
        ok=ok_R and ok_G, ok_R=ok_R, ok_G=ok_G, gap_R=gap_R, gap_G=gap_G
    )


def classify_regime(params: ModelParams) -> Regime:
    """Complete- vs partial-segregation regime.

    Complete segregation survives when the corner utility ratio
    U(w_A(1,0)) / U(w_B(1,0)) does not exceed the employment ratio s_H/s_L;
    a strict excess hands the regime to partial segregation.  Requires
    occupation A to be the good job at (1,0), i.e. alpha >= 1/2 under
    Cobb-Douglas; otherwise the labels must be swapped first.
    """
    st = market_state(StrategyProfile(1.0, 0.0), params)
    if st.w_A < st.w_B:
        raise RelabelRequiredError(
            "w_A(1,0) < w_B(1,0): relabel occupations (alpha < 1/2)"
        )
    ratio = utility(st.w_A, params) / utility(st.w_B, params)
    if ratio <= params.s_H / params.s_L:
        return Regime.COMPLETE
    return Regime.PARTIAL


def partial_roots(params: ModelParams, tol: float = 1e-10) -> list[float]:
    """All roots of the mixing group's gap along the edge mu_R = 1.

    The gap can be non-monotone at large alpha, so every bracket from a
    coarse pre-scan is polished and reported.
    """

    def f(mu: float) -> float:
        return payoff_gaps(1.0, mu, params)[1]

    hi = 1.0 - CORNER_PROBE
    roots = []
    for a, b, fa, fb in scan_brackets(f, 0.0, hi, SCAN_STEP):
        roots.append(bisect_root(f, a, b, fa, fb, xtol=1e-12, ftol=tol))
    return roots


def solve_partial(params: ModelParams, tol: float = 1e-10) -> float:
    """The interior share mu* of a partial-segregation equilibrium (1, mu*)."""
    roots = [r for r in partial_roots(params, tol) if 0.0 < r < 1.0]
    if not roots:
        raise NoRootError(
            "mixing-group gap has no interior root on (1, .); "
            "the parameters sit in the complete-segregation regime"
        )
    if len(roots) > 1:
        raise MultipleRootsError(
            f"{len(roots)} roots of the mixing-group gap found", roots
        )
    return roots[0]


def find_mu_hat(params: ModelParams, tol: float = 1e-9) -> float:
    """Mixing share at which the two wages coincide along (1, .).

    Used against the threshold lam / (2(p+kappa+lam)) to predict the sign
    of the equilibrium wage gap.
    """

    def f(mu: float) -> float:
        st = market_state(StrategyProfile(1.0, mu), params)
        return st.w_A - st.w_B

    hi = 1.0 - CORNER_PROBE
    brackets = scan_brackets(f, 0.0, hi, SCAN_STEP)
    if not brackets:
        raise NoRootError("wages never cross along the edge mu_R = 1")
    a, b, fa, fb = brackets[0]
    root = bisect_root(f, a, b, fa, fb, xtol=1e-12, ftol=tol * params.theta)
    if abs(f(root)) > tol * params.theta:
        raise NoRootError("wage crossing did not refine below tolerance")
    return root


def symmetric_roots(params: ModelParams, tol: float = 1e-10) -> list[float]:
    """All interior roots of the common gap along the diagonal mu_R = mu_G."""

    def f(mu: float) -> float:
        return probed_gaps(mu, mu, params)[0]

    lo, hi = CORNER_PROBE, 1.0 - CORNER_PROBE
    roots = []
    for a, b, fa, fb in scan_brackets(f, lo, hi, SCAN_STEP):
        roots.append(bisect_root(f, a, b, fa, fb, xtol=1e-12, ftol=tol))
    return roots


def solve_symmetric(params: ModelParams, tol: float = 1e-10) -> float:
    """The symmetric equilibrium share mu_S with both groups mixing alike.

    CARA utility pushes the gap to +s0 near (0,0) and -s0 near (1,1), so a
    root always exists for the shipped functional forms.
    """
    roots = symmetric_roots(params, tol)
    if not roots:
        raise NoRootError("no symmetric root found on the diagonal")
    if len(roots) > 1:
        raise MultipleRootsError(
            f"{len(roots)} symmetric roots found", roots
        )
    return roots[0]


def jacobian_gaps(
    profile: StrategyProfile, params: ModelParams, h: float = 1e-6
) -> np.ndarray:
    """Finite-difference Jacobian of (gap_R, gap_G) in (mu_R, mu_G).

    Central differences in the interior, one-sided at the boundary of the
    unit square.
    """
    mu = [profile.mu_R, profile.mu_G]
    J = np.empty((2, 2))
    for j in range(2):
        up = mu.copy()
        dn = mu.copy()
        up[j] = min(1.0, mu[j] + h)
        dn[j] = max(0.0, mu[j] - h)
        g_up = probed_gaps(up[0], up[1], params)
        g_dn = probed_gaps(dn[0], dn[1], params)
        width = up[j] - dn[j]
        J[0, j] = (g_up[0] - g_dn[0]) / width
        J[1, j] = (g_up[1] - g_dn[1]) / width
    return J


def stability(
    profile: StrategyProfile,
    params: ModelParams,
    h: float = 1e-6,
    tol: float = STRICT_TOL,
) -> tuple[Stability, np.ndarray]:
    """Stability verdict of an equilibrium profile plus the gap Jacobian.

    Interior gap-zero coordinates require a strictly negative own
    derivative, and a strictly positive determinant when both are interior.
    Pinned coordinates require a strict gap sign (negative at 0, positive at
    1); the Jacobian criterion does not apply to them.  Verdicts within
    ``tol`` of an inequality boundary come back as boundary-stable.
    """
    gap_R, gap_G = probed_gaps(profile.mu_R, profile.mu_G, params)
    J = jacobian_gaps(profile, params, h)
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])

    violated = False
    marginal = False
    interior = []
    for idx, (mu, gap) in enumerate(
        [(profile.mu_R, gap_R), (profile.mu_G, gap_G)]
    ):
        if mu <= tol:
            if gap > tol:
                violated = True
            elif gap > -tol:
                marginal = True
        elif mu >= 1.0 - tol:
            if gap < -tol:
                violated = True
            elif gap < tol:
                marginal = True
        else:
            interior.append(idx)
            if J[idx, idx] > tol:
                violated = True
            elif J[idx, idx] > -tol:
                marginal = True
    if len(interior) == 2:
        if det < -tol:
            violated = True
        elif det < tol:
            marginal = True

    if violated:
        verdict = Stability.UNSTABLE
    elif marginal:
        verdict = Stability.BOUNDARY_STABLE
    else:
        verdict = Stability.STABLE
    return verdict, J


def _projected_gaps(
    mu_R: float, mu_G: float, params: ModelParams
) -> tuple[float, float]:
    """Gap velocities with outward components zeroed at the box boundary."""
    g_R, g_G = probed_gaps(mu_R, mu_G, params)
    if (mu_R <= 0.0 and g_R < 0.0) or (mu_R >= 1.0 and g_R > 0.0):
        g_R = 0.0
    if (mu_G <= 0.0 and g_G < 0.0) or (mu_G >= 1.0 and g_G > 0.0):
        g_G = 0.0
    return g_R, g_G


def simulate_dynamics(
    start: StrategyProfile,
    params: ModelParams,
    k: float = 1.0,
    horizon: float = 5_000.0,
    step: float = 0.2,
    vel_tol: float = 1e-9,
    record_every: int | None = None,
) -> DynamicsTrace:
    """Integrate the adjustment flow d(mu)/dt = k * gap, projected to [0,1]^2.

    Classical fixed-step fourth-order Runge-Kutta; every stage and state is
    clipped to the unit square.  Convergence is declared when the projected
    gap velocity on the k = 1 scale drops below ``vel_tol``, which makes the
    criterion invariant to rescaling ``k`` (rescaling only changes the time
    units).  Non-convergence within the horizon is reported, never raised.
    """
    if k <= 0.0:
        raise ValueError("adjustment speed k must be positive")
    if step <= 0.0:
        raise ValueError("integration step must be positive")

    n_steps = max(1, int(math.ceil(horizon / step)))
    if record_every is None:
        record_every = max(1, n_steps // 2000)

    def vel(mu_R: float, mu_G: float) -> tuple[float, float]:
        g_R, g_G = payoff_gaps_clipped(mu_R, mu_G)
        return k * g_R, k * g_G

    def payoff_gaps_clipped(mu_R: float, mu_G: float) -> tuple[float, float]:
        mu_R = min(1.0, max(0.0, mu_R))
        mu_G = min(1.0, max(0.0, mu_G))
        return probed_gaps(mu_R, mu_G, params)

    x, y = start.mu_R, start.mu_G
    times = [0.0]
    profiles = [StrategyProfile(x, y)]
    converged = False
    steps_done = 0
    t = 0.0
    for i in range(n_steps):
        p_R, p_G = _projected_gaps(x, y, params)
        if max(abs(p_R), abs(p_G)) < vel_tol:
            converged = True
            break
        k1 = vel(x, y)
        k2 = vel(x + 0.5 * step * k1[0], y + 0.5 * step * k1[1])
        k3 = vel(x + 0.5 * step * k2[0], y + 0.5 * step * k2[1])
        k4 = vel(x + step * k3[0], y + step * k3[1])
        x += step * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
        y += step * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        x = min(1.0, max(0.0, x))
        y = min(1.0, max(0.0, y))
        t += step
        steps_done = i + 1
        if steps_done % record_every == 0:
            times.append(t)
            profiles.append(StrategyProfile(x, y))
    else:
        p_R, p_G = _projected_gaps(x, y, params)
        converged = max(abs(p_R), abs(p_G)) < vel_tol

    terminal = StrategyProfile(x, y)
    if profiles[-1].as_tuple() != terminal.as_tuple() or times[-1] != t:
        times.append(t)
        profiles.append(terminal)
    return DynamicsTrace(
        times=times,
        profiles=profiles,
        terminal=terminal,
        converged=converged,
        steps=steps_done,
    )


def _newton2d(
    x0: float, y0: float, params: ModelParams, tol: float = 1e-12, max_iter: int = 60
) -> tuple[float, float] | None:
    """Damped Newton iteration on both gaps from an interior starting point."""
    x, y = x0, y0
    for _ in range(max_iter):
        try:
            g = payoff_gaps(x, y, params)
        except SingularSupplyError:
            return None
        if max(abs(g[0]), abs(g[1])) < tol:
            return x, y
        J = jacobian_gaps(StrategyProfile(x, y), params)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-18:
            return None
        dx = (-g[0] * J[1, 1] + g[1] * J[0, 1]) / det
        dy = (-g[1] * J[0, 0] + g[0] * J[1, 0]) / det
        limit = 0.1  # stay inside the sweep cell's neighborhood
        scale = max(1.0, abs(dx) / limit, abs(dy) / limit)
        x = min(1.0 - 1e-9, max(1e-9, x + dx / scale))
        y = min(1.0 - 1e-9, max(1e-9, y + dy / scale))
    return None


def enumerate_equilibria(
    params: ModelParams, grid_n: int = 200, tol: float = 1e-9
) -> list[EquilibriumReport]:
    """Exhaustive candidate search over the closed square.

    Candidates come from the four corners, root scans of the free
    coordinate's gap along the four edges, a root scan along the diagonal,
    and a grid sweep that flags cells where both gaps change sign (polished
    by a 2-D Newton iteration).  Every candidate is verified against the
    equilibrium conditions and reported with a stability verdict.
    """
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")

    candidates: list[tuple[float, float]] = [
        (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)
    ]

    def edge_roots(fixed: float, red_fixed: bool) -> list[tuple[float, float]]:
        def f(mu: float) -> float:
            if red_fixed:
                return probed_gaps(fixed, mu, params)[1]
            return probed_gaps(mu, fixed, params)[0]

        found = []
        lo, hi = CORNER_PROBE, 1.0 - CORNER_PROBE
        for a, b, fa, fb in scan_brackets(f, lo, hi, SCAN_STEP):
            r = bisect_root(f, a, b, fa, fb, xtol=1e-12, ftol=1e-10)
            if tol < r < 1.0 - tol:
                found.append((fixed, r) if red_fixed else (r, fixed))
        return found

    for fixed in (0.0, 1.0):
        candidates += edge_roots(fixed, red_fixed=True)
        candidates += edge_roots(fixed, red_fixed=False)

    for r in symmetric_roots(params):
        candidates.append((r, r))

    # Interior sweep: cells where both gap components change sign.
    xs = np.linspace(0.0, 1.0, grid_n + 1)
    gR = np.empty((grid_n + 1, grid_n + 1))
    gG = np.empty((grid_n + 1, grid_n + 1))
    for i, mu_R in enumerate(xs):
        for j, mu_G in enumerate(xs):
            g = probed_gaps(float(mu_R), float(mu_G), params)
            gR[i, j] = g[0]
            gG[i, j] = g[1]
    sR = np.sign(gR)
    sG = np.sign(gG)

    def cell_has_flip(s: np.ndarray, i: int, j: int) -> bool:
        block = s[i : i + 2, j : j + 2]
        return bool(block.max() > 0 >= block.min()) or bool(0.0 in block)

    for i in range(grid_n):
        for j in range(grid_n):
            if cell_has_flip(sR, i, j) and cell_has_flip(sG, i, j):
                x0 = float(0.5 * (xs[i] + xs[i + 1]))
                y0 = float(0.5 * (xs[j] + xs[j + 1]))
                hit = _newton2d(x0, y0, params)
                if hit is not None:
                    candidates.append(hit)

    # Verify, dedupe, and report in canonical (mu_R, mu_G) order.
    reports: list[EquilibriumReport] = []
    kept: list[tuple[float, float]] = []
    for mu_R, mu_G in sorted(candidates):
        if any(
            max(abs(mu_R - a), abs(mu_G - b)) < 1e-6 for a, b in kept
        ):
            continue
        profile = StrategyProfile(mu_R, mu_G)
        chk = check_equilibrium(profile, params, tol=max(tol, 1e-8))
        if not chk.ok:
            continue
        kept.append((mu_R, mu_G))
        verdict, J = stability(profile, params)
        det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
        snapped = StrategyProfile(
            _snap_unit(mu_R, tol), _snap_unit(mu_G, tol)
        )
        reports.append(
            EquilibriumReport(
                profile=snapped,
                kind=classify_profile(snapped),
                satisfies_conditions=True,
                stable=verdict,
                jacobian=J,
                det_jacobian=det,
                market=market_state(snapped, params),
            )
        )
    return reports


def _snap_unit(mu: float, tol: float) -> float:
    if mu <= tol:
        return 0.0
    if mu >= 1.0 - tol:
        return 1.0
    return mu
