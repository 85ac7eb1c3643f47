"""Finite-population Monte Carlo validation of the reduced-form employment
function.

A population of n agents (half Red, half Green, educations set by a
strategy profile) is wired into a random graph with the four tie
probabilities, and each agent then runs an independent two-state employment
chain whose job-arrival rate is c0 + c1 * x, with x its same-education
friend count over n.  Cell-mean occupancies over a post-burn-in window are
compared against the continuum employment function evaluated at the cell's
mean friend measure.

The chain simulation is the hot loop; a compiled kernel is used when the
extension built, with a numpy fallback selected at import time (or forced
via ``OCCSEG_BACKEND=python``).  Both kernels consume identical
counter-based random streams.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSplitError
from ..model import ModelParams, StrategyProfile, tie_probability
from . import _kernel_py
from ._streams import agent_keys

_forced = os.environ.get("OCCSEG_BACKEND", "").strip().lower()
if _forced == "python":
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _kernel_py
        BACKEND = "python"

GROUPS = ("R", "G")
EDUCATIONS = ("A", "B")
#: All (group, education) cells in canonical order.
CELLS = tuple((g, e) for g in GROUPS for e in EDUCATIONS)


@dataclass(frozen=True)
class Population:
    """A realized network: agent labels plus an undirected edge set.

    Agents 0..n/2-1 are Red, the rest Green; within each group the first
    round(mu * n/2) agents carry education A.  Edges are stored once with
    i < j.
    """

    n: int
    group: np.ndarray
    education: np.ndarray
    edges: np.ndarray
    seed: int

    def cell_members(self, group: str, education: str) -> np.ndarray:
        g = GROUPS.index(group)
        e = EDUCATIONS.index(education)
        return np.flatnonzero((self.group == g) & (self.education == e))

    def same_education_counts(self) -> np.ndarray:
        """Number of same-education neighbors of every agent."""
        e0 = self.edges[:, 0]
        e1 = self.edges[:, 1]
        same = self.education[e0] == self.education[e1]
        return (
            np.bincount(e0[same], minlength=self.n)
            + np.bincount(e1[same], minlength=self.n)
        )

    def friend_measure(self) -> np.ndarray:
        """x_i = same-education friend count / n, the finite-n counterpart
        of the continuum friend measure."""
        return self.same_education_counts() / self.n


@dataclass(frozen=True)
class CellStats:
    group: str
    education: str
    n_agents: int
    probe: bool
    mean_x: float
    employment: float
    half_width: float


@dataclass(frozen=True)
class LaborSimResult:
    cells: dict[tuple[str, str], CellStats]
    replications: int
    burn_in: float
    horizon: float
    backend: str = field(default=BACKEND)

    def cell(self, group: str, education: str) -> CellStats:
        return self.cells[(group, education)]


def _require_split(params: ModelParams) -> None:
    if not params.has_physical_split:
        raise InvalidSplitError(
            "p + kappa + lam > 1: these parameters are folded products, not "
            "tie probabilities; calibrate with an explicit c1 split"
        )


def generate_population(
    n: int, profile: StrategyProfile, params: ModelParams, seed: int
) -> Population:
    """Sample the tie graph of a finite population at ``profile``.

    Every unordered pair is linked independently with its tie probability;
    the draw is deterministic given ``seed``.  Requires a genuine
    probability split and an even n >= 100.
    """
    _require_split(params)
    if n < 100 or n % 2:
        raise ValueError("population size must be even and at least 100")

    half = n // 2
    group = np.repeat(np.array([0, 1], dtype=np.int8), half)
    education = np.ones(n, dtype=np.int8)
    n_RA = int(np.floor(profile.mu_R * half + 0.5))
    n_GA = int(np.floor(profile.mu_G * half + 0.5))
    education[:n_RA] = 0
    education[half : half + n_GA] = 0

    cells = []
    for g in (0, 1):
        for e in (0, 1):
            cells.append(np.flatnonzero((group == g) & (education == e)))

    rng = np.random.default_rng(seed)
    chunks = []
    for a in range(4):
        for b in range(a, 4):
            ia, ib = cells[a], cells[b]
            if ia.size == 0 or ib.size == 0:
                continue
            prob = tie_probability(
                same_group=(a // 2 == b // 2),
                same_education=(a % 2 == b % 2),
                params=params,
            )
            if a == b:
                m = ia.size
                if m < 2:
                    continue
                iu, ju = np.triu_indices(m, k=1)
                hit = rng.random(iu.size) < prob
                chunks.append(
                    np.column_stack((ia[iu[hit]], ia[ju[hit]])).astype(np.int64)
                )
            else:
                hit = rng.random((ia.size, ib.size)) < prob
                ii, jj = np.nonzero(hit)
                chunks.append(
                    np.column_stack((ia[ii], ib[jj])).astype(np.int64)
                )
    if chunks:
        edges = np.concatenate(chunks)
        edges = np.sort(edges, axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Population(n=n, group=group, education=education, edges=edges, seed=seed)


def steady_state(x: np.ndarray | float, params: ModelParams):
    """Exact long-run occupancy c(x)/(1+c(x)) of an agent with friend
    measure x; identical to the continuum employment function."""
    c = params.c0 + params.c1 * np.asarray(x, dtype=np.float64)
    return c / (1.0 + c)


def _probe_measures_for_cell(
    pop: Population, params: ModelParams, group: str, education: str, probes: int
) -> np.ndarray:
    """Friend measures of hypothetical measure-zero agents in one cell.

    A probe ties to each real same-education agent with the table
    probability but belongs to no one else's neighborhood, so an empty cell
    can be rated without perturbing the population.  Probe ties are drawn
    once per population, mirroring the fixed real graph.
    """
    rng = np.random.default_rng(
        [pop.seed, 0x70726F62, GROUPS.index(group), EDUCATIONS.index(education)]
    )
    g = GROUPS.index(group)
    e = EDUCATIONS.index(education)
    counts = np.zeros(probes, dtype=np.int64)
    for g2 in (0, 1):
        members = np.flatnonzero((pop.group == g2) & (pop.education == e))
        if members.size == 0:
            continue
        prob = tie_probability(
            same_group=(g == g2), same_education=True, params=params
        )
        counts += rng.binomial(members.size, prob, size=probes)
    return counts / pop.n


def simulate_labor(
    pop: Population,
    params: ModelParams,
    burn_in: float = 200.0,
    horizon: float = 1_000.0,
    replications: int = 20,
    probes: int = 100,
    threads: int | None = None,
) -> LaborSimResult:
    """Run the employment chains and aggregate occupancy per cell.

    Chains are conditionally independent given the graph (arrival rates do
    not depend on other agents' employment states), so each agent is an
    exact two-state jump process.  Cells with no members are rated through
    ``probes`` hypothetical agents appended after the real ones; their mean
    recovers the deviator employment rate of the continuum model.

    Replications use independent counter-derived streams and may run on a
    thread pool (``threads`` or the OCCSEG_THREADS environment variable);
    results are identical for any thread count.
    """
    _require_split(params)
    if burn_in < 0 or horizon <= 0:
        raise ValueError("burn_in must be >= 0 and horizon > 0")
    if replications < 1:
        raise ValueError("need at least one replication")

    x = pop.friend_measure().astype(np.float64)
    member_idx = {}
    probe_x = {}
    blocks = [x]
    offset = pop.n
    for g, e in CELLS:
        members = pop.cell_members(g, e)
        if members.size:
            member_idx[(g, e)] = members
        elif probes > 0:
            px = _probe_measures_for_cell(pop, params, g, e, probes)
            probe_x[(g, e)] = np.arange(offset, offset + probes)
            blocks.append(px)
            offset += probes
    x_all = np.concatenate(blocks) if len(blocks) > 1 else x
    rates = params.c0 + params.c1 * x_all
    n_total = x_all.size
    t_end = burn_in + horizon

    def one_rep(r: int) -> np.ndarray:
        keys = agent_keys(pop.seed, r, n_total)
        occ = _impl.occupancy(keys, rates, burn_in, t_end)
        return occ / horizon

    if threads is None:
        threads = int(os.environ.get("OCCSEG_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reps = list(pool.map(one_rep, range(replications)))
    else:
        reps = [one_rep(r) for r in range(replications)]
    occ = np.vstack(reps)  # (replications, n_total)

    cells = {}
    for g, e in CELLS:
        if (g, e) in member_idx:
            idx = member_idx[(g, e)]
            probe = False
        elif (g, e) in probe_x:
            idx = probe_x[(g, e)]
            probe = True
        else:
            cells[(g, e)] = CellStats(g, e, 0, False, float("nan"),
                                      float("nan"), float("nan"))
            continue
        per_rep = occ[:, idx].mean(axis=1)
        mean = float(per_rep.mean())
        if replications > 1:
            hw = 1.96 * float(per_rep.std(ddof=1)) / np.sqrt(replications)
        else:
            hw = float("nan")
        cells[(g, e)] = CellStats(
            group=g,
            education=e,
            n_agents=0 if probe else int(idx.size),
            probe=probe,
            mean_x=float(x_all[idx].mean()),
            employment=mean,
            half_width=hw,
        )
    return LaborSimResult(
        cells=cells,
        replications=replications,
        burn_in=burn_in,
        horizon=horizon,
        backend=BACKEND,
    )


def jensen_gap(pop: Population, params: ModelParams) -> dict[tuple[str, str], float]:
    """|mean_i s(x_i) - s(mean_i x_i)| per populated cell, from the exact
    per-agent steady states.

    This isolates the finite-n concentration of the friend measure -- the
    quantity that shrinks as n grows -- without the chain noise that a
    finite simulation horizon would add on top.
    """
    x = pop.friend_measure()
    gaps = {}
    for g, e in CELLS:
        members = pop.cell_members(g, e)
        if members.size == 0:
            continue
        xs = x[members]
        gaps[(g, e)] = float(
            abs(steady_state(xs, params).mean() - steady_state(xs.mean(), params))
        )
    return gaps
