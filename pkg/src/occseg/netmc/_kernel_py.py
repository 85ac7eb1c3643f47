"""Pure-numpy occupancy kernel, draw-for-draw equivalent to the compiled one.

Sojourn draws are consumed in blocks of columns: even counters are
unemployed sojourns, odd counters employed ones, so the per-agent draw
sequence is identical to the compiled kernel's regardless of block size.
Agents whose cumulative time has not reached the window end carry their
state into the next block.
"""

from __future__ import annotations

import numpy as np

from ._streams import GOLDEN, U53, mix64_array

#: Columns consumed per block; must be even so every block starts unemployed.
BLOCK = 512


def _uniform_block(keys: np.ndarray, k0: int, m: int) -> np.ndarray:
    """Uniforms for counters k0..k0+m-1 of every key, shape (len(keys), m)."""
    counters = np.arange(k0 + 1, k0 + m + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = keys[:, None] + counters[None, :] * np.uint64(GOLDEN)
        z = mix64_array(z)
    return (z >> np.uint64(11)).astype(np.float64) * U53


def occupancy(
    keys: np.ndarray, rates: np.ndarray, t_start: float, t_end: float
) -> np.ndarray:
    """Employed time in [t_start, t_end] per agent; agents are independent."""
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    n = keys.shape[0]
    acc = np.zeros(n)
    t_in = np.zeros(n)
    active = np.arange(n)
    k0 = 0
    while active.size:
        u = _uniform_block(keys[active], k0, BLOCK)
        dt = -np.log(1.0 - u)
        dt[:, 0::2] /= rates[active, None]
        cum = t_in[active, None] + np.cumsum(dt, axis=1)
        starts = np.maximum(cum[:, 0::2], t_start)
        ends = np.minimum(cum[:, 1::2], t_end)
        acc[active] += np.sum(np.maximum(ends - starts, 0.0), axis=1)
        t_in[active] = cum[:, -1]
        k0 += BLOCK
        active = active[cum[:, -1] < t_end]
    return acc
