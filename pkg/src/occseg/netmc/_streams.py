"""Counter-based random streams shared by both occupancy kernels.

Draws are produced by applying the splitmix64 finalizer to
``key + (k+1) * GOLDEN`` for counter k, which makes the k-th uniform of an
agent a pure function of (seed, replication, agent).  Replications can
therefore run in any order, on any number of threads, and on either kernel
backend, with identical draw sequences.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4B7C15
REP_SALT = 0xDA942042E4DD58B5
AGENT_SALT = 0xC2B2AE3D27D4EB4F
#: 2**-53, mapping the top 53 bits of a draw to [0, 1).
U53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """splitmix64 finalizer (a 64-bit bijection) on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer on a uint64 array."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def replication_key(seed: int, replication: int) -> int:
    base = mix64(seed & MASK64)
    return mix64(base ^ ((replication + 1) * REP_SALT & MASK64))


def agent_keys(seed: int, replication: int, n_agents: int) -> np.ndarray:
    """Per-agent stream keys for one replication, as a uint64 array."""
    rep_key = replication_key(seed, replication)
    idx = np.arange(1, n_agents + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = mix64_array(np.uint64(rep_key) ^ (idx * np.uint64(AGENT_SALT)))
    return keys
