# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled occupancy kernel for the two-state employment process.

Each agent alternates exponential sojourns -- unemployed at its job-arrival
rate, employed at rate 1 -- driven by the counter-based splitmix64 stream
defined in ``_streams``.  The loop returns the employed time accumulated in
the window [t_start, t_end]; chains start unemployed at time zero.
"""

from libc.math cimport log

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return z


cdef inline double _uniform(unsigned long long key, unsigned long long k) nogil:
    cdef unsigned long long z = key + (k + 1ULL) * 0x9E3779B97F4B7C15ULL
    return <double>(_mix(z) >> 11) * (1.0 / 9007199254740992.0)


cdef double _occupancy_one(
    unsigned long long key, double rate_up, double t_start, double t_end
) nogil:
    cdef double t = 0.0
    cdef double acc = 0.0
    cdef double dt, a, b, u
    cdef bint employed = 0
    cdef unsigned long long k = 0
    while t < t_end:
        u = _uniform(key, k)
        k += 1
        dt = -log(1.0 - u)
        if not employed:
            dt /= rate_up
        else:
            a = t if t > t_start else t_start
            b = t + dt if t + dt < t_end else t_end
            if b > a:
                acc += b - a
        t += dt
        employed = not employed
    return acc


def occupancy(
    cnp.uint64_t[::1] keys,
    cnp.float64_t[::1] rates,
    double t_start,
    double t_end,
):
    """Employed time in [t_start, t_end] per agent; agents are independent."""
    cdef Py_ssize_t n = keys.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out_v = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out_v[i] = _occupancy_one(keys[i], rates[i], t_start, t_end)
    return out
