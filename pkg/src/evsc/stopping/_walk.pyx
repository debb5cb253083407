# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stopping-time kernel.

Operation-for-operation twin of ``_walk_py.py``; the two must produce
bit-identical stopping times.  Keep them in sync.
"""

from libc.math cimport floor, log, sqrt, fabs
from libc.stdint cimport int64_t, uint64_t, uint8_t

import numpy as np

cdef extern from *:
    """
    static inline int evsc_popcount64(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    /* |s| >= (c_num / c_den) sqrt(n), in exact 128-bit integer arithmetic */
    static inline int evsc_crossed(long long s, long long n,
                                   unsigned long long c_num, unsigned long long c_den) {
        unsigned __int128 a = (unsigned __int128)(s < 0 ? -s : s);
        unsigned __int128 d = (unsigned __int128)c_den * c_den;
        unsigned __int128 lhs = a * a * d;
        unsigned __int128 rhs = (unsigned __int128)c_num * c_num * (unsigned __int128)n;
        return lhs >= rhs;
    }
    """
    int evsc_popcount64(unsigned long long x) nogil
    int evsc_crossed(long long s, long long n, unsigned long long c_num,
                     unsigned long long c_den) nogil

cdef enum:
    POPCOUNT_MAX = 64

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15

cdef double TO_UNIT = 1.0 / 9007199254740992.0

cdef double[10] STIRLING_TAIL
STIRLING_TAIL[:] = [
    0.0810614667953272, 0.0413406959554092, 0.0276779256849983,
    0.02079067210376509, 0.0166446911898211, 0.0138761288230707,
    0.0118967099458917, 0.0104112652619720, 0.00925546218271273,
    0.00833056343336287,
]


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t next64(uint64_t* state) noexcept nogil:
    state[0] = state[0] + GAMMA
    return mix64(state[0])


cdef inline double uniform(uint64_t* state) noexcept nogil:
    return (<double>(next64(state) >> 11) + 0.5) * TO_UNIT


cdef inline uint64_t trial_state(uint64_t seed, int64_t trial) noexcept nogil:
    return mix64(seed + GAMMA * <uint64_t>(trial + 1))


cdef inline double stirling_tail(int64_t k) noexcept nogil:
    cdef double kp1, kp1sq
    if k <= 9:
        return STIRLING_TAIL[k]
    kp1 = <double>(k + 1)
    kp1sq = kp1 * kp1
    return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / kp1


cdef int64_t binomial_half(uint64_t* state, int64_t n) noexcept nogil:
    cdef uint64_t word
    cdef double spq, b, a, c, v_r, alpha, u, v, us, kf, bound
    cdef int64_t m, k
    if n <= 0:
        return 0
    if n <= POPCOUNT_MAX:
        word = next64(state)
        if n < 64:
            word &= (<uint64_t>1 << n) - 1
        return evsc_popcount64(word)

    spq = sqrt(<double>n * 0.25)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.005
    c = <double>n * 0.5 + 0.5
    v_r = 0.92 - 4.2 / b
    alpha = (2.83 + 5.1 / b) * spq
    m = (n + 1) // 2
    while True:
        u = uniform(state) - 0.5
        v = uniform(state)
        us = 0.5 - fabs(u)
        kf = floor((2.0 * a / us + b) * u + c)
        if kf < 0.0 or kf > <double>n:
            continue
        k = <int64_t>kf
        if us >= 0.07 and v <= v_r:
            return k
        v = log(v * alpha / (a / (us * us) + b))
        bound = ((<double>m + 0.5) * log(<double>(m + 1) / <double>(n - m + 1))
                 + <double>(n + 1) * log(<double>(n - m + 1) / <double>(n - k + 1))
                 + (<double>k + 0.5) * log(<double>(n - k + 1) / <double>(k + 1))
                 + stirling_tail(m) + stirling_tail(n - m)
                 - stirling_tail(k) - stirling_tail(n - k))
        if v <= bound:
            return k


cdef int64_t walk(uint64_t* state, int64_t m, int64_t cap, uint64_t c_num, uint64_t c_den,
                  int64_t max_jump, uint8_t* truncated) noexcept nogil:
    cdef double c = <double>c_num / <double>c_den
    cdef int64_t s = 2 * binomial_half(state, m) - m
    cdef int64_t n = m
    cdef int64_t j
    while True:
        if evsc_crossed(s, n, c_num, c_den):
            truncated[0] = 0
            return n
        if n >= cap:
            truncated[0] = 1
            return n
        j = <int64_t>floor(c * sqrt(<double>n) - <double>(s if s >= 0 else -s)) - 1
        if j < 1:
            j = 1
        if j > max_jump:
            j = max_jump
        if j > cap - n:
            j = cap - n
        s += 2 * binomial_half(state, j) - j
        n += j


def run_trials(uint64_t seed, int64_t first, int64_t count, int64_t m, int64_t cap,
               uint64_t c_num, uint64_t c_den, int64_t max_jump):
    stops_arr = np.empty(count, dtype=np.int64)
    trunc_arr = np.empty(count, dtype=np.uint8)
    cdef int64_t[::1] stops = stops_arr
    cdef uint8_t[::1] trunc = trunc_arr
    cdef int64_t i
    cdef uint64_t state
    with nogil:
        for i in range(count):
            state = trial_state(seed, first + i)
            stops[i] = walk(&state, m, cap, c_num, c_den, max_jump, &trunc[i])
    return stops_arr, trunc_arr


def sample_binomial(uint64_t seed, int64_t trial, int64_t n, int64_t size):
    out_arr = np.empty(size, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef uint64_t state = trial_state(seed, trial)
    cdef int64_t i
    with nogil:
        for i in range(size):
            out[i] = binomial_half(&state, n)
    return out_arr
