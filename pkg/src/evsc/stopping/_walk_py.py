"""Pure-Python stopping-time kernel.

Mirrors ``_walk.pyx`` operation for operation so that both produce
bit-identical stopping times for the same inputs.  Keep the two in sync.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

# ln k! - [(k + 1/2) ln(k + 1) - (k + 1) + ln sqrt(2 pi)], k = 0..9
STIRLING_TAIL = (
    0.0810614667953272, 0.0413406959554092, 0.0276779256849983,
    0.02079067210376509, 0.0166446911898211, 0.0138761288230707,
    0.0118967099458917, 0.0104112652619720, 0.00925546218271273,
    0.00833056343336287,
)

POPCOUNT_MAX = 64


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class TrialStream:
    """SplitMix64 stream for one trial; its start is a pure function of (seed, trial)."""

    __slots__ = ("state",)

    def __init__(self, seed: int, trial: int) -> None:
        self.state = mix64((seed + GAMMA * (trial + 1)) & MASK64)

    def next64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        # open interval (0, 1)
        return ((self.next64() >> 11) + 0.5) * _TO_UNIT


def stirling_tail(k: int) -> float:
    if k <= 9:
        return STIRLING_TAIL[k]
    kp1 = float(k + 1)
    kp1sq = kp1 * kp1
    return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / kp1


def binomial_half(rng: TrialStream, n: int) -> int:
    """Exact draw from Binomial(n, 1/2).

    ``n <= 64``: popcount of ``n`` random bits.  Larger ``n``: Hormann's
    transformed rejection with decomposition (BTRD).
    """
    if n <= 0:
        return 0
    if n <= POPCOUNT_MAX:
        word = rng.next64()
        if n < 64:
            word &= (1 << n) - 1
        return word.bit_count()

    spq = math.sqrt(n * 0.25)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.005
    c = n * 0.5 + 0.5
    v_r = 0.92 - 4.2 / b
    alpha = (2.83 + 5.1 / b) * spq
    m = (n + 1) // 2
    while True:
        u = rng.uniform() - 0.5
        v = rng.uniform()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > n:
            continue
        if us >= 0.07 and v <= v_r:
            return k
        v = math.log(v * alpha / (a / (us * us) + b))
        bound = ((m + 0.5) * math.log(float(m + 1) / float(n - m + 1))
                 + (n + 1) * math.log(float(n - m + 1) / float(n - k + 1))
                 + (k + 0.5) * math.log(float(n - k + 1) / float(k + 1))
                 + stirling_tail(m) + stirling_tail(n - m)
                 - stirling_tail(k) - stirling_tail(n - k))
        if v <= bound:
            return k


def crossed(s: int, n: int, c_num: int, c_den: int) -> bool:
    """``|s| >= c sqrt(n)`` exactly, with ``c = c_num / c_den``."""
    return s * s * c_den * c_den >= c_num * c_num * n


def _jump(c: float, n: int, s: int) -> int:
    # no crossing is possible while |S| + j < c sqrt(n) - 1 (the boundary only grows)
    return math.floor(c * math.sqrt(float(n)) - float(abs(s))) - 1


def walk(rng: TrialStream, m: int, cap: int, c_num: int, c_den: int, max_jump: int,
         trace: list | None = None) -> tuple[int, bool]:
    """First ``n >= m`` with ``|2k - n| >= c sqrt(n)``; ``(cap, True)`` if not reached."""
    c = c_num / c_den
    s = 2 * binomial_half(rng, m) - m
    n = m
    while True:
        if crossed(s, n, c_num, c_den):
            if trace is not None:
                trace.append((n, s, 0))
            return n, False
        if n >= cap:
            if trace is not None:
                trace.append((n, s, 0))
            return n, True
        j = _jump(c, n, s)
        if j < 1:
            j = 1
        if j > max_jump:
            j = max_jump
        if j > cap - n:
            j = cap - n
        if trace is not None:
            trace.append((n, s, j))
        s += 2 * binomial_half(rng, j) - j
        n += j


def run_trials(seed: int, first: int, count: int, m: int, cap: int,
               c_num: int, c_den: int, max_jump: int) -> tuple[np.ndarray, np.ndarray]:
    stops = np.empty(count, dtype=np.int64)
    truncated = np.empty(count, dtype=np.uint8)
    seed &= MASK64
    for i in range(count):
        rng = TrialStream(seed, first + i)
        n, cut = walk(rng, m, cap, c_num, c_den, max_jump)
        stops[i] = n
        truncated[i] = cut
    return stops, truncated


def sample_binomial(seed: int, trial: int, n: int, size: int) -> np.ndarray:
    rng = TrialStream(seed & MASK64, trial)
    return np.array([binomial_half(rng, n) for _ in range(size)], dtype=np.int64)


def trace_trial(seed: int, trial: int, m: int, cap: int, c_num: int, c_den: int,
                max_jump: int) -> list[tuple[int, int, int]]:
    """``(n, S, jump)`` after every step of one trial; the last entry has jump 0."""
    out: list[tuple[int, int, int]] = []
    walk(TrialStream(seed & MASK64, trial), m, cap, c_num, c_den, max_jump, trace=out)
    return out
