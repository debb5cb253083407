"""Reference implementations that share no code with the package."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np


def enumerate_counts(n: int) -> list[int]:
    """Number of length-n head/tail sequences with each head count, by listing all 2^n."""
    seqs = np.arange(1 << n, dtype=np.int64)
    heads = np.zeros_like(seqs)
    for bit in range(n):
        heads += (seqs >> bit) & 1
    return [int(c) for c in np.bincount(heads, minlength=n + 1)]


def pascal_counts(n: int) -> list[int]:
    row = [1]
    for _ in range(n):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


def two_sided_p(counts: list[int], k: int) -> Fraction:
    """P(|K - n/2| >= |k - n/2|) for a fair coin, from sequence counts."""
    n = len(counts) - 1
    dev = abs(2 * k - n)
    hits = sum(c for j, c in enumerate(counts) if abs(2 * j - n) >= dev)
    return Fraction(hits, 2**n)


def one_sided_p(counts: list[int], k: int) -> Fraction:
    n = len(counts) - 1
    if 2 * k <= n:
        hits = sum(counts[: k + 1])
    else:
        hits = sum(counts[k:])
    return Fraction(hits, 2**n)


def lr_by_factorials(n: int, k: int) -> Fraction:
    # P(k | p uniform) / P(k | p = 1/2) with the binomial coefficient kept in
    num = Fraction(1, n + 1)
    den = Fraction(math.factorial(n), math.factorial(k) * math.factorial(n - k)) / 2**n
    return num / den


def lr_mp(n: int, k: int, dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        log_lr = (mpmath.loggamma(k + 1) + mpmath.loggamma(n - k + 1) - mpmath.loggamma(n + 1)
                  + n * mpmath.log(2) - mpmath.log(n + 1))
        return mpmath.exp(log_lr)


def point_lr_direct(n: int, k: int, p: float, p0: float) -> float:
    """p^k (1-p)^(n-k) / (p0^k (1-p0)^(n-k)) in high precision."""
    with mpmath.workdps(40):
        p, p0 = mpmath.mpf(p), mpmath.mpf(p0)
        return float(mpmath.exp(k * mpmath.log(p / p0) + (n - k) * mpmath.log((1 - p) / (1 - p0))))


def phi_mp(u: float) -> float:
    with mpmath.workdps(40):
        return float(mpmath.ncdf(u))


def hyp1f1_mp(a: float, b: float, z: float) -> float:
    with mpmath.workdps(40):
        return float(mpmath.hyp1f1(a, b, z))
