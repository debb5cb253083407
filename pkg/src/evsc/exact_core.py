"""Exact coin-tossing quantities: the uniform-vs-fair likelihood ratio,
exact binomial p-values and the (p0, n, u) parametrization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .special_fn import ln_factorial, phi_cdf

__all__ = [
    "Experiment",
    "Parametrization",
    "standardize",
    "exact_lr_uniform_vs_fair",
    "exact_lr_fraction",
    "exact_lr_uniform_vs_point",
    "log_lr_uniform_vs_fair",
    "exact_p_value_fair",
    "exact_p_value_fraction",
    "normal_p_value",
    "uniform_marginal_check",
    "find_neutral_k",
    "EXACT_MAX_N",
]

# below this n everything is done in rational arithmetic
EXACT_MAX_N = 1024

_HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Experiment:
    """``k`` heads observed in ``n`` tosses."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or int(self.k) != self.k:
            raise DomainError(f"n and k must be integers, got n={self.n!r}, k={self.k!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        if self.n < 0:
            raise DomainError(f"n must be nonnegative, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise DomainError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class Parametrization:
    """Null rate ``p0`` and the standardized deviation ``u`` with
    ``k = p0 n - u sigma_n``; ``u > 0`` when ``k`` is below the mean."""

    n: int
    p0: float
    q0: float
    sigma_n: float
    u: float
    c0: float

    def k_from_u(self) -> float:
        return self.p0 * self.n - self.u * self.sigma_n


def _check_p0(p0: float) -> float:
    p0 = float(p0)
    if not 0.0 < p0 < 1.0:
        raise DomainError(f"p0 must lie in (0, 1), got {p0}")
    return p0


def standardize(e: Experiment, p0: float = 0.5) -> Parametrization:
    p0 = _check_p0(p0)
    if e.n == 0:
        raise DomainError("cannot standardize an empty experiment")
    q0 = 1.0 - p0
    c0 = math.sqrt(p0 * q0)
    sigma_n = c0 * math.sqrt(e.n)
    if p0 == 0.5:
        # n/2 - k exact in binary, avoids a rounding step
        u = (e.n - 2 * e.k) / math.sqrt(e.n)
    else:
        u = (p0 * e.n - e.k) / sigma_n
    return Parametrization(n=e.n, p0=p0, q0=q0, sigma_n=sigma_n, u=u, c0=c0)


# --------------------------------------------------------------------------
# likelihood ratio of "p uniform on (0,1)" against "p = 1/2"


def exact_lr_fraction(e: Experiment) -> Fraction:
    """``k!(n-k)!/n! * 2^n/(n+1)`` as an exact rational."""
    n, k = e.n, e.k
    return Fraction(math.factorial(k) * math.factorial(n - k) * 2**n,
                    math.factorial(n) * (n + 1))


def _stirling_tail(k: int) -> float:
    """``ln k! - [(k+1/2) ln k - k + ln sqrt(2 pi)]`` for ``k >= 1``."""
    if k < 30:
        return ln_factorial(k) - ((k + 0.5) * math.log(k) - k + _HALF_LN_2PI)
    x = 1.0 / k
    x2 = x * x
    return x * (1.0 / 12 - x2 * (1.0 / 360 - x2 * (1.0 / 1260 - x2 / 1680)))


def _log_lr_stable(n: int, k: int) -> float:
    # Stirling with an exact remainder, rewritten in z = (n - 2k)/n so that
    # the O(n ln n) pieces cancel analytically instead of numerically.
    if k == 0 or k == n:
        return n * _LN2 - math.log(n + 1)
    z = (n - 2 * k) / n
    bulk = 0.5 * n * (2.0 * z * math.atanh(z) + math.log1p(-z * z))
    return (bulk
            + 0.5 * math.log(0.25 * n * (1.0 - z * z))
            + _HALF_LN_2PI
            - math.log(n + 1)
            + _stirling_tail(k) + _stirling_tail(n - k) - _stirling_tail(n))


def log_lr_uniform_vs_fair(e: Experiment, *, method: str = "auto") -> float:
    """Natural log of the uniform-vs-fair likelihood ratio.

    ``method`` is ``"exact"`` (rational), ``"stirling"`` (cancellation-free
    log form), ``"lgamma"`` (plain ln-factorial differences) or ``"auto"``.
    """
    n, k = e.n, e.k
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "stirling"
    if method == "exact":
        fr = exact_lr_fraction(e)
        return math.log(fr.numerator) - math.log(fr.denominator)
    if method == "stirling":
        return _log_lr_stable(n, k)
    if method == "lgamma":
        return (ln_factorial(k) + ln_factorial(n - k) - ln_factorial(n)
                + n * _LN2 - math.log(n + 1))
    raise ValueError(f"unknown method {method!r}")


def exact_lr_uniform_vs_fair(e: Experiment) -> float:
    """Likelihood ratio of H1 (p uniform on (0,1)) to H2 (p = 1/2)."""
    if e.n <= EXACT_MAX_N:
        return float(exact_lr_fraction(e))
    log_lr = _log_lr_stable(e.n, e.k)
    return math.exp(log_lr) if log_lr < 709.0 else math.inf


def exact_lr_uniform_vs_point(e: Experiment, p0: float) -> float:
    """Likelihood ratio of ``p`` uniform on (0,1) against ``p = p0``:
    ``B(k+1, n-k+1) / (p0^k (1-p0)^(n-k))``."""
    p0 = _check_p0(p0)
    if p0 == 0.5:
        return exact_lr_uniform_vs_fair(e)
    n, k = e.n, e.k
    log_lr = (ln_factorial(k) + ln_factorial(n - k) - ln_factorial(n + 1)
              - k * math.log(p0) - (n - k) * math.log1p(-p0))
    return math.exp(log_lr) if log_lr < 709.0 else math.inf


# --------------------------------------------------------------------------
# exact binomial tails at p = 1/2


def _lower_tail_fraction(n: int, k: int) -> Fraction:
    total = 0
    c = 1
    for i in range(k + 1):
        total += c
        c = c * (n - i) // (i + 1)
    return Fraction(total, 2**n)


def _log_pmf_half(n: int, k: int) -> float:
    if k == 0 or k == n:
        return -n * _LN2
    return _log_lr_stable(n, k) * -1.0 - math.log(n + 1)


def _lower_tail_float(n: int, k: int) -> float:
    """``P(X <= k)`` for ``X ~ Bin(n, 1/2)``, ``k <= n/2``, in log space."""
    log_top = _log_pmf_half(n, k)
    # pmf(i-1)/pmf(i) = i/(n-i+1); walk downwards in blocks until negligible
    total = 0.0
    log_scale = 0.0
    hi = k
    block = 4096
    while hi >= 0:
        lo = max(0, hi - block + 1)
        i = np.arange(hi, lo, -1, dtype=np.float64)
        logs = np.empty(hi - lo + 1)
        logs[0] = 0.0
        np.cumsum(np.log(i) - np.log(n - i + 1.0), out=logs[1:])
        logs += log_scale
        total += math.fsum(np.exp(logs))
        if lo == 0:
            break
        log_scale = float(logs[-1]) + math.log(lo) - math.log(n - lo + 1)
        # remaining terms are each below exp(log_scale) and there are < n of them
        if log_scale + math.log(n) < math.log(total) - 37.0:
            break
        hi = lo - 1
        block = min(block * 2, 1 << 20)
    return math.exp(log_top) * total


def _lower_tail(n: int, k: int) -> float:
    if n <= EXACT_MAX_N:
        return float(_lower_tail_fraction(n, k))
    return _lower_tail_float(n, k)


def exact_p_value_fair(e: Experiment, sided: str = "two") -> float:
    """Exact binomial p-value against ``p = 1/2``.

    One-sided: the tail on the side of the observation (``P(X <= k)`` when
    ``k <= n/2``, otherwise ``P(X >= k)``).  Two-sided:
    ``min(1, 2 min(P(X <= k), P(X >= k)))``; both tails include ``k``.
    """
    if sided not in ("one", "two"):
        raise DomainError(f"sided must be 'one' or 'two', got {sided!r}")
    n, k = e.n, e.k
    if n == 0:
        return 1.0
    kk = min(k, n - k)
    tail = _lower_tail(n, kk)
    if sided == "one":
        return tail
    return min(1.0, 2.0 * tail)


def exact_p_value_fraction(e: Experiment, sided: str = "two") -> Fraction:
    """:func:`exact_p_value_fair` as an exact rational; ``n <= EXACT_MAX_N`` only."""
    if sided not in ("one", "two"):
        raise DomainError(f"sided must be 'one' or 'two', got {sided!r}")
    n, k = e.n, e.k
    if n > EXACT_MAX_N:
        raise DomainError(f"rational p-values are limited to n <= {EXACT_MAX_N}")
    if n == 0:
        return Fraction(1)
    tail = _lower_tail_fraction(n, min(k, n - k))
    return tail if sided == "one" else min(Fraction(1), 2 * tail)


def normal_p_value(e: Experiment) -> float:
    """Two-sided normal approximation ``2 Phi(-|u|)`` (no continuity correction)."""
    u = standardize(e).u
    return 2.0 * phi_cdf(-abs(u))


def uniform_marginal_check(n: int) -> list[Fraction]:
    """``P(k heads | p uniform) = C(n,k) B(k+1, n-k+1)`` for ``k = 0..n``."""
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n > 2000:
        raise DomainError("uniform_marginal_check is restricted to n <= 2000")
    out = []
    for k in range(n + 1):
        beta = Fraction(math.factorial(k) * math.factorial(n - k), math.factorial(n + 1))
        out.append(math.comb(n, k) * beta)
    return out


# --------------------------------------------------------------------------


def _log_lr(n: int, k: int) -> float:
    return log_lr_uniform_vs_fair(Experiment(n, k))


def _distance_from_one(n: int, k: int):
    if n <= EXACT_MAX_N:
        return abs(exact_lr_fraction(Experiment(n, k)) - 1)
    return abs(math.expm1(_log_lr(n, k)))


def find_neutral_k(n: int) -> Experiment:
    """The ``k <= n/2`` whose likelihood ratio is closest to 1.

    The ratio is decreasing in ``k`` on ``[0, n/2]``, so the crossing of 1 is
    found by bisection on the log ratio and only its two neighbours are
    compared.  Ties go to the smaller ``k``.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    lo, hi = 0, n // 2
    if _log_lr(n, hi) >= 0.0:
        return Experiment(n, hi)
    if _log_lr(n, lo) <= 0.0:
        return Experiment(n, lo)
    # invariant: lr(lo) > 1 >= lr(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _log_lr(n, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    best = lo if _distance_from_one(n, lo) <= _distance_from_one(n, hi) else hi
    return Experiment(n, best)
