"""Small special-function kernel: normal CDF/quantile, log-factorial,
Kummer's M(a, b, z) and a bracketing root finder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist
from typing import Callable

from .errors import BracketError, DomainError, NumericError

__all__ = [
    "KummerParams",
    "phi_cdf",
    "phi_inv",
    "ln_factorial",
    "kummer_m",
    "find_root",
    "exp_or_inf",
    "LN_FACTORIAL_EXACT_BELOW",
    "KUMMER_TERM_CAP",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

LN_FACTORIAL_EXACT_BELOW = 1024
KUMMER_TERM_CAP = 5000


def phi_cdf(u: float) -> float:
    """Standard normal CDF.

    Evaluated as ``erfc(-u/sqrt 2) / 2`` so that both tails keep full
    relative precision (no ``1 - small`` cancellation in the lower tail).
    """
    if not math.isfinite(u):
        raise DomainError(f"phi_cdf needs a finite argument, got {u!r}")
    return 0.5 * math.erfc(-u / _SQRT2)


def exp_or_inf(x: float) -> float:
    """``exp(x)``, saturating to ``inf`` instead of raising."""
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _phi_pdf(u: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * u * u)


def phi_inv(p: float) -> float:
    """Standard normal quantile.

    Seeded by Wichura's AS241 rational approximation (``statistics.NormalDist``)
    and polished with two Halley steps against :func:`phi_cdf`.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"phi_inv needs 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    x = NormalDist().inv_cdf(p)
    for _ in range(2):
        pdf = _phi_pdf(x)
        if pdf == 0.0:
            break
        # work on the smaller tail to avoid cancellation near p -> 1
        if x <= 0:
            err = phi_cdf(x) - p
        else:
            err = (1.0 - p) - phi_cdf(-x)
        step = err / pdf
        x -= step / (1.0 + 0.5 * x * step)
    return x


@lru_cache(maxsize=None)
def _ln_factorial_exact(n: int) -> float:
    # math.log on a big int is accurate to a couple of ulps
    return math.log(math.factorial(n))


def ln_factorial(n: int, exact_below: int = LN_FACTORIAL_EXACT_BELOW) -> float:
    """``ln(n!)``: exact below ``exact_below``, log-gamma above."""
    n = int(n)
    if n < 0:
        raise DomainError(f"ln_factorial needs n >= 0, got {n}")
    if n < 2:
        return 0.0
    if n < exact_below:
        return _ln_factorial_exact(n)
    return math.lgamma(n + 1.0)


@dataclass(frozen=True)
class KummerParams:
    a: float
    b: float
    z: float

    def __post_init__(self) -> None:
        if self.b <= 0 and float(self.b).is_integer():
            raise DomainError(f"Kummer M undefined for non-positive integer b={self.b}")
        if not all(math.isfinite(v) for v in (self.a, self.b, self.z)):
            raise DomainError("Kummer parameters must be finite")


def _terminates(a: float) -> bool:
    return a <= 0 and float(a).is_integer()


def kummer_m(a: float | KummerParams, b: float | None = None, z: float | None = None,
             *, term_cap: int = KUMMER_TERM_CAP) -> float:
    """Confluent hypergeometric function ``M(a, b, z)`` by its power series.

    Terms follow ``t_{j+1} = t_j (a+j) z / ((b+j)(j+1))``.  For a non-positive
    integer ``a`` the sum is the finite polynomial of degree ``-a``; otherwise
    it stops once ``|t_j| < 1e-16 |partial sum|`` (checked on two consecutive
    terms so that a single tiny term near a sign change does not end it early).
    """
    params = a if isinstance(a, KummerParams) else KummerParams(float(a), float(b), float(z))
    a, b, z = params.a, params.b, params.z

    term = 1.0
    total = 1.0
    if _terminates(a):
        for j in range(int(-a)):
            term *= (a + j) * z / ((b + j) * (j + 1))
            total += term
        return total

    quiet = 0
    for j in range(term_cap):
        term *= (a + j) * z / ((b + j) * (j + 1))
        total += term
        if abs(term) <= 1e-16 * abs(total):
            quiet += 1
            if quiet >= 2 and j + 1 > abs(a) + z:
                return total
        else:
            quiet = 0
    raise NumericError(f"Kummer series did not converge in {term_cap} terms (a={a}, b={b}, z={z})")


def find_root(f: Callable[[float], float], bracket: tuple[float, float],
              *, xtol: float = 1e-12, ftol: float = 1e-12, maxiter: int = 400) -> float:
    """Root of ``f`` inside ``bracket`` by bisection.

    A secant point is tried first on each step and kept only if it lands
    strictly inside the current bracket, so the bracket still halves at
    worst every other step.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")

    force_bisect = False
    for _ in range(maxiter):
        width = hi - lo
        if width <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if not force_bisect:
            cand = hi - fhi * width / (fhi - flo)
            if lo < cand < hi:
                mid = cand
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= ftol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        force_bisect = hi - lo > 0.5 * width
    return 0.5 * (lo + hi)
