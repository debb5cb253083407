"""Brownian-motion moments of the first exit time from ``|W_t| < c sqrt(t)``."""

from __future__ import annotations

import math
from functools import lru_cache

from ..errors import DomainError, NumericError
from scipy.special import erfcx

from ..special_fn import find_root, kummer_m, phi_cdf

__all__ = [
    "shepp_moment",
    "finiteness_threshold",
    "expected_lr_at_stopping",
    "expected_lr_at_stopping_analytic",
    "SCAN_Z_MAX",
]

SCAN_Z_MAX = 50.0
_SCAN_STEP = 0.01
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@lru_cache(maxsize=256)
def _smallest_root(mu: float) -> float:
    """Smallest positive zero of ``z -> M(-mu, 1/2, z)``."""

    def f(z: float) -> float:
        return kummer_m(-mu, 0.5, z)

    prev_z, prev_f = 0.0, 1.0  # M(a, b, 0) = 1
    steps = int(round(SCAN_Z_MAX / _SCAN_STEP))
    for i in range(1, steps + 1):
        z = i * _SCAN_STEP
        fz = f(z)
        if fz == 0.0:
            return z
        if fz < 0.0:
            return find_root(f, (prev_z, z))
        prev_z, prev_f = z, fz
    raise NumericError(f"no root of M(-{mu}, 1/2, z) for z in (0, {SCAN_Z_MAX}]")


def finiteness_threshold(mu: float) -> float:
    """Boundary width ``c*`` above which ``E(T^mu)`` is infinite (``mu > 0``)."""
    mu = float(mu)
    if not mu > 0:
        raise DomainError(f"finiteness threshold needs mu > 0, got {mu}")
    return math.sqrt(2.0 * _smallest_root(mu))


def shepp_moment(m: float, mu: float, c: float) -> float:
    """``E(T^mu)`` for ``T = inf{t >= m : |W_t| >= c sqrt(t)}`` with ``W`` unconditioned:

    ``m^mu (2 Phi(-c) + sqrt(2/pi) M(1-mu, 3/2, c^2/2) / M(-mu, 1/2, c^2/2) c e^{-c^2/2})``.

    Returns ``inf`` from the smallest positive root of ``M(-mu, 1/2, .)`` on.
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    z = 0.5 * c * c
    if mu > 0 and z >= _smallest_root(float(mu)):
        return math.inf
    if mu == -0.5:
        ratio = 1.0  # M(3/2, 3/2, z) / M(1/2, 1/2, z) = e^z / e^z
    else:
        denom = kummer_m(-mu, 0.5, z)
        if denom <= 0.0:
            return math.inf
        ratio = kummer_m(1.0 - mu, 1.5, z) / denom
    return m**mu * (2.0 * phi_cdf(-c) + _SQRT_2_OVER_PI * ratio * c * math.exp(-z))


def expected_lr_at_stopping(m: float, c: float) -> float:
    """``(1 + c^2) / (c sqrt(m))``: expected LR when ``c`` sigma is first reached."""
    if not (m >= 1 and c > 0):
        raise DomainError(f"need m >= 1 and c > 0, got m={m}, c={c}")
    return (1.0 + c * c) / (c * math.sqrt(m))


def expected_lr_at_stopping_analytic(m: float, c: float) -> float:
    """``sqrt(pi/2) e^{c^2/2} E(T^{-1/2})`` without the tail approximation of ``2 Phi(-c)``.

    At ``mu = -1/2`` the Kummer ratio is 1, leaving
    ``(sqrt(pi/2) erfcx(c/sqrt 2) + c) / sqrt(m)``, which cannot overflow.
    """
    if not (m >= 1 and c > 0):
        raise DomainError(f"need m >= 1 and c > 0, got m={m}, c={c}")
    return (math.sqrt(0.5 * math.pi) * float(erfcx(c / math.sqrt(2.0))) + c) / math.sqrt(m)
