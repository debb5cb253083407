"""Large-n approximations for the uniform-vs-fair likelihood ratio and the
two-sided p-value, each with its guaranteed error envelope."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError
from .special_fn import exp_or_inf

__all__ = [
    "Provenance",
    "ErrorEnvelope",
    "LRPValue",
    "lr_approx",
    "lr_envelope",
    "lr_log_envelope",
    "p_approx",
    "p_from_lr",
    "lr_pvalue_under_h1",
    "R_ACCURATE_MAX",
]

# the r-formula is only claimed accurate up to this value
R_ACCURATE_MAX = 0.05

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class Provenance(str, enum.Enum):
    E1E2 = "E1E2"
    MILLS = "Mills"
    TRUNCATION = "Truncation"
    NONE = "None"


@dataclass(frozen=True)
class ErrorEnvelope:
    """A central approximation together with a proven interval for the exact value.

    ``lower <= upper`` always holds.  The central ``value`` is the plain
    approximation and need not lie inside the interval: the ``1/u`` tail
    formula, for instance, always overshoots the tighter Mills upper bound.
    """

    value: float
    lower: float
    upper: float
    provenance: Provenance = Provenance.NONE

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise ValueError(f"empty envelope [{self.lower}, {self.upper}]")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def as_dict(self) -> dict:
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "provenance": self.provenance.value}


def _check_n(n: float) -> None:
    if not n > 0:
        raise DomainError(f"n must be positive, got {n}")


def lr_approx(n: float, u: float) -> float:
    """``sqrt(pi / 2n) * exp(u^2 / 2)``."""
    _check_n(n)
    return exp_or_inf(0.5 * math.log(math.pi / (2.0 * n)) + 0.5 * u * u)


def _exp(x: float) -> float:
    return exp_or_inf(x)


def lr_log_envelope(n: int, u: float) -> ErrorEnvelope:
    """Proven interval for the natural log of the exact uniform-vs-fair LR.

    Only proven for ``n <= 4k <= 3n``, i.e. ``|u| <= sqrt(n)/2``.  With
    ``(1+E1) LR = sqrt(pi/2n) exp(u^2 (1+E2)/2)`` and
    ``0 <= E1 <= 1/n``, ``u^2/(6n) - 4/(3n) <= E2 <= 2u^2/(9n) - 1/n``.
    """
    _check_n(n)
    half_root = 0.5 * math.sqrt(n)
    if abs(u) > half_root * (1.0 + 1e-12):
        raise DomainError(f"envelope needs |u| <= sqrt(n)/2 = {half_root:g}, got u={u}")
    u2 = u * u
    e2_lo = u2 / (6.0 * n) - 4.0 / (3.0 * n)
    e2_hi = 2.0 * u2 / (9.0 * n) - 1.0 / n
    log_pre = 0.5 * math.log(math.pi / (2.0 * n))
    lower = log_pre + 0.5 * u2 * (1.0 + e2_lo) - math.log1p(1.0 / n)
    upper = log_pre + 0.5 * u2 * (1.0 + e2_hi)
    return ErrorEnvelope(log_pre + 0.5 * u2, lower, upper, Provenance.E1E2)


def lr_envelope(n: int, u: float) -> ErrorEnvelope:
    """:func:`lr_log_envelope` mapped back to the LR scale (``inf`` on overflow)."""
    env = lr_log_envelope(n, u)
    return ErrorEnvelope(_exp(env.value), _exp(env.lower), _exp(env.upper), env.provenance)


def p_approx(u: float) -> ErrorEnvelope:
    """Leading-order two-sided p-value ``sqrt(2/(pi u^2)) exp(-u^2/2)``.

    The interval is the Mills-ratio sandwich for ``2 Phi(-|u|)``: the same
    expression scaled by ``u^2/(u^2+1)`` below and ``(u^2+2)/(u^2+3)`` above.
    """
    if u == 0 or not math.isfinite(u):
        raise DomainError(f"p_approx is singular at u=0 and needs finite u, got {u}")
    u2 = u * u
    value = _SQRT_2_OVER_PI / abs(u) * math.exp(-0.5 * u2)
    return ErrorEnvelope(value, value * u2 / (u2 + 1.0), value * (u2 + 2.0) / (u2 + 3.0),
                         Provenance.MILLS)


def p_from_lr(n: float, lr: float) -> float:
    """p-value implied by a likelihood ratio at sample size ``n``:
    ``1 / sqrt(n lr^2 ln(2 n lr^2 / pi))``."""
    _check_n(n)
    if not lr > 0:
        raise DomainError(f"lr must be positive, got {lr}")
    arg = 2.0 * n * lr * lr / math.pi
    if not arg > 1.0:
        raise DomainError(f"need 2 n lr^2 / pi > 1, got {arg}")
    return 1.0 / math.sqrt(n * lr * lr * math.log(arg))


class LRPValue(NamedTuple):
    r: float
    ell: float
    accurate: bool


def lr_pvalue_under_h1(n: int, v: float) -> LRPValue:
    """p-value ``r`` of the uniform-vs-fair LR under the uniform hypothesis,
    and the LR ``ell`` it corresponds to.

    ``r = (|v| sqrt(n) + 1) / (n + 1)``.  Inverting for ``|v|`` and
    substituting into the LR approximation gives
    ``ell = sqrt(pi/2n) exp(n r^2 / 2 - r (1 - r))`` up to an ``O(1/n)``
    term in the exponent.  ``accurate`` is False once ``r`` exceeds 0.05.
    """
    _check_n(n)
    root = math.sqrt(n)
    if abs(v) > root * (1.0 + 1e-12):
        raise DomainError(f"|v| cannot exceed sqrt(n) = {root:g}, got {v}")
    r = min(1.0, (abs(v) * root + 1.0) / (n + 1.0))
    ell = math.sqrt(math.pi / (2.0 * n)) * _exp(0.5 * n * r * r - r * (1.0 - r))
    return LRPValue(r, ell, r <= R_ACCURATE_MAX)
