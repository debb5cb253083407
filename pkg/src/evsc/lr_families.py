"""Likelihood ratios of point and density alternatives against ``p = p0``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from scipy import integrate

from .errors import DomainError, NumericError
from .exact_core import Experiment, Parametrization, standardize
from .special_fn import exp_or_inf, phi_cdf, phi_inv

__all__ = [
    "PointAlternative",
    "DensityAlternative",
    "uniform_density",
    "normal_density",
    "point_alternative",
    "lr_x_exact",
    "log_lr_x_exact",
    "lr_x_approx",
    "lr_x_bound",
    "log_lr_x_third_order",
    "max_lr_for_pvalue",
    "MaxLR",
    "lr_f",
    "lr_f_upper_bound",
    "lr_uniform_closed_form",
    "lr_normal_family",
    "lr_alpha",
    "lr_alpha_closed_form",
    "TABLE3_PVALUES",
]

TABLE3_PVALUES = (0.050, 0.010, 0.005, 0.001)

# beyond this many null sd's the Gaussian factor is below exp(-800)
_X_CUTOFF = 40.0


@dataclass(frozen=True)
class PointAlternative:
    """``p = (k - x sigma_n)/n``; ``y = u + x`` and ``z = y / sigma_n``."""

    x: float
    y: float
    z: float
    p: float


def point_alternative(par: Parametrization, k: int, x: float) -> PointAlternative:
    y = par.u + x
    p = (k - x * par.sigma_n) / par.n
    if not 0.0 < p < 1.0:
        raise DomainError(f"hypothesized p = {p} lies outside (0, 1)")
    return PointAlternative(x=x, y=y, z=y / par.sigma_n, p=p)


@dataclass(frozen=True)
class DensityAlternative:
    """Alternative under which ``p`` has density ``density`` on ``support``.

    ``sup_bound_near_mle`` is a caller-certified constant ``C`` such that the
    probability of ``|p - k/n| <= c0 |u| / sqrt(n)`` is at most
    ``C |u| / sqrt(n)``.  ``features`` lists p-locations (peaks, kinks) the
    integrator should split at.  The density may be called from several
    threads at once.
    """

    density: Callable[[float], float]
    support: tuple[float, float] = (0.0, 1.0)
    sup_bound_near_mle: float | None = None
    features: Sequence[float] = field(default=())

    def __post_init__(self) -> None:
        a, b = self.support
        if not 0.0 <= a < b <= 1.0:
            raise DomainError(f"support must be a subinterval of [0, 1], got {self.support}")

    def total_mass(self) -> float:
        a, b = self.support
        pts = [t for t in self.features if a < t < b] or None
        val, _ = integrate.quad(self.density, a, b, points=pts, limit=200)
        return val


def uniform_density(a: float = 0.0, b: float = 1.0) -> DensityAlternative:
    width = b - a
    return DensityAlternative(lambda p: 1.0 / width if a <= p <= b else 0.0,
                              (a, b), sup_bound_near_mle=None)


def normal_density(mean: float, s: float) -> DensityAlternative:
    if not s > 0:
        raise DomainError(f"normal alternative needs s > 0, got {s}")
    norm = 1.0 / (s * math.sqrt(2.0 * math.pi))
    return DensityAlternative(lambda p: norm * math.exp(-0.5 * ((p - mean) / s) ** 2),
                              (0.0, 1.0), features=(mean,))


# --------------------------------------------------------------------------
# point alternatives


def log_lr_x_exact(e: Experiment, p0: float, x: float) -> float:
    par = standardize(e, p0)
    alt = point_alternative(par, e.k, x)
    z = alt.z
    # k = p0 n - u sigma_n and n - k = q0 n + u sigma_n exactly
    out = 0.0
    if e.k:
        out += e.k * math.log1p(-par.q0 * z)
    if e.n - e.k:
        out += (e.n - e.k) * math.log1p(par.p0 * z)
    return out


def lr_x_exact(e: Experiment, p0: float, x: float) -> float:
    """Exact ``P(data | p = (k - x sigma_n)/n) / P(data | p0)``."""
    return exp_or_inf(log_lr_x_exact(e, p0, x))


def lr_x_approx(u: float, x: float) -> float:
    """``exp((u^2 - x^2)/2)``; maximal at ``x = 0``."""
    return exp_or_inf(0.5 * (u * u - x * x))


def lr_x_bound(e: Experiment, p0: float, x: float) -> float:
    """Upper bound ``exp(-p0 q0 y^2/2 + u y)``, valid whenever ``|u| <= sigma_n``."""
    par = standardize(e, p0)
    y = par.u + x
    return exp_or_inf(-0.5 * par.p0 * par.q0 * y * y + par.u * y)


def log_lr_x_third_order(par: Parametrization, y: float) -> float:
    """``u y - y^2/2 + (q0 - p0)(y^2/sigma_n)(u/2 - y/3)``; the next term is O(1/n)."""
    u = par.u
    return u * y - 0.5 * y * y + (par.q0 - par.p0) * (y * y / par.sigma_n) * (0.5 * u - y / 3.0)


class MaxLR(NamedTuple):
    u: float
    sup_lr: float


def max_lr_for_pvalue(p: float, sided: str = "two") -> MaxLR:
    """Largest point-alternative LR compatible with a p-value: ``exp(u^2/2)``."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p-value must lie in (0, 1), got {p}")
    if sided == "one":
        u = -phi_inv(p)
    elif sided == "two":
        u = -phi_inv(0.5 * p)
    else:
        raise DomainError(f"sided must be 'one' or 'two', got {sided!r}")
    u = abs(u)  # p = 1/2 one-sided gives -0.0
    return MaxLR(u, exp_or_inf(0.5 * u * u))


# --------------------------------------------------------------------------
# density alternatives


def _quad(func: Callable[[float], float], lo: float, hi: float, points: list[float]) -> float:
    pts = sorted({t for t in points if lo < t < hi}) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(func, lo, hi, points=pts, epsabs=1e-10, epsrel=1e-10,
                             limit=500, full_output=1)
    val, err, info = res[0], res[1], res[2]
    if len(res) > 3 and info.get("last", 0) >= 500:
        raise NumericError(f"quadrature did not converge on [{lo}, {hi}] (err={err:g})")
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise NumericError(f"quadrature error estimate too large: {err:g} for value {val:g}")
    return val


def lr_f(e: Experiment, p0: float, alt: DensityAlternative, *, exact: bool = False) -> float:
    """LR of ``p ~ alt`` against ``p = p0``, integrating the point-alternative
    LR over ``x`` with ``p = k/n - x c0/sqrt(n)``.

    With ``exact=False`` the integrand uses ``exp((u^2 - x^2)/2)``; with
    ``exact=True`` it uses the exact binomial ratio (no asymptotic error).
    """
    par = standardize(e, p0)
    scale = par.sigma_n / e.n  # dp/dx = -c0/sqrt(n)
    khat = e.k / e.n
    a, b = alt.support
    x_lo = (khat - b) / scale
    x_hi = (khat - a) / scale
    if exact:
        # keep p strictly inside (0, 1)
        x_lo = max(x_lo, (khat - 1.0) / scale)
        x_hi = min(x_hi, khat / scale)
        cut = _X_CUTOFF + abs(par.u)
        log_peak = 0.5 * par.u * par.u

        def integrand(x: float) -> float:
            p = khat - x * scale
            if not 0.0 < p < 1.0:
                return 0.0
            return alt.density(p) * math.exp(log_lr_x_exact(e, p0, x) - log_peak)
    else:
        cut = _X_CUTOFF
        log_peak = 0.5 * par.u * par.u

        def integrand(x: float) -> float:
            return alt.density(khat - x * scale) * math.exp(-0.5 * x * x)

    lo, hi = max(x_lo, -cut), min(x_hi, cut)
    if lo >= hi:
        return 0.0
    points = [0.0] + [(khat - t) / scale for t in alt.features]
    integral = _quad(integrand, lo, hi, points)
    if integral <= 0.0:
        return 0.0
    log_val = math.log(scale * integral) + log_peak
    return exp_or_inf(log_val)


def lr_f_upper_bound(e: Experiment, p0: float, alt: DensityAlternative) -> float:
    """``1 + C |u|/sqrt(n) exp(u^2/2)`` for a density certified with constant ``C``."""
    if alt.sup_bound_near_mle is None:
        raise DomainError("the alternative carries no certified bound constant C")
    u = standardize(e, p0).u
    slope = alt.sup_bound_near_mle * abs(u) / math.sqrt(e.n)
    return 1.0 + (slope * exp_or_inf(0.5 * u * u) if slope else 0.0)


def lr_uniform_closed_form(e: Experiment, p0: float) -> float:
    """``c0 sqrt(2 pi / n) exp(u^2/2)`` for ``p`` uniform on (0, 1)."""
    par = standardize(e, p0)
    return exp_or_inf(math.log(par.c0 * math.sqrt(2.0 * math.pi / e.n)) + 0.5 * par.u * par.u)


def lr_normal_family(e: Experiment, p0: float, mean_shift: float, s: float) -> float:
    """Closed-form LR for ``p ~ Normal(p0 - mean_shift, s)`` against ``p0``:
    ``exp(u^2/2 - mu^2/(2(1+sigma^2))) / sqrt(1+sigma^2)`` with
    ``mu = n delta / sigma_n - u`` and ``sigma = n s / sigma_n``.
    """
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    par = standardize(e, p0)
    mu = e.n * mean_shift / par.sigma_n - par.u
    var = 1.0 + (e.n * s / par.sigma_n) ** 2
    return exp_or_inf(0.5 * par.u * par.u - mu * mu / (2.0 * var) - 0.5 * math.log(var))


def lr_alpha(e: Experiment, p0: float, alpha: float, *, exact: bool = False) -> float:
    """LR of ``p ~ U(p0, p0+alpha)`` against ``p ~ U(p0-alpha, p0)`` by quadrature."""
    p0 = float(p0)
    if not 0.0 < alpha < min(p0, 1.0 - p0):
        raise DomainError(f"need 0 < alpha < min(p0, 1-p0), got alpha={alpha}, p0={p0}")
    up = lr_f(e, p0, uniform_density(p0, p0 + alpha), exact=exact)
    down = lr_f(e, p0, uniform_density(p0 - alpha, p0), exact=exact)
    if down == 0.0:
        raise NumericError("denominator alternative has vanishing likelihood")
    return up / down


def lr_alpha_closed_form(u: float) -> float:
    """``Phi(-u) / (1 - Phi(-u))``."""
    return phi_cdf(-u) / phi_cdf(u)
