"""Monte Carlo for the first time a fair-coin walk leaves ``|k - n/2| < c sqrt(n)/2``."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import DomainError
from ..special_fn import exp_or_inf
from . import _walk_py

try:
    from . import _walk as _walk_c
except ImportError:  # pragma: no cover - exercised only without a compiler
    _walk_c = None

__all__ = [
    "StoppingConfig",
    "StoppingResult",
    "simulate_stopping",
    "available_backends",
    "default_backend",
    "boundary_fraction",
    "MAX_C",
    "MAX_TOSSES_LIMIT",
]

# keep |S|^2 * den^2 and c_num^2 * n inside 128 bits
MAX_C = 1000.0
MAX_TOSSES_LIMIT = 10**12
_MAX_C_DEN = 1 << 20
_SEED_MASK = (1 << 64) - 1


def available_backends() -> list[str]:
    return (["compiled"] if _walk_c is not None else []) + ["python"]


def default_backend() -> str:
    if os.environ.get("EVSC_PURE_PYTHON"):
        return "python"
    return available_backends()[0]


def _kernel(backend: str | None):
    backend = backend or default_backend()
    if backend == "compiled":
        if _walk_c is None:
            raise DomainError("compiled kernel is not available; rebuild or use backend='python'")
        return _walk_c
    if backend == "python":
        return _walk_py
    raise DomainError(f"unknown backend {backend!r}")


def boundary_fraction(c: float) -> Fraction:
    """Rational form of ``c`` used for the exact stopping test.

    Decimal inputs such as 1.3069 are taken at their shortest repr; anything
    needing a larger denominator than 2**20 is rounded to the nearest such
    fraction.
    """
    frac = Fraction(repr(float(c)))
    if frac.denominator > _MAX_C_DEN:
        frac = frac.limit_denominator(_MAX_C_DEN)
    return frac


@dataclass(frozen=True)
class StoppingConfig:
    m: int
    c: float
    trials: int
    max_tosses: int
    seed: int = 0
    max_jump: int = 1 << 62

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError(f"m must be positive, got {self.m}")
        if not 0 < self.c <= MAX_C:
            raise DomainError(f"c must lie in (0, {MAX_C}], got {self.c}")
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        if self.max_tosses < self.m:
            raise DomainError(f"max_tosses ({self.max_tosses}) must be >= m ({self.m})")
        if self.max_tosses > MAX_TOSSES_LIMIT:
            raise DomainError(f"max_tosses above {MAX_TOSSES_LIMIT} is not supported")
        if self.max_jump < 1:
            raise DomainError("max_jump must be at least 1")
        if not 0 <= self.seed <= _SEED_MASK:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class StoppingResult:
    config: StoppingConfig
    backend: str
    mean_inv_sqrt_n: float
    se_inv_sqrt_n: float
    mean_lr: float
    se_lr: float
    truncated_fraction: float
    truncation_bias_bound: float
    lr_truncation_bias_bound: float
    mean_n_stopped: float
    stopped_n_histogram: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["config"] = asdict(self.config)
        return out


def _histogram(stops: np.ndarray, truncated: np.ndarray, m: int) -> dict:
    done = stops[truncated == 0]
    top = int(stops.max())
    edges = [m, m * 10]
    while edges[-1] < top:
        edges.append(edges[-1] * 10)
    counts = np.histogram(done, bins=edges)[0]
    bins = [{"from": int(lo), "to": int(hi), "count": int(cnt)}
            for lo, hi, cnt in zip(edges, edges[1:], counts)]
    quant = {}
    if done.size:
        for q in (0.1, 0.5, 0.9):
            quant[f"q{int(q * 100)}"] = int(np.quantile(done, q, method="lower"))
    return {"stopped": int(done.size), "truncated": int(truncated.sum()),
            "decades": bins, "quantiles": quant}


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    count = values.size
    mean = math.fsum(values) / count
    if count < 2:
        return mean, math.nan
    var = math.fsum((values - mean) ** 2) / (count - 1)
    return mean, math.sqrt(var / count)


def run_walks(cfg: StoppingConfig, *, workers: int = 1,
              backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Stopping times and truncation flags, one entry per trial, in trial order."""
    kernel = _kernel(backend)
    frac = boundary_fraction(cfg.c)
    workers = max(1, min(int(workers), cfg.trials))
    bounds = np.linspace(0, cfg.trials, workers + 1).astype(np.int64)
    args = [(cfg.seed, int(lo), int(hi - lo), cfg.m, cfg.max_tosses,
             frac.numerator, frac.denominator, cfg.max_jump)
            for lo, hi in zip(bounds[:-1], bounds[1:])]
    if workers == 1:
        parts = [kernel.run_trials(*args[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: kernel.run_trials(*a), args))
    stops = np.concatenate([p[0] for p in parts])
    truncated = np.concatenate([p[1] for p in parts])
    return stops, truncated


def simulate_stopping(cfg: StoppingConfig, *, workers: int = 1,
                      backend: str | None = None) -> StoppingResult:
    """Toss ``m`` fair coins, then keep tossing until ``|2k - n| >= c sqrt(n)``.

    The boundary is tested at ``n = m`` and after every later toss.  Trial
    ``i`` draws from a stream fixed by ``(seed, i)`` alone, so the result does
    not depend on ``workers``.  Trials reaching ``max_tosses`` are recorded
    at the cap; their true contribution to ``E(N^{-1/2})`` lies in
    ``(0, cap^{-1/2}]``, which gives ``truncation_bias_bound``.
    """
    backend = backend or default_backend()
    stops, truncated = run_walks(cfg, workers=workers, backend=backend)
    inv_sqrt = 1.0 / np.sqrt(stops.astype(np.float64))
    mean, se = _mean_se(inv_sqrt)
    lr_scale = exp_or_inf(0.5 * math.log(0.5 * math.pi) + 0.5 * cfg.c * cfg.c)
    frac_cut = float(truncated.mean())
    bias = frac_cut / math.sqrt(cfg.max_tosses)
    done = stops[truncated == 0]
    mean_n = math.fsum(done.astype(np.float64)) / done.size if done.size else math.nan
    return StoppingResult(
        config=cfg,
        backend=backend,
        mean_inv_sqrt_n=mean,
        se_inv_sqrt_n=se,
        mean_lr=lr_scale * mean,
        se_lr=lr_scale * se,
        truncated_fraction=frac_cut,
        truncation_bias_bound=bias,
        lr_truncation_bias_bound=lr_scale * bias,
        mean_n_stopped=mean_n,
        stopped_n_histogram=_histogram(stops, truncated, cfg.m),
    )
