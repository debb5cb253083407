"""Optional stopping: Monte Carlo stopping times and their Brownian-motion moments.

The hot loop lives in the compiled ``_walk`` extension when it is built and
falls back to the pure-Python ``_walk_py`` otherwise; both give identical
results for the same configuration.
"""

from .analytic import (
    expected_lr_at_stopping,
    expected_lr_at_stopping_analytic,
    finiteness_threshold,
    shepp_moment,
)
from .simulate import (
    StoppingConfig,
    StoppingResult,
    available_backends,
    default_backend,
    run_walks,
    simulate_stopping,
)

__all__ = [
    "StoppingConfig",
    "StoppingResult",
    "simulate_stopping",
    "run_walks",
    "available_backends",
    "default_backend",
    "shepp_moment",
    "finiteness_threshold",
    "expected_lr_at_stopping",
    "expected_lr_at_stopping_analytic",
]
