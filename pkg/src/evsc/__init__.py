"""Likelihood ratios versus p-values in coin tossing.

Exact and asymptotic likelihood ratios and p-values for ``k`` heads in
``n`` tosses, the largest likelihood ratio a given p-value allows, and an
optional-stopping simulator with its Brownian-motion counterpart.
"""

from .asymptotics import (
    ErrorEnvelope,
    Provenance,
    lr_approx,
    lr_envelope,
    lr_pvalue_under_h1,
    p_approx,
    p_from_lr,
)
from .errors import BracketError, DomainError, EvscError, NumericError
from .exact_core import (
    Experiment,
    Parametrization,
    exact_lr_uniform_vs_fair,
    exact_p_value_fair,
    find_neutral_k,
    standardize,
    uniform_marginal_check,
)
from .lr_families import (
    DensityAlternative,
    lr_alpha,
    lr_f,
    lr_normal_family,
    lr_x_approx,
    lr_x_exact,
    max_lr_for_pvalue,
)
from .special_fn import find_root, kummer_m, ln_factorial, phi_cdf, phi_inv
from .stopping import (
    StoppingConfig,
    StoppingResult,
    expected_lr_at_stopping,
    finiteness_threshold,
    shepp_moment,
    simulate_stopping,
)

__version__ = "0.1.0"
