"""Toolkit for heavy-tailed linear processes and their stable partial-sum limits.

Simulates X_n = sum_{i>=1} (ell(i)/i) * eps_{n-i} for innovations in the
domain of attraction of an alpha-stable law (alpha in (1, 2]), computes the
normalizer A_N = N^{1/alpha} H_alpha(N)^{1/alpha} sum_{i<=N} ell(i)/i, and
verifies the convergence of the normalized partial-sum finite-dimensional
distributions to the alpha-stable Levy limit, both by an exact
characteristic-function oracle and by Monte Carlo.
"""

from .slowly_varying import (
    HAlphaConvergenceError,
    NormalizerInputs,
    SlowlyVaryingSpec,
    big_h,
    coefficient,
    coefficient_prefix_sums,
    constant,
    eval_sv,
    h_alpha,
    log_power,
    normalizer,
)
from .stable_law import (
    SkewedStableParams,
    StandardStable,
    cdf,
    from_standard,
    from_tail_constants,
    log_cf,
    sample,
    std_log_cf,
    to_standard,
)
from .innovations import (
    ExactStable,
    InnovationSpec,
    ParetoTail,
    exact_stable,
    innovation_cf_params,
    sample_innovations,
    tail_constants,
)
from .linear_process import (
    FddSpec,
    ProcessSpec,
    normalized_fdd_sample,
    partial_sums,
    path_from_innovations,
    simulate_path,
    truncation_tail,
)
from .cf_oracle import (
    aggregated_coefficients,
    cf_convergence_sweep,
    exact_fdd_log_cf,
    limit_log_cf,
    v_transform,
)
from .verification import build_report, ecf, ks_distance, tail_ratio_check

__version__ = "0.1.0"
