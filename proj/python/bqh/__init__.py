"""Invariant Berezin symbol calculus on the modular upper half-plane.

Thin Python surface over the C++ core: special-function evaluation
(delta, phi and their tracked logarithms), the closed-form kernel
families, quadrature star products, traces, Gram-matrix positivity
checks, and the named verification suites.
"""

from bqh._core import (
    Kernel,
    c_t,
    constant_kernel,
    cross_ratio,
    delta,
    delta1,
    difference_family_kernel,
    fundamental_domain_area,
    hat_norm,
    k_constant,
    lemma_shift_kernel,
    log_cross_ratio,
    log_delta,
    log_phi,
    normalization_constant,
    phi,
    phi_power_kernel,
    psd_check,
    rank_one_kernel,
    reduce_to_fundamental_domain,
    run_suite,
    star_eval,
    suite_names,
    theta_kernel,
    trace,
    weight_d,
)

__all__ = [
    "Kernel",
    "c_t",
    "constant_kernel",
    "cross_ratio",
    "delta",
    "delta1",
    "difference_family_kernel",
    "fundamental_domain_area",
    "hat_norm",
    "k_constant",
    "lemma_shift_kernel",
    "log_cross_ratio",
    "log_delta",
    "log_phi",
    "normalization_constant",
    "phi",
    "phi_power_kernel",
    "psd_check",
    "rank_one_kernel",
    "reduce_to_fundamental_domain",
    "run_suite",
    "star_eval",
    "suite_names",
    "theta_kernel",
    "trace",
    "weight_d",
]
