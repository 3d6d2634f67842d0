"""Exact analysis of bounded multiplicative systems of step functions."""

from ._core import (
    BoundedSystem,
    MultsysError,
    StepFunction,
    builtin,
    dilated_system,
    geometric_tau,
    greedy_subsequence,
    hoeffding_tail,
    khintchine_constant,
    multiplicative_error,
    rademacher,
    reduce,
    run,
    truncated_mu,
    verify_domination,
    verify_khintchine,
    verify_rubinshtein,
)

__version__ = "0.1.0"
