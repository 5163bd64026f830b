"""Simultaneous confidence bands for the calibration curve of binary predictions."""

import json

from ._core import (
    StepBand,
    __version__,
    beta_quantile,
    binom_cdf,
    calibration_band,
    cp_lower,
    cp_upper,
    family_value,
    hosmer_lemeshow,
    isotonic_regression,
    isotonicity_pvalue,
    reg_inc_beta,
)
from . import _core


def analyze(predictions, outcomes, alpha=0.05, method="nc", K=1000, extrapolate=True,
            unit_domain=True, hl_bins=10):
    """Band, calibration verdict, isotonicity test and Hosmer-Lemeshow as a dict.

    K=None uses the full index family.
    """
    text = _core._analyze_json(list(predictions), list(outcomes), alpha, method, K,
                               extrapolate, unit_domain, hl_bins)
    return json.loads(text)


def simulate(family, s, n=512, alpha=0.05, method="raw", K=1000, reps=200, seed=1, threads=0):
    """Monte-Carlo summary: coverage, isotonicity rejection rate, mean widths."""
    return json.loads(_core._simulate_json(family, s, n, alpha, method, K, reps, seed, threads))


__all__ = [
    "StepBand",
    "analyze",
    "beta_quantile",
    "binom_cdf",
    "calibration_band",
    "cp_lower",
    "cp_upper",
    "family_value",
    "hosmer_lemeshow",
    "isotonic_regression",
    "isotonicity_pvalue",
    "reg_inc_beta",
    "simulate",
]
