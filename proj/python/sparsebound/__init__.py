"""Lower bounds and estimators for sparse recovery under sensing-matrix perturbation."""

from ._core import (
    SparseboundError,
    ccrb,
    d_hcrb_factor,
    figure,
    fisher_information,
    g_function,
    gamma_approx,
    gamma_bounds,
    hcrb_general,
    hcrb_unit,
    run_trials,
    transition_ce,
)

__all__ = [
    "SparseboundError",
    "ccrb",
    "d_hcrb_factor",
    "figure",
    "fisher_information",
    "g_function",
    "gamma_approx",
    "gamma_bounds",
    "hcrb_general",
    "hcrb_unit",
    "run_trials",
    "transition_ce",
]
