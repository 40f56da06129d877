"""Gaussian measure mu_N, Gibbs measure rho_N and their moments."""

from gibbswave.measures.gibbs import (
    TailParameter,
    WeightedEnsemble,
    effective_sample_size,
    ensemble_from_csv,
    ensemble_to_csv,
    exp_moment_product,
    gibbs_log_weight,
    potential_energy,
    sample_ensemble,
    sample_gaussian,
    sample_gaussian_batch,
    sample_wave_data,
    small_ball_bound,
    tail_probability_bound,
)

__all__ = [
    "TailParameter",
    "WeightedEnsemble",
    "effective_sample_size",
    "ensemble_from_csv",
    "ensemble_to_csv",
    "exp_moment_product",
    "gibbs_log_weight",
    "potential_energy",
    "sample_ensemble",
    "sample_gaussian",
    "sample_gaussian_batch",
    "sample_wave_data",
    "small_ball_bound",
    "tail_probability_bound",
]
