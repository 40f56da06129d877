import numpy as np
import pytest

from gibbswave.core.errors import ContractionError, DomainError
from gibbswave.dynamics import FlowParams, evolve, linear_substep, local_time_bound, picard_solve
from gibbswave.dynamics.flow import FlowScheme
from gibbswave.dynamics.picard import picard_iterate
from gibbswave.measures.gibbs import sample_gaussian
from gibbswave.spectral import SpectralState, sobolev_norm
from gibbswave.verify.validate import check_picard


def test_zero_data_stays_zero(flow8):
    solution = picard_solve(SpectralState.zeros(8), 0.1, flow8)
    np.testing.assert_array_equal(solution.state.coeffs, 0.0)
    assert solution.iterations == 1
    assert solution.differences == (0.0,)


def test_uncoupled_iteration_is_free_evolution(flow8, mu_sample):
    solution = picard_solve(mu_sample, 0.3, flow8.linear())
    assert solution.iterations == 1
    np.testing.assert_allclose(solution.state.coeffs, linear_substep(mu_sample, 0.3).coeffs, atol=1e-14)


def test_zero_horizon_returns_copy(flow8, mu_sample):
    state, diffs = picard_iterate(mu_sample.coeffs, 0.0, flow8)
    assert diffs == []
    np.testing.assert_array_equal(state, mu_sample.coeffs)


def test_agrees_with_splitting_integrator():
    result = check_picard(alpha=1.0, seed=0)
    assert result.passed, result.detail
    assert result.value <= 1e-6


def test_differences_contract(quad16):
    params = FlowParams(1.0, 16, 1e-4, quad16)
    solution = picard_solve(sample_gaussian(16, 0, 3), 0.05, params)
    diffs = solution.differences
    assert all(b * 2.0 <= a for a, b in zip(diffs, diffs[1:]))


def test_picard_scheme_matches_strang(flow8, mu_sample):
    picard_params = FlowParams(1.0, 8, 0.01, flow8.quad, FlowScheme.PICARD, picard_mesh=21)
    by_picard, _ = evolve(mu_sample, picard_params, 0.05)
    by_strang, _ = evolve(mu_sample, flow8.with_dt(1e-4), 0.05)
    assert sobolev_norm(by_picard.coeffs - by_strang.coeffs, 0.0) < 1e-6


def test_large_data_long_horizon_fails_to_contract(quad8):
    params = FlowParams(1.0, 8, 1e-3, quad8)
    with pytest.raises(ContractionError) as info:
        picard_solve(SpectralState.mode(1, 8, 10.0), 2.0, params)
    assert len(info.value.differences) >= 2


def test_time_bound_reported(flow8, mu_sample):
    solution = picard_solve(mu_sample, 0.01, flow8)
    assert solution.time_bound == pytest.approx(local_time_bound(sobolev_norm(mu_sample, 0.25)))


def test_argument_checks(flow8, mu_sample):
    with pytest.raises(DomainError):
        picard_solve(SpectralState.zeros(4), 0.1, flow8)
    with pytest.raises(DomainError):
        picard_iterate(mu_sample.coeffs, 0.1, flow8, k_iters=0)
    with pytest.raises(DomainError):
        picard_iterate(mu_sample.coeffs, 0.1, flow8, time_mesh=2)
