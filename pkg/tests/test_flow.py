import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from gibbswave.core.errors import CapacityError, DomainError, IntegratorAbort
from gibbswave.dynamics import (
    FlowParams,
    FlowScheme,
    Observers,
    TrajectoryRecord,
    divergence_partials,
    divergence_probe,
    energy_drift,
    evolve,
    evolve_to,
    hamiltonian,
    hamiltonian_complex_form,
    lie_step,
    linear_substep,
    local_time_bound,
    nonlinear_substep,
    strang_step,
    vector_field,
    wave_propagate,
)
from gibbswave.dynamics.flow import cadence_stops, sobolev_series
from gibbswave.measures.gibbs import sample_gaussian, sample_gaussian_batch, sample_wave_data
from gibbswave.spectral import RadialQuadrature, SpectralState, complexify, sobolev_norm


def _quartic_integral():
    # int_0^1 |e_1|^4 r^2 dr
    value, _ = scipy_quad(lambda r: 4.0 * math.sin(math.pi * r) ** 4 / r ** 2, 0.0, 1.0, epsabs=1e-14)
    return value


def test_hamiltonian_examples():
    quad = RadialQuadrature(256)
    assert hamiltonian(SpectralState.zeros(4), 1.0, quad) == 0.0
    # pure velocity: no potential
    assert hamiltonian(SpectralState.mode(1, 4, 1j), 1.0, quad) == pytest.approx(0.5 * math.pi ** 2)
    # e_1 with alpha close to 2: kinetic pi^2/2 plus ||e_1||_4^4 / 4
    expected = 0.5 * math.pi ** 2 + _quartic_integral() / 4.0
    assert hamiltonian(SpectralState.mode(1, 4), 1.999999999, quad) == pytest.approx(expected, rel=1e-7)
    assert hamiltonian(SpectralState.mode(1, 4), 1.0, quad, coupling=0.0) == pytest.approx(0.5 * math.pi ** 2)


def test_energy_forms_agree(quad16):
    states = sample_gaussian_batch(16, 8, range(20)).coeffs
    np.testing.assert_allclose(
        hamiltonian_complex_form(states, 1.0, quad16), hamiltonian(states, 1.0, quad16), rtol=1e-10
    )


def test_vector_field_examples():
    quad = RadialQuadrature(256)
    v = vector_field(SpectralState.mode(1, 4, 1j), 1.0, quad)
    np.testing.assert_allclose(v.coeffs, [math.pi, 0, 0, 0], atol=1e-14)

    # a_1 = 1 with alpha -> 2: b_1' = -pi - (1/pi) <e_1^3, e_1>, and <e_1^3, e_1> = ||e_1||_4^4
    v = vector_field(SpectralState.mode(1, 4), 1.999999999, quad)
    assert v.coeffs[0].real == 0.0
    assert v.coeffs[0].imag == pytest.approx(-math.pi - _quartic_integral() / math.pi, rel=1e-7)

    free = vector_field(SpectralState.mode(1, 4), 1.0, quad, coupling=0.0)
    assert free.coeffs[0].imag == pytest.approx(-math.pi)


def test_linear_flow_is_two_periodic_and_isometric():
    x = sample_gaussian(32, 4, 1)
    np.testing.assert_allclose(linear_substep(x, 2.0).coeffs, x.coeffs, atol=1e-13 * np.max(np.abs(x.coeffs)))
    y = linear_substep(x, 0.731)
    for s in (0.0, 0.25, 1.0):
        assert sobolev_norm(y, s) == pytest.approx(sobolev_norm(x, s), rel=1e-13)


def test_linear_flow_matches_real_wave_equation():
    data = sample_wave_data(8, 21, 0)
    np.testing.assert_allclose(
        complexify(wave_propagate(data, 0.37)).coeffs,
        linear_substep(complexify(data), 0.37).coeffs,
        atol=1e-13,
    )


def test_nonlinear_substep_keeps_displacement(quad8, mu_sample):
    out = nonlinear_substep(mu_sample, 0.3, 1.0, quad8)
    np.testing.assert_array_equal(out.coeffs.real, mu_sample.coeffs.real)
    assert not np.allclose(out.coeffs.imag, mu_sample.coeffs.imag)


def test_uncoupled_step_is_free_rotation(quad8, mu_sample):
    params = FlowParams(1.0, 8, 0.01, quad8, coupling=0.0)
    np.testing.assert_allclose(strang_step(mu_sample, params).coeffs,
                               linear_substep(mu_sample, 0.01).coeffs, atol=1e-15)
    np.testing.assert_allclose(lie_step(mu_sample, params).coeffs,
                               linear_substep(mu_sample, 0.01).coeffs, atol=1e-15)


def _convergence_ratio(scheme, quad, u0, horizon=0.2, dt=0.004):
    finals = []
    for h in (dt, dt / 2, dt / 4):
        final, _ = evolve(u0, FlowParams(1.0, 8, h, quad, scheme), horizon)
        finals.append(final.coeffs)
    e1 = np.linalg.norm(finals[0] - finals[1])
    e2 = np.linalg.norm(finals[1] - finals[2])
    return e1 / e2


def test_strang_is_second_order_and_lie_first(quad8, mu_sample):
    assert 3.5 <= _convergence_ratio(FlowScheme.STRANG, quad8, mu_sample) <= 4.5
    assert 1.6 <= _convergence_ratio(FlowScheme.LIE, quad8, mu_sample) <= 2.4


def test_zero_horizon_records_single_row(flow8, mu_sample):
    final, record = evolve(mu_sample, flow8, 0.0, Observers(sobolev_indices=(0.25,), mode_indices=(1,)))
    np.testing.assert_array_equal(final.coeffs, mu_sample.coeffs)
    assert len(record) == 1
    assert record.header() == ["time", "energy", "hs_0.25", "re_c1", "im_c1"]


def test_forward_then_backward_returns_to_start(flow8, mu_sample):
    forward, _ = evolve(mu_sample, flow8, 0.5)
    back, record = evolve(forward, flow8, -0.5)
    np.testing.assert_allclose(back.coeffs, mu_sample.coeffs, atol=1e-10)
    assert record.times[-1] == -0.5
    assert np.all(np.diff(record.times) < 0)


def test_horizon_landing_with_partial_step(flow8, mu_sample):
    _, record = evolve(mu_sample, flow8.with_dt(0.03), 0.1, Observers(cadence=2))
    np.testing.assert_allclose(record.times, [0.0, 0.06, 0.1])
    assert cadence_stops(0.0, 0.01, 1) == []
    np.testing.assert_allclose(cadence_stops(-0.05, 0.01, 2), [-0.02, -0.04, -0.05])


def test_energy_drift_small(flow8, mu_sample):
    _, record = evolve(mu_sample, flow8, 1.0, Observers(cadence=50))
    assert energy_drift(record) <= 1e-5


def test_batched_evolution_matches_rows(flow8, mu_batch):
    final, record = evolve(mu_batch, flow8, 0.05, Observers(cadence=50))
    single, _ = evolve(mu_batch[3], flow8, 0.05)
    np.testing.assert_allclose(final.coeffs[3], single.coeffs, atol=1e-14)
    assert record.energies.shape == (2, 12)


def test_evolve_to_times(flow8, mu_sample):
    states = evolve_to(mu_sample, flow8, [0.0, 0.02, 0.05])
    assert len(states) == 3
    np.testing.assert_array_equal(states[0].coeffs, mu_sample.coeffs)
    direct, _ = evolve(mu_sample, flow8, 0.05)
    np.testing.assert_allclose(states[-1].coeffs, direct.coeffs, atol=1e-14)


def test_divergence_free(quad8):
    for i in range(5):
        x = sample_gaussian(8, 99, i)
        partials = divergence_partials(x, 1.0, quad8)
        assert partials.shape == (16,)
        # a' depends on b only and b' on a only
        np.testing.assert_allclose(partials, 0.0, atol=1e-6)
        assert abs(divergence_probe(x, 1.0, quad8)) < 1e-6
    with pytest.raises(DomainError):
        divergence_probe(sample_gaussian_batch(8, 1, range(2)), 1.0, quad8)


def test_non_finite_state_aborts_with_sample_index(quad8):
    coeffs = np.stack([sample_gaussian(8, 1, k).coeffs for k in range(3)])
    coeffs[1] *= 1e100
    params = FlowParams(1.0, 8, 1.0, quad8)
    with np.errstate(all="ignore"), pytest.raises(IntegratorAbort) as info:
        evolve(coeffs, params, 10.0)
    assert info.value.sample_indices == (1,)
    assert info.value.step is not None


def test_flow_params_validation(quad8):
    with pytest.raises(DomainError):
        FlowParams(2.0, 8, 1e-3, quad8)
    with pytest.raises(DomainError):
        FlowParams(1.0, 8, 0.0, quad8)
    with pytest.raises(DomainError):
        FlowParams(1.0, 8, 1e-3, quad8, coupling=-1.0)
    with pytest.raises(CapacityError):
        FlowParams(1.0, 9, 1e-3, quad8)
    params = FlowParams(1.0, 8, 1e-3, quad8, scheme="lie")
    assert params.scheme is FlowScheme.LIE
    assert params.linear().coupling == 0.0
    assert params.with_modes(4).n_modes == 4


def test_evolve_rejects_mismatched_state(flow8):
    with pytest.raises(DomainError):
        evolve(SpectralState.zeros(4), flow8, 0.1)
    with pytest.raises(DomainError):
        evolve(SpectralState.zeros(8), flow8, 0.1, Observers(mode_indices=(9,)))


def test_local_time_bound():
    assert local_time_bound(0.0) == pytest.approx(0.1)
    assert local_time_bound(1.0) == pytest.approx(0.025)
    assert local_time_bound(3.0, c=1.0, gamma=1.0) == pytest.approx(0.25)


def test_trajectory_record_validation(tmp_path):
    with pytest.raises(DomainError):
        TrajectoryRecord(np.array([0.1, 0.2]), np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        TrajectoryRecord(np.array([0.0, 0.2, 0.1]), np.array([1.0, 1.0, 1.0]))
    with pytest.raises(DomainError):
        TrajectoryRecord(np.array([0.0, 0.1]), np.array([1.0]))
    record = TrajectoryRecord(np.array([0.0, 0.1]), np.array([2.0, 2.5]), {0.0: np.array([1.0, 1.0])})
    assert energy_drift(record) == pytest.approx(0.25)
    path = record.to_csv(tmp_path / "trajectory.csv")
    assert path.read_text(encoding="utf-8").splitlines() == ["time,energy,hs_0", "0,2,1", "0.10000000000000001,2.5,1"]


def test_sobolev_series_from_record(flow8, mu_sample):
    _, record = evolve(mu_sample, flow8, 0.01, Observers(sobolev_indices=(0.0, 0.25)))
    series = sobolev_series(record, 0.25)
    assert series.shape == record.times.shape
    assert series[0] == pytest.approx(sobolev_norm(mu_sample, 0.25))
