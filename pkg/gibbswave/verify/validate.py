"""
Self-check suite run by ``gibbswave validate``: structural identities of the
spectral layer and the integrator that must hold on any correct build.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from gibbswave.core.logger import log
from gibbswave.dynamics.flow import (
    FlowParams,
    Observers,
    divergence_probe,
    energy_drift,
    evolve,
    hamiltonian,
    hamiltonian_complex_form,
    linear_substep,
    vector_field,
)
from gibbswave.dynamics.picard import picard_solve
from gibbswave.measures.gibbs import sample_gaussian, sample_gaussian_batch
from gibbswave.measures.rng import normal_pairs
from gibbswave.spectral.basis import SpectralState, sobolev_norm
from gibbswave.spectral.quadrature import (
    QuadratureKind,
    RadialQuadrature,
    analyze,
    grid_values,
    synthesize,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    @staticmethod
    def header() -> List[str]:
        return ["check", "value", "tolerance", "pass", "detail"]

    def row(self) -> list:
        return [self.name, self.value, self.tolerance, self.passed, self.detail]


def _below(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, float(value), tolerance, bool(value <= tolerance), detail)


def check_orthonormality(kind: QuadratureKind = QuadratureKind.UNIFORM_SINE, m_points: int = 256) -> CheckResult:
    """max_{n,m <= capacity} |<e_n, e_m>_quad - delta_nm|."""
    quad = RadialQuadrature(m_points, kind)
    n = quad.capacity
    basis = grid_values(np.eye(n), quad)
    gram = (basis * quad.weights) @ basis.T
    err = float(np.max(np.abs(gram - np.eye(n))))
    return _below(f"orthonormality[{quad.kind.value}]", err, 1e-12, f"M={m_points}, N={n}")


def check_round_trip(seed: int, n_modes: int = 16, m_points: int = 128) -> CheckResult:
    quad = RadialQuadrature(m_points)
    h, l = normal_pairs(seed, 0, n_modes)
    state = SpectralState(h + 1j * l)
    back = analyze(synthesize(state, quad), quad, n_modes)
    err = float(np.max(np.abs(back.coeffs - state.coeffs)))
    return _below("synthesize_analyze_round_trip", err, 1e-12, f"N={n_modes}, M={m_points}")


def check_linear_periodicity(seed: int, n_modes: int = 32) -> CheckResult:
    x = sample_gaussian(n_modes, seed, 1)
    y = linear_substep(x, 2.0)
    err = float(np.max(np.abs(y.coeffs - x.coeffs)) / np.max(np.abs(x.coeffs)))
    return _below("linear_time2_periodicity", err, 1e-13)


def check_linear_isometry(seed: int, n_modes: int = 32) -> CheckResult:
    x = sample_gaussian(n_modes, seed, 2)
    y = linear_substep(x, 0.731)
    worst = 0.0
    for s in (0.0, 0.25, 1.0):
        a, b = sobolev_norm(x, s), sobolev_norm(y, s)
        worst = max(worst, abs(a - b) / a)
    return _below("linear_hs_isometry", worst, 1e-13, "s in {0, 0.25, 1}")


def _drift(states: np.ndarray, params: FlowParams, horizon: float, spacing: float = 1e-2) -> np.ndarray:
    # sup over a fixed time mesh, shared by every dt
    cadence = max(1, int(round(spacing / params.dt)))
    _, record = evolve(states, params, horizon, Observers(cadence=cadence))
    return np.asarray(energy_drift(record))


def check_energy_drift(alpha: float, seed: int, n_modes: int = 32, dt: float = 1e-3,
                       horizon: float = 1.0, n_samples: int = 10) -> List[CheckResult]:
    """Sup-in-time relative drift at dt and its ratio to the drift at dt/2 (second order gives ~4)."""
    quad = RadialQuadrature.for_modes(n_modes)
    params = FlowParams(alpha, n_modes, dt, quad)
    states = sample_gaussian_batch(n_modes, seed, range(n_samples)).coeffs
    coarse = _drift(states, params, horizon)
    fine = _drift(states, params.with_dt(dt / 2), horizon)
    ratio = coarse / fine
    worst_ratio = float(ratio[np.argmax(np.abs(np.log(ratio / 4.0)))])
    return [
        _below("energy_drift", float(coarse.max()), 1e-5, f"N={n_modes}, dt={dt}, T={horizon}"),
        CheckResult("energy_drift_order", worst_ratio, 4.0, bool(np.all((ratio >= 3.5) & (ratio <= 4.5))),
                    "drift(dt)/drift(dt/2) in [3.5, 4.5]"),
    ]


def check_energy_forms(alpha: float, seed: int, n_modes: int = 16) -> CheckResult:
    quad = RadialQuadrature.for_modes(n_modes)
    states = sample_gaussian_batch(n_modes, seed, range(20)).coeffs
    h_ab = np.asarray(hamiltonian(states, alpha, quad))
    h_cx = np.asarray(hamiltonian_complex_form(states, alpha, quad))
    return _below("energy_two_forms", float(np.max(np.abs(h_ab - h_cx) / h_ab)), 1e-10)


def check_divergence(alpha: float, seed: int, n_modes: int = 8, trials: int = 100) -> CheckResult:
    quad = RadialQuadrature.for_modes(n_modes)
    worst = 0.0
    for i in range(trials):
        x = sample_gaussian(n_modes, seed, 1000 + i)
        scale = max(1.0, float(np.max(np.abs(vector_field(x, alpha, quad).coeffs))))
        worst = max(worst, abs(divergence_probe(x, alpha, quad, 1e-5)) / scale)
    return _below("divergence_free_field", worst, 1e-6, f"{trials} random points, N={n_modes}")


def check_picard(alpha: float, seed: int, sigma: float = 0.25, n_modes: int = 16,
                 horizon: float = 0.05, dt: float = 1e-4, k_iters: int = 8) -> CheckResult:
    quad = RadialQuadrature.for_modes(n_modes)
    params = FlowParams(alpha, n_modes, dt, quad)
    u0 = sample_gaussian(n_modes, seed, 3)
    split, _ = evolve(u0, params, horizon)
    picard = picard_solve(u0, horizon, params, k_iters, sigma=sigma)
    err = sobolev_norm(split.coeffs - picard.state.coeffs, sigma)
    diffs = ", ".join(f"{d:.1e}" for d in picard.differences)
    return _below("splitting_vs_picard", err, 1e-6, f"differences [{diffs}]")


def validation_suite(alpha: float = 1.0, seed: int = 0, sigma: float = 0.25) -> List[CheckResult]:
    checks: List[Tuple[str, Callable[[], object]]] = [
        ("orthonormality", lambda: check_orthonormality(QuadratureKind.UNIFORM_SINE)),
        ("orthonormality-gl", lambda: check_orthonormality(QuadratureKind.GAUSS_LEGENDRE)),
        ("round trip", lambda: check_round_trip(seed)),
        ("periodicity", lambda: check_linear_periodicity(seed)),
        ("isometry", lambda: check_linear_isometry(seed)),
        ("energy forms", lambda: check_energy_forms(alpha, seed)),
        ("divergence", lambda: check_divergence(alpha, seed)),
        ("energy drift", lambda: check_energy_drift(alpha, seed)),
        ("picard", lambda: check_picard(alpha, seed, sigma)),
    ]
    results: List[CheckResult] = []
    for label, run in checks:
        log.debug("validate: %s", label)
        out = run()
        results.extend(out if isinstance(out, list) else [out])
    for r in results:
        log.info("  %-32s %.3e (tol %.1e) %s", r.name, r.value, r.tolerance, "pass" if r.passed else "FAIL")
    return results
