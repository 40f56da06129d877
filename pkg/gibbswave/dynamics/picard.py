"""
Picard iteration on the Duhamel form of the truncated equation.

In the interaction picture w(t) = S(-t) u(t), S(t) = exp(-i z t), the
Galerkin system becomes

    w(t) = u0 - i * integral_0^t S(-tau) z^{-1} F_N(Re S(tau) w(tau)) dtau

with F_N(v) = S_N(|v|^alpha v). The iteration starts from w = u0 (the free
evolution) and evaluates the tau-integral with cumulative Simpson on a uniform
mesh of [0, T]. It is an independent route to Phi_N(T) and is used to check
the splitting integrator, not to replace it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import cumulative_simpson

from gibbswave.core.errors import ContractionError, DomainError
from gibbswave.core.logger import log
from gibbswave.dynamics.flow import FlowParams, local_time_bound, nonlinear_pairing
from gibbswave.spectral.basis import SpectralState, StateLike, as_coeffs, eigenvalues, sobolev_norm

DEFAULT_TIME_MESH = 201
DEFAULT_ITERATIONS = 8
MIN_CONTRACTION = 2.0
# differences below floor * (1 + ||u0||) count as converged
_FLOOR = 1e-13


@dataclass(frozen=True)
class PicardSolution:
    state: SpectralState
    differences: Tuple[float, ...]
    time_bound: float

    @property
    def iterations(self) -> int:
        return len(self.differences)


def _cumulative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    # cumulative_simpson is applied to real and imaginary parts separately
    re = cumulative_simpson(values.real, x=times, axis=0, initial=0.0)
    im = cumulative_simpson(values.imag, x=times, axis=0, initial=0.0)
    return re + 1j * im


def picard_iterate(
    coeffs0: np.ndarray,
    horizon: float,
    params: FlowParams,
    k_iters: int = DEFAULT_ITERATIONS,
    time_mesh: int = DEFAULT_TIME_MESH,
    min_contraction: float = MIN_CONTRACTION,
) -> Tuple[np.ndarray, List[float]]:
    """
    Raw-array Picard solve (leading axes of ``coeffs0`` are samples). Returns
    u^K(horizon) and the sup-in-time successive-difference norms.
    """
    if k_iters < 1:
        raise DomainError(f"Picard needs at least one iteration, got {k_iters}")
    if time_mesh < 3:
        raise DomainError(f"Picard time mesh needs >= 3 points, got {time_mesh}")
    if horizon == 0.0:
        return np.array(coeffs0, copy=True), []

    z = eigenvalues(coeffs0.shape[-1])
    times = np.linspace(0.0, horizon, time_mesh)
    # phases[k] = exp(-i z t_k), broadcast against (n_t, *batch, N)
    phases = np.exp(-1j * np.multiply.outer(times, z))
    phases = phases.reshape((time_mesh,) + (1,) * (coeffs0.ndim - 1) + (z.size,))

    w = np.broadcast_to(coeffs0, (time_mesh,) + coeffs0.shape).copy()
    floor = _FLOOR * (1.0 + float(np.max(np.linalg.norm(coeffs0, axis=-1), initial=0.0)))
    differences: List[float] = []
    for k in range(k_iters):
        if params.coupling == 0.0:
            w_next = np.broadcast_to(coeffs0, w.shape).copy()
        else:
            u = w * phases
            force = nonlinear_pairing(np.ascontiguousarray(u.real), params.alpha, params.quad)
            integrand = np.conj(phases) * force / z
            w_next = coeffs0 - 1j * params.coupling * _cumulative(integrand, times)
        diff = float(np.max(np.linalg.norm(w_next - w, axis=-1)))
        differences.append(diff)
        w = w_next
        log.debug("Picard iteration %d: sup difference %.3e", k + 1, diff)
        if diff <= floor:
            break
        if k > 0 and diff * min_contraction > differences[-2]:
            raise ContractionError(differences)
    return w[-1] * phases[-1], differences


def picard_solve(
    u0: StateLike,
    horizon: float,
    params: FlowParams,
    k_iters: int = DEFAULT_ITERATIONS,
    time_mesh: int = DEFAULT_TIME_MESH,
    *,
    sigma: float = 0.25,
    c: float = 0.1,
    gamma: float = 2.0,
    min_contraction: float = MIN_CONTRACTION,
) -> PicardSolution:
    """
    u^K(T) of the Duhamel fixed-point iteration. Each successive difference must
    shrink by at least ``min_contraction`` until it reaches round-off, else
    ContractionError carries the whole sequence. Horizons beyond the
    local-existence heuristic c (1 + ||u0||_{H^sigma})^{-gamma} are allowed
    but logged.
    """
    coeffs = as_coeffs(u0)
    if coeffs.shape[-1] != params.n_modes:
        raise DomainError(f"state has {coeffs.shape[-1]} modes, flow expects {params.n_modes}")
    norm = float(np.max(sobolev_norm(coeffs, sigma)))
    bound = local_time_bound(norm, c, gamma)
    if abs(horizon) > bound:
        log.warning(
            "Picard horizon %g exceeds local bound %.3g for ||u0||_H^%g = %.3g; relying on contraction check",
            horizon, bound, sigma, norm,
        )
    state, differences = picard_iterate(coeffs, horizon, params, k_iters, time_mesh, min_contraction)
    return PicardSolution(SpectralState(state), tuple(differences), bound)
