"""
The truncated Hamiltonian flow Phi_N on E_N.

In coordinates c_n = a_n + i b_n the Galerkin system reads

    a_n' =  z_n b_n
    b_n' = -z_n a_n - z_n^{-1} <|v|^alpha v, e_n>,      v = sum_m a_m e_m

with conserved energy

    H = 1/2 sum z_n^2 (a_n^2 + b_n^2) + 1/(alpha+2) ||v||^{alpha+2}_{L^{alpha+2}}.

It splits into two flows that are solved exactly: the rotation
c_n -> exp(-i z_n t) c_n, and the kick that moves b with a frozen (a does not
change under it). Strang composition of the two is second order and
preserves phase-space volume exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from gibbswave.core.errors import DomainError, IntegratorAbort
from gibbswave.core.logger import log
from gibbswave.core.records import write_csv
from gibbswave.spectral.basis import (
    SobolevLike,
    SpectralState,
    StateLike,
    WaveDataPair,
    as_coeffs,
    eigenvalues,
    sobolev_norm,
    sqrt_laplacian_pow,
)
from gibbswave.spectral.quadrature import (
    RadialQuadrature,
    grid_coefficients,
    grid_values,
    lebesgue_norm,
    lebesgue_power,
)

# Final partial steps shorter than this fraction of dt are dropped.
_STEP_EPS = 1e-12


class FlowScheme(str, enum.Enum):
    STRANG = "strang"
    LIE = "lie"
    PICARD = "picard"


@dataclass(frozen=True, eq=False)
class FlowParams:
    """
    Everything Phi_N needs. ``coupling`` scales the nonlinear term; 0 gives
    the free (linear) flow, negative values would be the focusing model and
    are rejected.
    """

    alpha: float
    n_modes: int
    dt: float
    quad: RadialQuadrature
    scheme: FlowScheme = FlowScheme.STRANG
    coupling: float = 1.0
    picard_mesh: int = 21
    picard_iterations: int = 8

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", FlowScheme(self.scheme))
        if not 0.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.dt > 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.n_modes < 1:
            raise DomainError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.coupling < 0.0:
            raise DomainError("negative coupling (focusing model) is not supported")
        self.quad.require(self.n_modes)

    @property
    def z(self) -> np.ndarray:
        return eigenvalues(self.n_modes)

    def linear(self) -> "FlowParams":
        """Same parameters with the nonlinearity switched off."""
        return FlowParams(
            self.alpha, self.n_modes, self.dt, self.quad, self.scheme, 0.0,
            self.picard_mesh, self.picard_iterations,
        )

    def with_modes(self, n_modes: int) -> "FlowParams":
        return FlowParams(
            self.alpha, n_modes, self.dt, self.quad, self.scheme, self.coupling,
            self.picard_mesh, self.picard_iterations,
        )

    def with_dt(self, dt: float) -> "FlowParams":
        return FlowParams(
            self.alpha, self.n_modes, dt, self.quad, self.scheme, self.coupling,
            self.picard_mesh, self.picard_iterations,
        )


# ---------------------------------------------------------------------------
# Array kernels (trailing axis = modes, leading axes = samples)
# ---------------------------------------------------------------------------


def nonlinear_pairing(a: np.ndarray, alpha: float, quad: RadialQuadrature) -> np.ndarray:
    """<|v|^alpha v, e_n> for v = sum a_m e_m, by quadrature on the oversampled grid."""
    v = grid_values(np.ascontiguousarray(a), quad)
    return grid_coefficients(np.abs(v) ** alpha * v, quad, a.shape[-1])


def rotate(coeffs: np.ndarray, t: float) -> np.ndarray:
    z = eigenvalues(coeffs.shape[-1])
    return coeffs * np.exp(-1j * z * t)


def kick(coeffs: np.ndarray, t: float, alpha: float, quad: RadialQuadrature, coupling: float = 1.0) -> np.ndarray:
    if coupling == 0.0 or t == 0.0:
        return coeffs
    z = eigenvalues(coeffs.shape[-1])
    force = nonlinear_pairing(coeffs.real, alpha, quad)
    return coeffs - 1j * (t * coupling) * force / z


def _strang(coeffs: np.ndarray, h: float, params: FlowParams) -> np.ndarray:
    half = rotate(coeffs, 0.5 * h)
    return rotate(kick(half, h, params.alpha, params.quad, params.coupling), 0.5 * h)


def _lie(coeffs: np.ndarray, h: float, params: FlowParams) -> np.ndarray:
    return rotate(kick(coeffs, h, params.alpha, params.quad, params.coupling), h)


def _picard(coeffs: np.ndarray, h: float, params: FlowParams) -> np.ndarray:
    from gibbswave.dynamics.picard import picard_iterate

    state, _ = picard_iterate(coeffs, h, params, params.picard_iterations, params.picard_mesh)
    return state


_STEPPERS: Dict[FlowScheme, Callable[[np.ndarray, float, FlowParams], np.ndarray]] = {
    FlowScheme.STRANG: _strang,
    FlowScheme.LIE: _lie,
    FlowScheme.PICARD: _picard,
}


# ---------------------------------------------------------------------------
# Energy and vector field
# ---------------------------------------------------------------------------


def hamiltonian(state: StateLike, alpha: float, quad: RadialQuadrature, coupling: float = 1.0):
    """
    H = 1/2 sum z_n^2 (a_n^2 + b_n^2) + 1/(alpha+2) ||Re u||^{alpha+2}_{L^{alpha+2}}.
    The potential is scaled by ``coupling`` so that H stays the conserved
    quantity of the flow with the same coupling.
    """
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    z = eigenvalues(coeffs.shape[-1])
    kinetic = 0.5 * np.sum(z ** 2 * (coeffs.real ** 2 + coeffs.imag ** 2), axis=-1)
    value = kinetic
    if coupling != 0.0:
        potential = lebesgue_power(np.ascontiguousarray(coeffs.real), alpha + 2.0, quad) / (alpha + 2.0)
        value = kinetic + coupling * potential
    return float(value) if np.ndim(value) == 0 else value


def hamiltonian_complex_form(state: StateLike, alpha: float, quad: RadialQuadrature):
    """
    The same energy evaluated on the grid from the complex field:
    1/2 ||sqrt(-Laplacian) u||^2_{L^2} + 1/(alpha+2) ||Re u||^{alpha+2}_{L^{alpha+2}}.
    """
    coeffs = as_coeffs(state)
    gradient = lebesgue_norm(sqrt_laplacian_pow(coeffs, 1.0), 2.0, quad)
    potential = lebesgue_power(np.ascontiguousarray(coeffs.real), alpha + 2.0, quad) / (alpha + 2.0)
    value = 0.5 * np.asarray(gradient) ** 2 + potential
    return float(value) if np.ndim(value) == 0 else value


def vector_field(state: StateLike, alpha: float, quad: RadialQuadrature, coupling: float = 1.0) -> SpectralState:
    """Tangent (a', b') packed as a' + i b'."""
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    z = eigenvalues(coeffs.shape[-1])
    a_dot = z * coeffs.imag
    b_dot = -z * coeffs.real
    if coupling != 0.0:
        b_dot = b_dot - coupling * nonlinear_pairing(coeffs.real, alpha, quad) / z
    return SpectralState(a_dot + 1j * b_dot)


def divergence_partials(
    state: StateLike, alpha: float, quad: RadialQuadrature, h: float = 1e-5, coupling: float = 1.0
) -> np.ndarray:
    """
    Central differences [d a_n'/d a_n for n = 1..N] followed by
    [d b_n'/d b_n for n = 1..N] at one (unbatched) state.
    """
    if not h > 0:
        raise DomainError(f"finite-difference step must be positive, got {h}")
    coeffs = np.array(as_coeffs(state), copy=True)
    if coeffs.ndim != 1:
        raise DomainError("divergence probe works on a single state")
    n_modes = coeffs.shape[0]
    partials = np.empty(2 * n_modes)
    for n in range(n_modes):
        for offset, part, shift in ((0, "real", h), (n_modes, "imag", 1j * h)):
            plus = coeffs.copy()
            minus = coeffs.copy()
            plus[n] += shift
            minus[n] -= shift
            f_plus = getattr(vector_field(plus, alpha, quad, coupling).coeffs[n], part)
            f_minus = getattr(vector_field(minus, alpha, quad, coupling).coeffs[n], part)
            partials[offset + n] = (f_plus - f_minus) / (2.0 * h)
    return partials


def divergence_probe(
    state: StateLike, alpha: float, quad: RadialQuadrature, h: float = 1e-5, coupling: float = 1.0
) -> float:
    """Finite-difference divergence sum_n [d a_n'/d a_n + d b_n'/d b_n]; analytically 0."""
    return float(np.sum(divergence_partials(state, alpha, quad, h, coupling)))


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------


def linear_substep(state: StateLike, t: float) -> SpectralState:
    """Free flow c_n -> exp(-i z_n t) c_n; exact and 2-periodic in t."""
    return SpectralState(rotate(as_coeffs(state), t))


def nonlinear_substep(
    state: StateLike, t: float, alpha: float, quad: RadialQuadrature, coupling: float = 1.0
) -> SpectralState:
    """Exact potential flow: a fixed, b_n -> b_n - t z_n^{-1} <|v|^alpha v, e_n>."""
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    return SpectralState(kick(coeffs, t, alpha, quad, coupling))


def strang_step(state: StateLike, params: FlowParams) -> SpectralState:
    return SpectralState(_strang(as_coeffs(state), params.dt, params))


def lie_step(state: StateLike, params: FlowParams) -> SpectralState:
    return SpectralState(_lie(as_coeffs(state), params.dt, params))


# ---------------------------------------------------------------------------
# Time marching
# ---------------------------------------------------------------------------


def _check_finite(coeffs: np.ndarray, step: int, t: float) -> None:
    finite = np.isfinite(coeffs)
    if finite.all():
        return
    bad: Sequence[int] = ()
    if coeffs.ndim > 1:
        bad = np.flatnonzero(~finite.reshape(-1, coeffs.shape[-1]).all(axis=-1)).tolist()
    raise IntegratorAbort("non-finite coefficients", step=step, time=t, sample_indices=bad)


def march(coeffs: np.ndarray, params: FlowParams, stops: Sequence[float]) -> Iterator[Tuple[float, np.ndarray]]:
    """
    Advance raw coefficients through the increasing (or, for backward runs,
    decreasing) times ``stops``, taking full dt steps and one shortened step
    to land exactly on each stop. Yields (stop, coeffs) at every stop.
    """
    stepper = _STEPPERS[params.scheme]
    t = 0.0
    step = 0
    for stop in stops:
        distance = abs(stop - t)
        direction = math.copysign(1.0, stop - t)
        n_full = int(math.floor(distance / params.dt + _STEP_EPS))
        remainder = distance - n_full * params.dt
        for _ in range(n_full):
            coeffs = stepper(coeffs, direction * params.dt, params)
            step += 1
            t += direction * params.dt
            _check_finite(coeffs, step, t)
        if remainder > _STEP_EPS * params.dt:
            coeffs = stepper(coeffs, direction * remainder, params)
            step += 1
            _check_finite(coeffs, step, stop)
        t = stop
        yield stop, coeffs


def cadence_stops(horizon: float, dt: float, cadence: int) -> List[float]:
    """Times every ``cadence`` steps, plus the horizon itself."""
    if horizon == 0:
        return []
    interval = cadence * dt
    direction = math.copysign(1.0, horizon)
    count = int(math.floor(abs(horizon) / interval + _STEP_EPS))
    stops = [direction * k * interval for k in range(1, count + 1)]
    if not stops or abs(abs(stops[-1]) - abs(horizon)) > _STEP_EPS * dt:
        stops.append(horizon)
    else:
        stops[-1] = horizon
    return stops


@dataclass(frozen=True)
class Observers:
    """What evolve records, and how often (every ``cadence`` steps)."""

    sobolev_indices: Tuple[float, ...] = ()
    mode_indices: Tuple[int, ...] = ()
    cadence: int = 1

    def __post_init__(self) -> None:
        if self.cadence < 1:
            raise DomainError(f"cadence must be >= 1, got {self.cadence}")
        object.__setattr__(self, "sobolev_indices", tuple(float(s) for s in self.sobolev_indices))
        object.__setattr__(self, "mode_indices", tuple(int(k) for k in self.mode_indices))


@dataclass
class TrajectoryRecord:
    """
    Observables along one trajectory (or a batch of them: then each series
    has shape (n_times, *batch)). Times are monotone in the direction of
    evolution and start at 0.
    """

    times: np.ndarray
    energies: np.ndarray
    sobolev_norms: Dict[float, np.ndarray] = field(default_factory=dict)
    selected_modes: Dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        self.energies = np.asarray(self.energies, dtype=np.float64)
        n = len(self.times)
        if n == 0 or self.times[0] != 0.0:
            raise DomainError("trajectory times must start at 0")
        steps = np.diff(self.times)
        if n > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError("trajectory times must be strictly monotone")
        series = [self.energies, *self.sobolev_norms.values(), *self.selected_modes.values()]
        if any(len(s) != n for s in series):
            raise DomainError("every recorded series must share the length of times")

    def __len__(self) -> int:
        return len(self.times)

    def header(self) -> List[str]:
        cols = ["time", "energy"]
        cols += [f"hs_{s:g}" for s in self.sobolev_norms]
        for k in self.selected_modes:
            cols += [f"re_c{k}", f"im_c{k}"]
        return cols

    def rows(self) -> Iterator[list]:
        if self.energies.ndim != 1:
            raise DomainError("tabular output is defined for a single trajectory")
        for i, t in enumerate(self.times):
            row = [t, self.energies[i]]
            row += [norms[i] for norms in self.sobolev_norms.values()]
            for values in self.selected_modes.values():
                row += [values[i].real, values[i].imag]
            yield row

    def to_csv(self, path: Path) -> Path:
        return write_csv(path, self.header(), self.rows())


def energy_drift(record: TrajectoryRecord):
    """max_t |H(t) - H(0)| / H(0) (absolute drift where H(0) = 0)."""
    h0 = record.energies[0]
    scale = np.where(h0 > 0, h0, 1.0)
    drift = np.max(np.abs(record.energies - h0), axis=0) / scale
    return float(drift) if np.ndim(drift) == 0 else drift


def evolve(
    state: StateLike,
    params: FlowParams,
    horizon: float,
    observers: Optional[Observers] = None,
) -> Tuple[SpectralState, TrajectoryRecord]:
    """
    Phi_N(horizon)(state) by repeated steps of ``params.scheme``, with a final
    shortened step landing exactly on the horizon. Negative horizons run the
    flow backwards. Observables are recorded at t = 0, every
    ``observers.cadence`` steps, and at the horizon.
    """
    observers = observers or Observers()
    coeffs = np.array(as_coeffs(state), copy=True)
    if coeffs.shape[-1] != params.n_modes:
        raise DomainError(f"state has {coeffs.shape[-1]} modes, flow expects {params.n_modes}")
    for k in observers.mode_indices:
        if not 1 <= k <= params.n_modes:
            raise DomainError(f"observed mode {k} outside 1..{params.n_modes}")

    times: List[float] = []
    energies: List[np.ndarray] = []
    norms: Dict[float, List[np.ndarray]] = {s: [] for s in observers.sobolev_indices}
    modes: Dict[int, List[np.ndarray]] = {k: [] for k in observers.mode_indices}

    def record(t: float, c: np.ndarray) -> None:
        times.append(t)
        energies.append(np.asarray(hamiltonian(c, params.alpha, params.quad, params.coupling)))
        for s in norms:
            norms[s].append(np.asarray(sobolev_norm(c, s)))
        for k in modes:
            modes[k].append(c[..., k - 1].copy())

    record(0.0, coeffs)
    stops = cadence_stops(horizon, params.dt, observers.cadence)
    log.debug("evolve: N=%d, horizon=%g, dt=%g, %d record stops", params.n_modes, horizon, params.dt, len(stops))
    for t, coeffs in march(coeffs, params, stops):
        record(t, coeffs)

    trajectory = TrajectoryRecord(
        np.array(times),
        np.array(energies),
        {s: np.array(v) for s, v in norms.items()},
        {k: np.array(v) for k, v in modes.items()},
    )
    return SpectralState(coeffs), trajectory


def evolve_to(state: StateLike, params: FlowParams, times: Sequence[float]) -> List[SpectralState]:
    """States at each of the monotone ``times`` (no observables)."""
    coeffs = np.array(as_coeffs(state), copy=True)
    out: List[SpectralState] = []
    stops = list(times)
    if stops and stops[0] == 0.0:
        out.append(SpectralState(coeffs))
        stops = stops[1:]
    for _, coeffs in march(coeffs, params, stops):
        out.append(SpectralState(coeffs))
    return out


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def local_time_bound(norm: float, c: float = 0.1, gamma: float = 2.0) -> float:
    """Local existence time heuristic T = c (1 + A)^{-gamma} for ||u0||_{H^sigma} <= A."""
    return float(c * (1.0 + norm) ** (-gamma))


def wave_propagate(data: WaveDataPair, t: float) -> WaveDataPair:
    """
    Free real wave equation in coefficient form:
    w(t) = cos(z t) f1 + sin(z t)/z f2,  w_t(t) = -z sin(z t) f1 + cos(z t) f2.
    """
    z = eigenvalues(data.n_modes)
    cos, sin = np.cos(z * t), np.sin(z * t)
    return WaveDataPair(cos * data.f1_coeffs + sin / z * data.f2_coeffs,
                        -z * sin * data.f1_coeffs + cos * data.f2_coeffs)


def sobolev_series(record: TrajectoryRecord, s: SobolevLike) -> np.ndarray:
    return record.sobolev_norms[float(s)]
