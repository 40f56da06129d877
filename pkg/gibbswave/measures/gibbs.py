"""
Gaussian measure mu_N, Gibbs reweighting to rho_N, and the closed-form
exponential moments of mu_N.

    mu_N :  c_n = (h_n + i l_n) / z_n,   h_n, l_n iid N(0, 1)
    rho_N:  d rho_N = exp(-||Re u||^{alpha+2}_{L^{alpha+2}} / (alpha+2)) d mu_N

rho_N expectations are self-normalized importance-sampling estimates over a
mu_N ensemble carrying per-sample log-weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence

import numpy as np

from gibbswave.core.errors import DomainError
from gibbswave.core.logger import log
from gibbswave.core.parallel import map_chunks
from gibbswave.core.records import read_csv, write_csv
from gibbswave.measures.rng import normal_pairs, normal_pairs_batch
from gibbswave.spectral.basis import (
    SobolevLike,
    SpectralState,
    StateLike,
    WaveDataPair,
    as_coeffs,
    eigenvalues,
)
from gibbswave.spectral.quadrature import RadialQuadrature, lebesgue_power


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample_gaussian(n_modes: int, seed: int, index: int) -> SpectralState:
    """One mu_N draw, deterministic in (seed, index)."""
    h, l = normal_pairs(seed, index, n_modes)
    return SpectralState((h + 1j * l) / eigenvalues(n_modes))


def sample_gaussian_batch(n_modes: int, seed: int, indices: Sequence[int]) -> SpectralState:
    """Batched mu_N draws; row k equals sample_gaussian(n_modes, seed, indices[k])."""
    h, l = normal_pairs_batch(seed, indices, n_modes)
    return SpectralState((h + 1j * l) / eigenvalues(n_modes))


def sample_wave_data(n_modes: int, seed: int, index: int) -> WaveDataPair:
    """
    The real random wave data f1 = sum h_n/z_n e_n, f2 = sum l_n e_n. Its
    complexification is exactly sample_gaussian(n_modes, seed, index).
    """
    h, l = normal_pairs(seed, index, n_modes)
    return WaveDataPair(h / eigenvalues(n_modes), l)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")


def potential_energy(state: StateLike, alpha: float, quad: RadialQuadrature):
    """||Re u||^{alpha+2}_{L^{alpha+2}} (no 1/(alpha+2) factor)."""
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    return lebesgue_power(np.ascontiguousarray(coeffs.real), alpha + 2.0, quad)


def gibbs_log_weight(state: StateLike, alpha: float, quad: RadialQuadrature):
    """log of the Gibbs density: -(1/(alpha+2)) ||Re u||^{alpha+2}_{L^{alpha+2}} <= 0."""
    _check_alpha(alpha)
    value = -potential_energy(state, alpha, quad) / (alpha + 2.0)
    return float(value) if np.ndim(value) == 0 else value


def effective_sample_size(log_weights) -> float:
    """(sum w)^2 / sum w^2, with max-log subtraction for stability."""
    lw = np.asarray(log_weights, dtype=np.float64)
    if lw.size == 0:
        return 0.0
    w = np.exp(lw - lw.max())
    return float(np.sum(w) ** 2 / np.sum(w ** 2))


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """
    mu_N samples with Gibbs log-weights. Row i of ``coeffs`` is
    sample_gaussian(n_modes, master_seed, indices[i]).
    """

    coeffs: np.ndarray
    log_weights: np.ndarray
    master_seed: int
    alpha: float
    n_modes: int
    indices: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        lw = np.array(self.log_weights, dtype=np.float64)
        if coeffs.ndim != 2 or coeffs.shape[1] != self.n_modes:
            raise DomainError(f"ensemble coeffs must have shape (n, {self.n_modes}), got {coeffs.shape}")
        if lw.shape != (coeffs.shape[0],):
            raise DomainError("samples and log_weights must have equal length")
        if np.any(lw > 0.0):
            raise DomainError("Gibbs log-weights must be <= 0")
        indices = (
            np.arange(coeffs.shape[0], dtype=np.int64)
            if self.indices is None
            else np.array(self.indices, dtype=np.int64)
        )
        for name, arr in (("coeffs", coeffs), ("log_weights", lw), ("indices", indices)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.coeffs.shape[0])

    @property
    def states(self) -> SpectralState:
        """All samples as one batched state."""
        return SpectralState(self.coeffs)

    @property
    def samples(self) -> List[SpectralState]:
        return [SpectralState(row) for row in self.coeffs]

    def normalized_weights(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return w / np.sum(w)

    def effective_sample_size(self) -> float:
        return effective_sample_size(self.log_weights)

    def with_unit_weights(self) -> "WeightedEnsemble":
        """Same draws viewed as a plain mu_N ensemble."""
        return WeightedEnsemble(
            self.coeffs, np.zeros(len(self)), self.master_seed, self.alpha, self.n_modes, self.indices
        )


def sample_ensemble(
    n_modes: int,
    n_samples: int,
    alpha: float,
    seed: int,
    quad: RadialQuadrature,
    threads: int = 1,
) -> WeightedEnsemble:
    """Draw ``n_samples`` mu_N states and attach their Gibbs log-weights."""
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    _check_alpha(alpha)
    quad.require(n_modes)
    indices = np.arange(n_samples, dtype=np.int64)

    def draw(chunk: np.ndarray) -> np.ndarray:
        return sample_gaussian_batch(n_modes, seed, chunk).coeffs

    coeffs = map_chunks(draw, indices, threads)
    log_weights = map_chunks(lambda c: -potential_energy(c, alpha, quad) / (alpha + 2.0), coeffs, threads)
    ensemble = WeightedEnsemble(coeffs, log_weights, seed, alpha, n_modes, indices)
    log.info(
        "Sampled ensemble: N=%d, samples=%d, alpha=%g, seed=%d, ESS=%.1f",
        n_modes, n_samples, alpha, seed, ensemble.effective_sample_size(),
    )
    return ensemble


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def ensemble_header(n_modes: int) -> List[str]:
    header = ["index", "n_modes", "alpha", "seed", "log_weight"]
    for n in range(1, n_modes + 1):
        header += [f"re_{n}", f"im_{n}"]
    return header


def ensemble_to_csv(ensemble: WeightedEnsemble, path: Path) -> Path:
    def rows():
        for idx, lw, c in zip(ensemble.indices, ensemble.log_weights, ensemble.coeffs):
            parts = np.empty(2 * ensemble.n_modes)
            parts[0::2] = c.real
            parts[1::2] = c.imag
            yield [int(idx), ensemble.n_modes, ensemble.alpha, ensemble.master_seed, float(lw), *parts]

    return write_csv(path, ensemble_header(ensemble.n_modes), rows())


def ensemble_from_csv(path: Path) -> WeightedEnsemble:
    records = read_csv(path)
    if not records:
        raise DomainError(f"{path}: ensemble file has no samples")
    n_modes = int(records[0]["n_modes"])
    alpha = float(records[0]["alpha"])
    seed = int(records[0]["seed"])
    coeffs = np.empty((len(records), n_modes), dtype=np.complex128)
    for i, rec in enumerate(records):
        for n in range(1, n_modes + 1):
            coeffs[i, n - 1] = complex(float(rec[f"re_{n}"]), float(rec[f"im_{n}"]))
    return WeightedEnsemble(
        coeffs,
        [float(rec["log_weight"]) for rec in records],
        seed,
        alpha,
        n_modes,
        [int(rec["index"]) for rec in records],
    )


# ---------------------------------------------------------------------------
# Closed-form Gaussian moments and tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailParameter:
    """
    Exponential-moment constant c and regularity s. The per-factor
    positivity 2c < z_n^{2-2s} (worst case n = 1) is what makes
    E[exp(c ||u||^2_{H^s})] finite; it is checked where that moment is used.
    """

    c: float
    s: SobolevLike

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise DomainError(f"tail constant c must be positive, got {self.c}")
        object.__setattr__(self, "s", float(self.s))

    @property
    def admissible(self) -> bool:
        return 2.0 * self.c < math.pi ** (2.0 - 2.0 * self.s)


def exp_moment_product(n_modes: int, t: TailParameter, sign: str = "+") -> float:
    """
    prod_{n<=N} 1 / (1 -+ 2c / z_n^{2-2s}) = E_{mu_N}[exp(+-c ||u||^2_{H^s})].
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    ratio = 2.0 * t.c / eigenvalues(n_modes) ** (2.0 - 2.0 * t.s)
    factors = 1.0 - ratio if sign == "+" else 1.0 + ratio
    if np.any(factors <= 0.0):
        raise DomainError(
            f"exp moment diverges: 2c={2 * t.c} >= z_1^(2-2s)={math.pi ** (2 - 2 * t.s):.6g}"
        )
    # log-sum keeps large N stable
    return float(np.exp(-np.sum(np.log(factors))))


def tail_probability_bound(lam: float, c: float, c_s: float) -> float:
    """C_s exp(-c Lambda^2), the bound on rho_N(||u||_{H^s} > Lambda)."""
    if not c > 0:
        raise DomainError(f"tail constant c must be positive, got {c}")
    return float(c_s * math.exp(-c * lam * lam))


def small_ball_bound(n_modes: int, lam: float, c: float, s: float) -> float:
    """
    e^{c Lambda^2} prod_{n<=N} (1 + 2c/z_n^{2-2s})^{-1}, the Chebyshev bound on
    mu_N(||u||_{H^s} < Lambda). For s >= 1/2 it tends to 0 as N grows.
    """
    return float(math.exp(c * lam * lam) * exp_moment_product(n_modes, TailParameter(c, s), "-"))
