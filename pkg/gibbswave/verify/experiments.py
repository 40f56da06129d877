"""
Monte Carlo experiments on the truncated system: rho_N invariance, Gaussian
tails and exponential moments, convergence in N, Sobolev-norm growth and the
Strichartz ratio.

Every experiment returns an immutable report with ``header()``/``rows()`` for
the CSV table and ``summary()`` for the JSON file.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from gibbswave.core.errors import DomainError, IntegratorAbort
from gibbswave.core.logger import log
from gibbswave.core.parallel import map_chunks
from gibbswave.dynamics.flow import FlowParams, evolve_to, hamiltonian, march
from gibbswave.measures.gibbs import (
    TailParameter,
    WeightedEnsemble,
    exp_moment_product,
    sample_gaussian_batch,
    tail_probability_bound,
)
from gibbswave.spectral.basis import (
    SobolevIndex,
    SobolevLike,
    SpectralState,
    StateLike,
    as_coeffs,
    eigenvalues,
    embed,
    sobolev_norm,
    truncate,
)
from gibbswave.spectral.quadrature import RadialQuadrature, lebesgue_power
from gibbswave.verify.estimators import (
    bootstrap_ks_threshold,
    weighted_ks,
    weighted_mean_se,
    weighted_quantile,
    weighted_survival,
)

MEAN_SE_FACTOR = 3.0
KS_LEVEL = 0.99


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

_SCALAR_KINDS = ("l2_sq", "potential", "energy")
_MODE_KINDS = ("re", "im", "abs2")


@dataclass(frozen=True)
class Observable:
    """A real functional of the state, evaluated row-wise on a batch."""

    kind: str
    param: Optional[float] = None

    @property
    def name(self) -> str:
        if self.kind in _SCALAR_KINDS:
            return self.kind
        if self.kind == "hs":
            return f"hs:{self.param:g}"
        return f"{self.kind}:{int(self.param)}"

    def evaluate(self, coeffs: np.ndarray, alpha: float, quad: RadialQuadrature) -> np.ndarray:
        if self.kind == "l2_sq":
            return np.sum(np.abs(coeffs) ** 2, axis=-1)
        if self.kind == "potential":
            return lebesgue_power(np.ascontiguousarray(coeffs.real), alpha + 2.0, quad)
        if self.kind == "energy":
            return np.asarray(hamiltonian(coeffs, alpha, quad))
        if self.kind == "hs":
            return np.asarray(sobolev_norm(coeffs, self.param))
        k = int(self.param)
        if k > coeffs.shape[-1]:
            raise DomainError(f"observable {self.name} needs at least {k} modes")
        c = coeffs[..., k - 1]
        if self.kind == "re":
            return c.real.copy()
        if self.kind == "im":
            return c.imag.copy()
        return np.abs(c) ** 2


def parse_observable(text: str) -> Observable:
    """'l2_sq', 'potential', 'energy', 'hs:<s>' (s < 1/2), 're:<k>', 'im:<k>', 'abs2:<k>'."""
    text = text.strip()
    kind, _, arg = text.partition(":")
    if kind in _SCALAR_KINDS and not arg:
        return Observable(kind)
    try:
        if kind == "hs":
            s = float(SobolevIndex(float(arg)).require_measure_range())
            return Observable("hs", s)
        if kind in _MODE_KINDS:
            k = int(arg)
            if k < 1:
                raise DomainError(f"mode index must be >= 1 in {text!r}")
            return Observable(kind, k)
    except ValueError as e:
        raise DomainError(f"bad observable {text!r}: {e}") from e
    raise DomainError(f"unknown observable {text!r}")


def parse_observables(items: Sequence[str]) -> Tuple[Observable, ...]:
    return tuple(parse_observable(item) for item in items)


def _observe_all(observables: Sequence[Observable], alpha: float, quad: RadialQuadrature):
    def observe(coeffs: np.ndarray) -> np.ndarray:
        return np.stack([obs.evaluate(coeffs, alpha, quad) for obs in observables], axis=-1)

    return observe


# ---------------------------------------------------------------------------
# Ensemble evolution
# ---------------------------------------------------------------------------


def evolve_ensemble(
    coeffs: np.ndarray,
    indices: np.ndarray,
    params: FlowParams,
    stops: Sequence[float],
    observe: Callable[[np.ndarray], np.ndarray],
    threads: int = 1,
) -> np.ndarray:
    """
    Run every row of ``coeffs`` through ``stops`` and return
    observe(state) at t = 0 and each stop, shape (n_samples, 1 + len(stops), ...).
    Aborts name the offending rows by their ensemble ``indices``.
    """

    def work(rows: np.ndarray) -> np.ndarray:
        chunk = coeffs[rows]
        frames = [observe(chunk)]
        try:
            for _, chunk in march(chunk, params, stops):
                frames.append(observe(chunk))
        except IntegratorAbort as exc:
            raise IntegratorAbort(
                exc.reason,
                step=exc.step,
                time=exc.time,
                sample_indices=[int(indices[rows[i]]) for i in exc.sample_indices],
            ) from exc
        return np.stack(frames, axis=1)

    return map_chunks(work, np.arange(len(coeffs)), threads)


# ---------------------------------------------------------------------------
# Invariance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservableComparison:
    observable: str
    mean_0: float
    se_0: float
    mean_t: float
    se_t: float
    ks: float
    ks_threshold: float

    @property
    def combined_se(self) -> float:
        return math.sqrt(self.se_0 ** 2 + self.se_t ** 2)

    @property
    def mean_pass(self) -> bool:
        return abs(self.mean_t - self.mean_0) <= MEAN_SE_FACTOR * self.combined_se

    @property
    def ks_pass(self) -> bool:
        return self.ks <= self.ks_threshold

    @property
    def passed(self) -> bool:
        return self.mean_pass and self.ks_pass


def compare_samples(
    name: str, x0, xt, log_weights, resamples: int = 200, level: float = KS_LEVEL, seed: int = 0
) -> ObservableComparison:
    """Weighted mean test plus weighted KS against its bootstrap threshold."""
    m0, se0 = weighted_mean_se(x0, log_weights)
    mt, set_ = weighted_mean_se(xt, log_weights)
    ks = weighted_ks(x0, log_weights, xt, log_weights)
    threshold = bootstrap_ks_threshold(x0, log_weights, xt, log_weights, resamples, level, seed)
    return ObservableComparison(name, m0, se0, mt, set_, ks, threshold)


@dataclass(frozen=True)
class InvarianceReport:
    """
    Weighted t = 0 vs t = T comparisons. ``linear_control`` (free flow, unit
    weights) must pass as well; ``unweighted`` (nonlinear flow, mu_N) is
    informational only.
    """

    horizon: float
    n_samples: int
    n_modes: int
    alpha: float
    master_seed: int
    effective_sample_size: float
    comparisons: Tuple[ObservableComparison, ...]
    linear_control: Tuple[ObservableComparison, ...] = ()
    unweighted: Tuple[ObservableComparison, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons) and all(c.passed for c in self.linear_control)

    def groups(self) -> Dict[str, Tuple[ObservableComparison, ...]]:
        return {"gibbs": self.comparisons, "linear_control": self.linear_control, "unweighted_mu": self.unweighted}

    @staticmethod
    def header() -> List[str]:
        return ["group", "observable", "mean_0", "se_0", "mean_T", "se_T", "ks", "ks_threshold",
                "mean_pass", "ks_pass", "pass"]

    def rows(self):
        for group, comparisons in self.groups().items():
            for c in comparisons:
                yield [group, c.observable, c.mean_0, c.se_0, c.mean_t, c.se_t, c.ks, c.ks_threshold,
                       c.mean_pass, c.ks_pass, c.passed]

    def failures(self) -> List[str]:
        out = []
        for group in ("gibbs", "linear_control"):
            out += [f"invariance/{group}/{c.observable}" for c in self.groups()[group] if not c.passed]
        return out

    def summary(self) -> dict:
        return {
            "horizon": self.horizon,
            "n_samples": self.n_samples,
            "n_modes": self.n_modes,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
            "effective_sample_size": self.effective_sample_size,
            "passed": self.passed,
            "checks": {f"{g}/{c.observable}": c.passed for g, cs in self.groups().items() for c in cs},
        }


def invariance_test(
    ensemble: WeightedEnsemble,
    horizon: float,
    params: FlowParams,
    observables: Sequence[Observable],
    *,
    threads: int = 1,
    resamples: int = 200,
    level: float = KS_LEVEL,
    controls: bool = True,
) -> InvarianceReport:
    """
    Push every sample through Phi_N(T), keep its Gibbs weight, and compare the
    weighted laws of each observable at t = 0 and t = T.
    """
    if params.n_modes != ensemble.n_modes:
        raise DomainError(f"ensemble has N={ensemble.n_modes}, flow has N={params.n_modes}")
    observables = tuple(observables)
    if not observables:
        raise DomainError("invariance test needs at least one observable")
    stops = [horizon] if horizon != 0 else []
    observe = _observe_all(observables, params.alpha, params.quad)
    log.info(
        "Invariance: N=%d, samples=%d, T=%g, dt=%g, observables=%s",
        params.n_modes, len(ensemble), horizon, params.dt, ",".join(o.name for o in observables),
    )

    def run(flow: FlowParams, log_weights: np.ndarray) -> Tuple[ObservableComparison, ...]:
        values = evolve_ensemble(ensemble.coeffs, ensemble.indices, flow, stops, observe, threads)
        return tuple(
            compare_samples(obs.name, values[:, 0, j], values[:, -1, j], log_weights,
                            resamples, level, ensemble.master_seed)
            for j, obs in enumerate(observables)
        )

    unit = np.zeros(len(ensemble))
    comparisons = run(params, ensemble.log_weights)
    linear_control: Tuple[ObservableComparison, ...] = ()
    unweighted: Tuple[ObservableComparison, ...] = ()
    if controls:
        linear_control = run(params.linear(), unit)
        unweighted = run(params, unit)

    report = InvarianceReport(
        horizon, len(ensemble), ensemble.n_modes, ensemble.alpha, ensemble.master_seed,
        ensemble.effective_sample_size(), comparisons, linear_control, unweighted,
    )
    for group, cs in report.groups().items():
        for c in cs:
            log.info(
                "  %-14s %-10s |dmean|=%.3e (3se=%.3e) ks=%.4f (thr=%.4f) %s",
                group, c.observable, abs(c.mean_t - c.mean_0), MEAN_SE_FACTOR * c.combined_se,
                c.ks, c.ks_threshold, "pass" if c.passed else "FAIL",
            )
    return report


# ---------------------------------------------------------------------------
# Gaussian tails and exponential moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailTable:
    s: float
    c: float
    c_s: float
    lambdas: np.ndarray
    survival: np.ndarray
    bounds: np.ndarray
    slope: float

    @property
    def dominated(self) -> bool:
        return bool(np.all(self.survival <= self.bounds))

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.survival) <= 0.0))

    @staticmethod
    def header() -> List[str]:
        return ["lambda", "survival", "bound"]

    def rows(self):
        for row in zip(self.lambdas, self.survival, self.bounds):
            yield list(row)

    def summary(self) -> dict:
        return {"s": self.s, "c": self.c, "c_s": self.c_s, "slope": self.slope,
                "dominated": self.dominated, "monotone": self.monotone}


def tail_check(
    ensemble: WeightedEnsemble,
    s: SobolevLike,
    lambda_grid: Sequence[float],
    c: float = 0.5,
    c_s: Optional[float] = None,
) -> TailTable:
    """
    Weighted survival rho_N(||u||_{H^s} > Lambda) against C_s exp(-c Lambda^2),
    and the least-squares slope of log-survival against Lambda^2.

    Without an explicit ``c_s`` it is calibrated from the Chebyshev argument:
    C_s = E_mu[exp(c ||u||^2_{H^s})] / Z_N with Z_N the mean Gibbs weight.
    """
    s = float(SobolevIndex(float(s)).require_measure_range())
    lambdas = np.asarray(lambda_grid, dtype=np.float64)
    if c_s is None:
        z_n = float(np.mean(np.exp(ensemble.log_weights)))
        c_s = exp_moment_product(ensemble.n_modes, TailParameter(c, s)) / z_n
    norms = np.asarray(sobolev_norm(ensemble.coeffs, s))
    survival = weighted_survival(norms, ensemble.log_weights, lambdas)
    bounds = np.array([tail_probability_bound(l, c, c_s) for l in lambdas])

    usable = survival > 0.0
    slope = float("nan")
    if np.count_nonzero(usable) >= 2:
        slope = float(np.polyfit(lambdas[usable] ** 2, np.log(survival[usable]), 1)[0])
    log.info("Tail check s=%g: C_s=%.4g, fitted slope %.4g", s, c_s, slope)
    return TailTable(s, c, float(c_s), lambdas, survival, bounds, slope)


@dataclass(frozen=True)
class MomentRow:
    n_modes: int
    s: float
    c: float
    empirical: float
    se: float
    exact: float

    @property
    def passed(self) -> bool:
        return abs(self.empirical - self.exact) <= MEAN_SE_FACTOR * self.se


@dataclass(frozen=True)
class MomentTable:
    entries: Tuple[MomentRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.entries)

    @staticmethod
    def header() -> List[str]:
        return ["n_modes", "s", "c", "empirical", "se", "exact", "pass"]

    def rows(self):
        for r in self.entries:
            yield [r.n_modes, r.s, r.c, r.empirical, r.se, r.exact, r.passed]

    def failures(self) -> List[str]:
        return [f"moments/N={r.n_modes}/s={r.s:g}/c={r.c:g}" for r in self.entries if not r.passed]


def moment_check(
    modes: Sequence[int],
    s_values: Sequence[float],
    c_values: Sequence[float],
    n_samples: int,
    seed: int,
    threads: int = 1,
) -> MomentTable:
    """
    Monte Carlo E_mu[exp(c ||u||^2_{H^s})] against the product formula for
    every admissible (N, s, c); inadmissible combinations are skipped.
    """
    rows: List[MomentRow] = []
    indices = np.arange(n_samples, dtype=np.int64)
    unit = np.zeros(n_samples)
    for n_modes in modes:
        coeffs = map_chunks(lambda idx: sample_gaussian_batch(n_modes, seed, idx).coeffs, indices, threads)
        for s in s_values:
            norms_sq = np.asarray(sobolev_norm(coeffs, s)) ** 2
            for c in c_values:
                tail = TailParameter(c, s)
                if not tail.admissible:
                    log.debug("moment check: skipping inadmissible (N=%d, s=%g, c=%g)", n_modes, s, c)
                    continue
                mean, se = weighted_mean_se(np.exp(c * norms_sq), unit)
                rows.append(MomentRow(int(n_modes), float(s), float(c), mean, se,
                                      exp_moment_product(n_modes, tail)))
    return MomentTable(tuple(rows))


# ---------------------------------------------------------------------------
# Convergence in N
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceTable:
    n_ref: int
    sigma: float
    horizon: float
    n_list: Tuple[int, ...]
    discrepancies: Tuple[float, ...]
    slack: float = 1.5

    @property
    def monotone(self) -> bool:
        d = self.discrepancies
        return all(d[i + 1] <= self.slack * d[i] for i in range(len(d) - 1))

    @staticmethod
    def header() -> List[str]:
        return ["n_modes", "discrepancy"]

    def rows(self):
        for n, d in zip(self.n_list, self.discrepancies):
            yield [n, d]

    def summary(self) -> dict:
        return {"n_ref": self.n_ref, "sigma": self.sigma, "horizon": self.horizon,
                "slack": self.slack, "monotone": self.monotone}


def convergence_experiment(
    u0_big: StateLike,
    n_list: Sequence[int],
    horizon: float,
    params: FlowParams,
    sigma: float = 0.25,
    n_times: int = 21,
    slack: float = 1.5,
) -> ConvergenceTable:
    """
    sup_t ||Phi_N(t) S_N u0 - Phi_Nref(t) u0||_{H^sigma} for each N, with every
    truncation evolved on one shared grid (capacity >= N_ref) and time mesh.
    """
    u0 = SpectralState(as_coeffs(u0_big))
    n_ref = u0.n_modes
    n_list = tuple(int(n) for n in n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError(f"truncations must be strictly increasing, got {n_list}")
    if not n_list or n_list[-1] >= n_ref or n_list[0] < 1:
        raise DomainError(f"truncations must lie in 1..{n_ref - 1}, got {n_list}")
    params.quad.require(n_ref)
    times = np.linspace(0.0, horizon, n_times) if horizon != 0 else np.zeros(1)

    reference = evolve_to(u0, params.with_modes(n_ref), times)
    discrepancies = []
    for n in n_list:
        path = evolve_to(truncate(u0, n), params.with_modes(n), times)
        worst = max(
            sobolev_norm(embed(state, n_ref).coeffs - ref.coeffs, sigma)
            for state, ref in zip(path, reference)
        )
        discrepancies.append(float(worst))
        log.info("Convergence: N=%d vs N_ref=%d, sup discrepancy %.4e", n, n_ref, worst)
    return ConvergenceTable(n_ref, float(sigma), float(horizon), n_list, tuple(discrepancies), slack)


# ---------------------------------------------------------------------------
# Long-time growth
# ---------------------------------------------------------------------------


def log_envelope(times, i0: float) -> np.ndarray:
    return np.sqrt(i0 + np.log1p(np.abs(np.asarray(times, dtype=np.float64))))


def fit_log_offset(times, values, default: float = 1.0) -> float:
    """
    i0 from the least-squares fit values^2 ~ C^2 (i0 + log(1+t)); falls back to
    ``default`` when the fit is degenerate.
    """
    t = np.asarray(times, dtype=np.float64)
    if t.size < 2:
        return default
    slope, intercept = np.polyfit(np.log1p(t), np.asarray(values) ** 2, 1)
    if slope <= 0 or intercept <= 0:
        return default
    return float(intercept / slope)


def default_checkpoints(horizon: float, count: int = 10) -> List[float]:
    """0 followed by log-spaced times ending at the horizon."""
    if horizon <= 0:
        return [0.0]
    return [0.0] + [float(horizon) / 2 ** k for k in range(count - 1, -1, -1)]


@dataclass(frozen=True)
class GrowthReport:
    times: np.ndarray
    quantile_levels: Tuple[float, ...]
    quantiles: np.ndarray
    normalized: np.ndarray
    i0: float
    envelope_d: float
    exceed_fraction: float
    max_drift: float
    ratio_limit: float = 3.0

    def __post_init__(self) -> None:
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("growth checkpoints must be increasing")
        if np.any(self.quantiles < 0):
            raise DomainError("norm quantiles must be nonnegative")

    @property
    def median_ratio(self) -> float:
        med = self.normalized[:, self.quantile_levels.index(0.5)]
        return float(np.max(med) / np.min(med))

    @property
    def passed(self) -> bool:
        return self.median_ratio <= self.ratio_limit

    def header(self) -> List[str]:
        return (["time"] + [f"quantile_{q:g}" for q in self.quantile_levels]
                + [f"normalized_{q:g}" for q in self.quantile_levels])

    def rows(self):
        for i, t in enumerate(self.times):
            yield [t, *self.quantiles[i], *self.normalized[i]]

    def summary(self) -> dict:
        return {"i0": self.i0, "median_ratio": self.median_ratio, "ratio_limit": self.ratio_limit,
                "envelope_d": self.envelope_d, "exceed_fraction": self.exceed_fraction,
                "max_energy_drift": self.max_drift, "passed": self.passed}


def growth_experiment(
    ensemble: WeightedEnsemble,
    horizon: float,
    checkpoints: Sequence[float],
    params: FlowParams,
    sigma: float = 0.25,
    *,
    quantile_levels: Sequence[float] = (0.1, 0.5, 0.9),
    i0: Optional[float] = 1.0,
    envelope_d: Optional[float] = None,
    drift_guard: float = 1e-2,
    ratio_limit: float = 3.0,
    threads: int = 1,
) -> GrowthReport:
    """
    Weighted quantiles of ||u(t)||_{H^sigma} along the flow, normalized by
    (i0 + log(1+t))^{1/2}. ``i0=None`` fits i0 from the medians. Any sample
    whose relative energy drift exceeds ``drift_guard`` aborts the run.
    ``envelope_d`` defaults to twice the top normalized quantile at the first
    checkpoint.
    """
    times = np.asarray(sorted(set(float(t) for t in checkpoints) | {float(horizon)}), dtype=np.float64)
    if times[0] < 0 or times[-1] > horizon:
        raise DomainError(f"checkpoints must lie in [0, {horizon}]")
    levels = tuple(sorted(set(float(q) for q in quantile_levels) | {0.5}))
    stops = [t for t in times if t > 0]

    def observe(coeffs: np.ndarray) -> np.ndarray:
        return np.stack([np.asarray(sobolev_norm(coeffs, sigma)),
                         np.asarray(hamiltonian(coeffs, params.alpha, params.quad, params.coupling))], axis=-1)

    log.info("Growth: N=%d, samples=%d, T=%g, dt=%g, %d checkpoints",
             params.n_modes, len(ensemble), horizon, params.dt, len(times))
    paths = evolve_ensemble(ensemble.coeffs, ensemble.indices, params, stops, observe, threads)
    h0 = paths[:, :1, 1]
    if times[0] > 0:
        paths = paths[:, 1:]
    norms, energies = paths[..., 0], paths[..., 1]

    drift = np.abs(energies - h0) / np.where(h0 > 0, h0, 1.0)
    tripped = drift > drift_guard
    if tripped.any():
        first = int(np.flatnonzero(tripped.any(axis=0))[0])
        bad = ensemble.indices[tripped[:, first]]
        log.error("Energy drift guard %.1e tripped at t=%g", drift_guard, times[first])
        raise IntegratorAbort("energy drift guard", time=float(times[first]), sample_indices=bad.tolist())

    quantiles = np.array([weighted_quantile(norms[:, k], ensemble.log_weights, levels)
                          for k in range(len(times))])
    if i0 is None:
        i0 = fit_log_offset(times, quantiles[:, levels.index(0.5)])
    envelope = log_envelope(times, i0)
    normalized = quantiles / envelope[:, None]
    if envelope_d is None:
        envelope_d = 2.0 * float(normalized[0, -1])
    exceed = np.any(norms > envelope_d * envelope[None, :], axis=1)
    w = np.exp(ensemble.log_weights - ensemble.log_weights.max())
    exceed_fraction = float(np.sum(w[exceed]) / np.sum(w))

    report = GrowthReport(times, levels, quantiles, normalized, float(i0), float(envelope_d),
                          exceed_fraction, float(drift.max()), ratio_limit)
    log.info("Growth: median ratio %.3f (limit %g), exceed fraction %.4f, max drift %.2e",
             report.median_ratio, ratio_limit, exceed_fraction, report.max_drift)
    return report


# ---------------------------------------------------------------------------
# Strichartz ratio
# ---------------------------------------------------------------------------


def admissible_q(p: float) -> float:
    """q with 1/p + 1/q = 1/2."""
    if not p > 2.0:
        raise DomainError(f"Strichartz exponent needs p > 2, got p={p}")
    return 2.0 * p / (p - 2.0)


def strichartz_ratio(f: StateLike, p: float, horizon: float, quad: RadialQuadrature, time_mesh: int = 401):
    """
    ||exp(-i t sqrt(-Laplacian)) f||_{L^p((-T,T); L^q)} / ||f||_{H^{2/p}}, the
    time integral by composite Simpson on ``time_mesh`` points.
    """
    q = admissible_q(p)
    if not 0.0 < horizon <= 1.0:
        raise DomainError(f"Strichartz horizon must lie in (0, 1], got {horizon}")
    if time_mesh < 3:
        raise DomainError(f"time mesh needs >= 3 points, got {time_mesh}")
    coeffs = as_coeffs(f)
    quad.require(coeffs.shape[-1])
    times = np.linspace(-horizon, horizon, time_mesh)
    phases = np.exp(-1j * np.multiply.outer(times, eigenvalues(coeffs.shape[-1])))

    def one(row: np.ndarray) -> float:
        lq_pow = lebesgue_power(row * phases, q, quad)
        integral = simpson(lq_pow ** (p / q), x=times)
        return float(integral ** (1.0 / p) / sobolev_norm(row, 2.0 / p))

    if coeffs.ndim == 1:
        return one(coeffs)
    flat = coeffs.reshape(-1, coeffs.shape[-1])
    return np.array([one(row) for row in flat]).reshape(coeffs.shape[:-1])


@dataclass(frozen=True)
class StrichartzResult:
    n_modes: int
    p: float
    q: float
    ratios: np.ndarray
    running_sup: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "running_sup", np.maximum.accumulate(self.ratios))

    @property
    def supremum(self) -> float:
        return float(self.running_sup[-1])

    @staticmethod
    def header() -> List[str]:
        return ["index", "ratio", "running_sup"]

    def rows(self):
        for i, (r, s) in enumerate(zip(self.ratios, self.running_sup)):
            yield [i, r, s]


def strichartz_probe(
    n_modes: int,
    p: float,
    n_samples: int,
    horizon: float,
    seed: int,
    quad: RadialQuadrature,
    time_mesh: int = 401,
    threads: int = 1,
) -> StrichartzResult:
    """Strichartz ratios of ``n_samples`` mu_N draws and their running supremum."""
    q = admissible_q(p)
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    quad.require(n_modes)
    indices = np.arange(n_samples, dtype=np.int64)
    ratios = map_chunks(
        lambda idx: np.atleast_1d(
            strichartz_ratio(sample_gaussian_batch(n_modes, seed, idx), p, horizon, quad, time_mesh)
        ),
        indices,
        threads,
        chunk_size=16,
    )
    result = StrichartzResult(n_modes, p, q, ratios)
    log.info("Strichartz: N=%d, p=%g, q=%g, sup ratio %.5f over %d samples",
             n_modes, p, q, result.supremum, n_samples)
    return result
