"""
Experiment orchestration.

``run(config)`` creates ``<output_root>/<experiment>_<UTC timestamp>/``, runs
the experiment, and writes its CSV tables, ``summary.json``,
``failures.json`` and ``manifest.yaml``. Tables and summaries depend only on
the config and seed; wall-clock facts go to the manifest alone.
"""
from __future__ import annotations

import platform
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import psutil
import pytz
import scipy

from gibbswave.core.errors import ConfigError, GibbswaveError, IntegratorAbort
from gibbswave.core.logger import log
from gibbswave.core.parallel import resolve_threads
from gibbswave.core.records import write_csv, write_json, write_manifest
from gibbswave.core.sim_config import Experiment, SimConfig, as_dict
from gibbswave.dynamics.flow import FlowParams, Observers, energy_drift, evolve
from gibbswave.measures.gibbs import ensemble_to_csv, sample_ensemble, sample_gaussian
from gibbswave.spectral.quadrature import RadialQuadrature
from gibbswave.verify.experiments import (
    convergence_experiment,
    default_checkpoints,
    growth_experiment,
    invariance_test,
    moment_check,
    parse_observables,
    strichartz_probe,
    strichartz_ratio,
    tail_check,
)
from gibbswave.verify.validate import CheckResult, validation_suite
from gibbswave.version import __version__

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

# config keys that vary by machine or invocation, not by result
_HOST_KEYS = ("threads", "output_dir")

STRICHARTZ_GROWTH_LIMIT = 1.2
HOMOGENEITY_TOL = 1e-10
# trajectory CSVs keep at most about this many rows
MAX_TRAJECTORY_ROWS = 1000


@dataclass
class RunResult:
    experiment: str
    run_dir: Path
    status: int = EXIT_OK
    summary: dict = field(default_factory=dict)
    failures: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == EXIT_OK


@dataclass
class _Context:
    config: SimConfig
    run_dir: Path
    threads: int

    @property
    def quad(self) -> RadialQuadrature:
        return RadialQuadrature(self.config.grid_points, self.config.quadrature)

    def params(self, n_modes: int = 0, quad: Optional[RadialQuadrature] = None) -> FlowParams:
        cfg = self.config
        return FlowParams(cfg.alpha, n_modes or cfg.n_modes, cfg.dt, quad or self.quad,
                          picard_iterations=cfg.picard_iterations)


# experiment handlers return (summary, failed check names)
Outcome = Tuple[dict, List[str]]


def _run_sample(ctx: _Context) -> Outcome:
    cfg = ctx.config
    ensemble = sample_ensemble(cfg.n_modes, cfg.n_samples, cfg.alpha, cfg.master_seed, ctx.quad, ctx.threads)
    ensemble_to_csv(ensemble, ctx.run_dir / "ensemble.csv")
    failures: List[str] = []
    tails = {}
    for s in cfg.sobolev_indices:
        table = tail_check(ensemble, s, cfg.lambda_grid, cfg.tail_c)
        write_csv(ctx.run_dir / f"tails_s{s:g}.csv", table.header(), table.rows())
        tails[f"{s:g}"] = table.summary()
        if not (table.dominated and table.monotone):
            failures.append(f"tails/s={s:g}")
    moments = moment_check((cfg.n_modes,), cfg.sobolev_indices, sorted({0.1, cfg.tail_c}),
                           cfg.n_samples, cfg.master_seed, ctx.threads)
    write_csv(ctx.run_dir / "moments.csv", moments.header(), moments.rows())
    failures += moments.failures()
    summary = {"effective_sample_size": ensemble.effective_sample_size(), "tails": tails,
               "moments_passed": moments.passed}
    return summary, failures


def _run_evolve(ctx: _Context) -> Outcome:
    cfg = ctx.config
    params = ctx.params()
    steps = int(abs(cfg.horizon) / cfg.dt)
    observers = Observers(
        sobolev_indices=cfg.sobolev_indices,
        mode_indices=tuple(k for k in (1, 2) if k <= cfg.n_modes),
        cadence=max(1, steps // MAX_TRAJECTORY_ROWS),
    )
    u0 = sample_gaussian(cfg.n_modes, cfg.master_seed, 0)
    _, record = evolve(u0, params, cfg.horizon, observers)
    record.to_csv(ctx.run_dir / "trajectory.csv")
    return {"energy_drift": energy_drift(record), "rows": len(record)}, []


def _run_invariance(ctx: _Context) -> Outcome:
    cfg = ctx.config
    ensemble = sample_ensemble(cfg.n_modes, cfg.n_samples, cfg.alpha, cfg.master_seed, ctx.quad, ctx.threads)
    report = invariance_test(ensemble, cfg.horizon, ctx.params(), parse_observables(cfg.observables),
                             threads=ctx.threads, resamples=cfg.bootstrap_resamples)
    write_csv(ctx.run_dir / "invariance.csv", report.header(), report.rows())
    return report.summary(), report.failures()


def _run_growth(ctx: _Context) -> Outcome:
    cfg = ctx.config
    ensemble = sample_ensemble(cfg.n_modes, cfg.n_samples, cfg.alpha, cfg.master_seed, ctx.quad, ctx.threads)
    checkpoints = cfg.checkpoints or default_checkpoints(cfg.horizon)
    report = growth_experiment(
        ensemble, cfg.horizon, checkpoints, ctx.params(), cfg.sigma,
        envelope_d=cfg.envelope_d or None, drift_guard=cfg.drift_guard, threads=ctx.threads,
    )
    write_csv(ctx.run_dir / "growth.csv", report.header(), report.rows())
    return report.summary(), ([] if report.passed else ["growth/median_ratio"])


def _run_converge(ctx: _Context) -> Outcome:
    cfg = ctx.config
    n_ref = cfg.reference_modes
    quad = RadialQuadrature(max(cfg.grid_points, 8 * n_ref), cfg.quadrature)
    u0 = sample_gaussian(n_ref, cfg.master_seed, 0)
    table = convergence_experiment(u0, cfg.truncations, cfg.horizon, ctx.params(n_ref, quad), cfg.sigma)
    write_csv(ctx.run_dir / "converge.csv", table.header(), table.rows())
    return table.summary(), ([] if table.monotone else ["converge/monotone"])


def _run_strichartz(ctx: _Context) -> Outcome:
    cfg = ctx.config
    results = []
    for n_modes in (cfg.n_modes, 2 * cfg.n_modes):
        quad = RadialQuadrature.for_modes(n_modes, cfg.quadrature)
        result = strichartz_probe(n_modes, cfg.strichartz_p, cfg.n_samples, cfg.horizon,
                                  cfg.master_seed, quad, cfg.time_mesh, ctx.threads)
        write_csv(ctx.run_dir / f"strichartz_N{n_modes}.csv", result.header(), result.rows())
        results.append(result)

    small, large = results
    growth = large.supremum / small.supremum
    quad = RadialQuadrature.for_modes(cfg.n_modes, cfg.quadrature)
    f = sample_gaussian(cfg.n_modes, cfg.master_seed, 0)
    base = strichartz_ratio(f, cfg.strichartz_p, cfg.horizon, quad, cfg.time_mesh)
    scaled = strichartz_ratio(3.7 * f.coeffs, cfg.strichartz_p, cfg.horizon, quad, cfg.time_mesh)
    homogeneity = abs(scaled - base) / base

    failures = []
    if growth > STRICHARTZ_GROWTH_LIMIT:
        failures.append("strichartz/sup_growth")
    if homogeneity > HOMOGENEITY_TOL:
        failures.append("strichartz/homogeneity")
    summary = {"p": small.p, "q": small.q, "sup": {str(r.n_modes): r.supremum for r in results},
               "sup_growth": growth, "homogeneity_error": homogeneity}
    return summary, failures


def _run_validate(ctx: _Context) -> Outcome:
    cfg = ctx.config
    checks = validation_suite(cfg.alpha, cfg.master_seed, cfg.sigma)
    write_csv(ctx.run_dir / "validate.csv", CheckResult.header(), (c.row() for c in checks))
    summary = {"checks": {c.name: c.passed for c in checks}}
    return summary, [f"validate/{c.name}" for c in checks if not c.passed]


_HANDLERS: Dict[Experiment, Callable[[_Context], Outcome]] = {
    Experiment.SAMPLE: _run_sample,
    Experiment.EVOLVE: _run_evolve,
    Experiment.INVARIANCE: _run_invariance,
    Experiment.GROWTH: _run_growth,
    Experiment.CONVERGE: _run_converge,
    Experiment.STRICHARTZ: _run_strichartz,
    Experiment.VALIDATE: _run_validate,
}


def make_run_dir(root: Path, experiment: str, now: Optional[datetime] = None) -> Path:
    """``<root>/<experiment>_<YYYYmmddTHHMMSSZ>``, suffixed _1, _2, ... on collision."""
    now = now or datetime.now(pytz.utc)
    stamp = now.astimezone(pytz.utc).strftime("%Y%m%dT%H%M%SZ")
    base = Path(root) / f"{experiment}_{stamp}"
    path, k = base, 0
    while path.exists():
        k += 1
        path = base.with_name(f"{base.name}_{k}")
    path.mkdir(parents=True)
    return path


def _host_info() -> dict:
    info = {"platform": platform.platform(), "python": platform.python_version()}
    try:
        info["cpu_physical"] = psutil.cpu_count(logical=False)
        info["cpu_logical"] = psutil.cpu_count(logical=True)
        info["memory_bytes"] = psutil.virtual_memory().total
    except Exception as e:
        log.debug("psutil host info unavailable: %s", e)
    return info


def _portable_config(config: SimConfig) -> dict:
    """Config echo for summary.json; host-specific keys live in the manifest only."""
    echo = as_dict(config)
    for key in _HOST_KEYS:
        echo.pop(key, None)
    return echo


def run(config: SimConfig) -> RunResult:
    experiment = config.experiment.value
    run_dir = make_run_dir(config.output_root, experiment)
    threads = resolve_threads(config.threads)
    started = datetime.now(pytz.utc)
    clock = time.perf_counter()
    log.info("Run %s: seed=%d, threads=%d, output %s", experiment, config.master_seed, threads, run_dir)

    result = RunResult(experiment, run_dir)
    try:
        summary, failed = _HANDLERS[config.experiment](_Context(config, run_dir, threads))
        result.summary = summary
        result.failures = [{"check": name} for name in failed]
        result.status = EXIT_FAILED if failed else EXIT_OK
    except IntegratorAbort as e:
        log.error("Integrator abort: %s", e)
        result.failures = [{"check": f"{experiment}/integrator", "error": str(e),
                            "step": e.step, "time": e.time, "sample_indices": list(e.sample_indices)}]
        result.status = EXIT_ABORT
    except ConfigError as e:
        log.error("Configuration error: %s", e)
        result.failures = [{"check": f"config/{e.key}", "error": str(e)}]
        result.status = EXIT_CONFIG
    except GibbswaveError as e:
        log.error("%s failed: %s", experiment, e)
        result.failures = [{"check": f"{experiment}/{type(e).__name__}", "error": str(e)}]
        result.status = EXIT_FAILED

    elapsed = time.perf_counter() - clock
    write_json(run_dir / "summary.json", {
        "experiment": experiment,
        "master_seed": config.master_seed,
        "passed": result.passed,
        "status": result.status,
        "results": result.summary,
        "config": _portable_config(config),
    })
    write_json(run_dir / "failures.json", {"failures": result.failures})
    write_manifest(run_dir / "manifest.yaml", {
        "config": as_dict(config),
        "master_seed": config.master_seed,
        "started_at": started.isoformat(),
        "wall_clock_seconds": round(elapsed, 3),
        "threads": threads,
        "versions": {"gibbswave": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "host": _host_info(),
    })
    level = log.info if result.passed else log.warning
    level("Run %s finished in %.1fs with status %d", experiment, elapsed, result.status)
    return result
