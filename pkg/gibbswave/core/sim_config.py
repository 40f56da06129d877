"""
Experiment configuration.

A config file is flat ``key = value`` text; ``#`` starts a comment, list
values are comma separated. Every key is optional and unknown keys are
rejected. ``dump_config`` writes the canonical form, which reloads to an
equal SimConfig.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from gibbswave.core.config_paths import get_output_root
from gibbswave.core.errors import ConfigError, DomainError
from gibbswave.core.logger import log

UINT64_MAX = 2 ** 64 - 1


class Experiment(str, enum.Enum):
    SAMPLE = "sample"
    EVOLVE = "evolve"
    INVARIANCE = "invariance"
    GROWTH = "growth"
    CONVERGE = "converge"
    STRICHARTZ = "strichartz"
    VALIDATE = "validate"


def _default_lambda_grid() -> Tuple[float, ...]:
    return tuple(1.0 + 0.25 * k for k in range(13))


@dataclass(frozen=True)
class SimConfig:
    alpha: float = 1.0
    n_modes: int = 16
    grid_points: int = 0  # 0 -> 8 * n_modes
    quadrature: str = "uniform-sine"
    dt: float = 1e-3
    horizon: float = 1.0
    sigma: float = 0.25
    sobolev_indices: Tuple[float, ...] = (0.0, 0.25)
    n_samples: int = 1000
    master_seed: int = 0
    experiment: Experiment = Experiment.VALIDATE
    output_dir: str = ""
    checkpoints: Tuple[float, ...] = ()
    truncations: Tuple[int, ...] = (8, 16, 32)
    reference_modes: int = 64
    observables: Tuple[str, ...] = ("l2_sq", "potential", "hs:0.25", "re:1", "abs2:2")
    lambda_grid: Tuple[float, ...] = field(default_factory=_default_lambda_grid)
    tail_c: float = 0.5
    strichartz_p: float = 4.0
    time_mesh: int = 401
    picard_iterations: int = 8
    bootstrap_resamples: int = 200
    drift_guard: float = 1e-2
    envelope_d: float = 0.0  # 0 -> derived from the t = 0 quantiles
    threads: int = 0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "experiment", Experiment(self.experiment))
        except ValueError:
            choices = ", ".join(e.value for e in Experiment)
            raise ConfigError("experiment", f"must be one of {choices}, got {self.experiment!r}") from None
        if self.grid_points == 0:
            object.__setattr__(self, "grid_points", 8 * self.n_modes)
        _validate(self)

    @property
    def output_root(self) -> Path:
        return Path(self.output_dir) if self.output_dir else get_output_root()

    def replace(self, **changes: Any) -> "SimConfig":
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _require(ok: bool, key: str, constraint: str) -> None:
    if not ok:
        raise ConfigError(key, constraint)


def _increasing(values) -> bool:
    pairs = zip(values, values[1:])
    return all(b > a for a, b in pairs)


def _validate(cfg: SimConfig) -> None:
    from gibbswave.verify.experiments import parse_observable

    _require(0.0 < cfg.alpha < 2.0, "alpha", f"must lie in (0, 2), got {cfg.alpha}")
    lower = max(0.0, (cfg.alpha - 1.0) / cfg.alpha)
    _require(lower < cfg.sigma < 0.5, "sigma",
             f"must lie in ({lower:.6g}, 0.5) for alpha={cfg.alpha}, got {cfg.sigma}")
    _require(cfg.n_modes >= 1, "n_modes", f"must be >= 1, got {cfg.n_modes}")
    _require(cfg.grid_points >= 8 * cfg.n_modes, "grid_points",
             f"must be >= 8 * n_modes = {8 * cfg.n_modes}, got {cfg.grid_points}")
    _require(cfg.quadrature in ("uniform-sine", "gauss-legendre"), "quadrature",
             f"must be uniform-sine or gauss-legendre, got {cfg.quadrature!r}")
    _require(cfg.dt > 0.0, "dt", f"must be positive, got {cfg.dt}")
    _require(not (cfg.horizon > 0.0 and cfg.dt > cfg.horizon), "dt",
             f"must not exceed horizon={cfg.horizon}, got {cfg.dt}")
    for s in cfg.sobolev_indices:
        _require(s < 0.5, "sobolev_indices", f"every index must be < 1/2, got {s}")
    _require(cfg.n_samples >= 1, "n_samples", f"must be >= 1, got {cfg.n_samples}")
    _require(0 <= cfg.master_seed <= UINT64_MAX, "master_seed", "must be an unsigned 64-bit integer")
    _require(all(t >= 0.0 for t in cfg.checkpoints) and _increasing(cfg.checkpoints), "checkpoints",
             "must be nonnegative and strictly increasing")
    _require(not cfg.checkpoints or cfg.horizon <= 0.0 or cfg.checkpoints[-1] <= cfg.horizon,
             "checkpoints", f"must not exceed horizon={cfg.horizon}")
    _require(bool(cfg.truncations) and cfg.truncations[0] >= 1 and _increasing(cfg.truncations),
             "truncations", "must be positive and strictly increasing")
    _require(cfg.reference_modes > cfg.truncations[-1], "reference_modes",
             f"must exceed every truncation, got {cfg.reference_modes}")
    for text in cfg.observables:
        try:
            parse_observable(text)
        except DomainError as e:
            raise ConfigError("observables", str(e)) from e
    _require(all(l >= 0.0 for l in cfg.lambda_grid) and _increasing(cfg.lambda_grid), "lambda_grid",
             "must be nonnegative and strictly increasing")
    _require(cfg.tail_c > 0.0, "tail_c", f"must be positive, got {cfg.tail_c}")
    _require(cfg.strichartz_p > 2.0, "strichartz_p", f"must be > 2, got {cfg.strichartz_p}")
    _require(cfg.time_mesh >= 3, "time_mesh", f"must be >= 3, got {cfg.time_mesh}")
    _require(cfg.picard_iterations >= 1, "picard_iterations", "must be >= 1")
    _require(cfg.bootstrap_resamples >= 1, "bootstrap_resamples", "must be >= 1")
    _require(cfg.drift_guard > 0.0, "drift_guard", f"must be positive, got {cfg.drift_guard}")
    _require(cfg.envelope_d >= 0.0, "envelope_d", f"must be >= 0, got {cfg.envelope_d}")
    _require(cfg.threads >= 0, "threads", f"must be >= 0, got {cfg.threads}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _list_of(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(text: str) -> tuple:
        text = text.strip()
        if not text:
            return ()
        return tuple(item(part.strip()) for part in text.split(","))

    return parse


def _int(text: str) -> int:
    return int(text.strip())


def _float(text: str) -> float:
    return float(text.strip())


def _str(text: str) -> str:
    return text.strip()


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "alpha": _float,
    "n_modes": _int,
    "grid_points": _int,
    "quadrature": _str,
    "dt": _float,
    "horizon": _float,
    "sigma": _float,
    "sobolev_indices": _list_of(_float),
    "n_samples": _int,
    "master_seed": _int,
    "experiment": _str,
    "output_dir": _str,
    "checkpoints": _list_of(_float),
    "truncations": _list_of(_int),
    "reference_modes": _int,
    "observables": _list_of(_str),
    "lambda_grid": _list_of(_float),
    "tail_c": _float,
    "strichartz_p": _float,
    "time_mesh": _int,
    "picard_iterations": _int,
    "bootstrap_resamples": _int,
    "drift_guard": _float,
    "envelope_d": _float,
    "threads": _int,
}


def config_from_mapping(values: Mapping[str, Any]) -> SimConfig:
    """Build a SimConfig from raw (string) or already-typed values."""
    kwargs: Dict[str, Any] = {}
    for key, raw in values.items():
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(key, "unknown key")
        if isinstance(raw, str):
            try:
                kwargs[key] = parser(raw)
            except ValueError:
                raise ConfigError(key, f"malformed value {raw!r}") from None
        elif isinstance(raw, (list, tuple)):
            kwargs[key] = tuple(raw)
        else:
            kwargs[key] = raw
    return SimConfig(**kwargs)


def parse_config_text(text: str, source: str = "<config>") -> SimConfig:
    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(key or f"line {lineno}", f"{source}:{lineno}: expected 'key = value'")
        if key in values:
            raise ConfigError(key, f"{source}:{lineno}: duplicate key")
        values[key] = value.strip()
    return config_from_mapping(values)


def load_config(path: Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from e
    cfg = parse_config_text(text, str(path))
    log.debug("Loaded config %s: %s", path, cfg)
    return cfg


def _format(value: Any) -> str:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: SimConfig) -> str:
    """Canonical key = value text; parse_config_text(dump_config(c)) == c."""
    return "".join(f"{f.name} = {_format(getattr(cfg, f.name))}\n" for f in fields(cfg))


def as_dict(cfg: SimConfig) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        out[f.name] = value.value if isinstance(value, enum.Enum) else value
    return out


def apply_overrides(
    cfg: SimConfig,
    *,
    experiment: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    threads: Optional[int] = None,
) -> SimConfig:
    """Command-line flags take precedence over the file."""
    changes: Dict[str, Any] = {}
    if experiment is not None:
        changes["experiment"] = experiment
    if seed is not None:
        changes["master_seed"] = seed
    if out is not None:
        changes["output_dir"] = out
    if threads is not None:
        changes["threads"] = threads
    return cfg.replace(**changes) if changes else cfg
