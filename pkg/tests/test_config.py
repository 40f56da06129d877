from pathlib import Path

import pytest

from gibbswave.core.errors import ConfigError
from gibbswave.core.sim_config import (
    Experiment,
    SimConfig,
    apply_overrides,
    as_dict,
    config_from_mapping,
    dump_config,
    load_config,
    parse_config_text,
)


def test_defaults():
    cfg = SimConfig()
    assert cfg.alpha == 1.0
    assert cfg.n_modes == 16
    assert cfg.grid_points == 128
    assert cfg.experiment is Experiment.VALIDATE
    assert cfg.lambda_grid[0] == 1.0 and cfg.lambda_grid[-1] == 4.0
    assert len(cfg.lambda_grid) == 13


def test_output_root_follows_environment(isolated_dirs):
    assert SimConfig().output_root == isolated_dirs
    assert SimConfig(output_dir="elsewhere").output_root == Path("elsewhere")


def _key_of(exc_info):
    return exc_info.value.key


@pytest.mark.parametrize(
    "changes, key",
    [
        ({"alpha": 2.5}, "alpha"),
        ({"alpha": 0.0}, "alpha"),
        ({"alpha": 1.5, "sigma": 0.3}, "sigma"),
        ({"sigma": 0.5}, "sigma"),
        ({"n_modes": 16, "grid_points": 64}, "grid_points"),
        ({"dt": 0.0}, "dt"),
        ({"dt": 2.0, "horizon": 1.0}, "dt"),
        ({"sobolev_indices": (0.0, 0.5)}, "sobolev_indices"),
        ({"quadrature": "trapezoid"}, "quadrature"),
        ({"truncations": (16, 8)}, "truncations"),
        ({"reference_modes": 32}, "reference_modes"),
        ({"observables": ("hs:0.75",)}, "observables"),
        ({"checkpoints": (0.5, 2.0)}, "checkpoints"),
        ({"experiment": "fly"}, "experiment"),
        ({"master_seed": -1}, "master_seed"),
        ({"strichartz_p": 2.0}, "strichartz_p"),
        ({"threads": -2}, "threads"),
    ],
)
def test_rejected_values_name_their_key(changes, key):
    with pytest.raises(ConfigError) as info:
        SimConfig(**changes)
    assert _key_of(info) == key


def test_sigma_window_depends_on_alpha():
    # alpha = 1.5 needs sigma > 1/3
    assert SimConfig(alpha=1.5, sigma=0.4).sigma == 0.4


def test_parse_config_text():
    cfg = parse_config_text(
        """
        # small invariance run
        experiment = invariance
        n_modes = 8          # trailing comment
        sobolev_indices = 0, 0.25
        observables = l2_sq, re:1
        master_seed = 18446744073709551615
        """
    )
    assert cfg.experiment is Experiment.INVARIANCE
    assert cfg.n_modes == 8 and cfg.grid_points == 64
    assert cfg.sobolev_indices == (0.0, 0.25)
    assert cfg.observables == ("l2_sq", "re:1")
    assert cfg.master_seed == 2 ** 64 - 1


@pytest.mark.parametrize(
    "text, key",
    [
        ("colour = blue\n", "colour"),
        ("n_modes = eight\n", "n_modes"),
        ("n_modes = 8\nn_modes = 9\n", "n_modes"),
        ("alpha 1.0\n", "alpha 1.0"),
    ],
)
def test_parse_errors(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert _key_of(info) == key


def test_dump_reloads_to_equal_config():
    cfg = SimConfig(alpha=0.7, n_modes=8, dt=1 / 3000, checkpoints=(0.0, 0.1), experiment="growth")
    assert parse_config_text(dump_config(cfg)) == cfg


def test_config_from_mapping_accepts_typed_values():
    cfg = config_from_mapping({"n_modes": 4, "truncations": [1, 2], "reference_modes": 8})
    assert cfg.truncations == (1, 2)


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("experiment = evolve\nhorizon = 0\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.experiment is Experiment.EVOLVE and cfg.horizon == 0.0
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "missing.cfg")
    assert info.value.key == "config"


def test_overrides_take_precedence():
    cfg = SimConfig(master_seed=1, threads=4)
    out = apply_overrides(cfg, experiment="sample", seed=9, out="runs", threads=1)
    assert (out.experiment, out.master_seed, out.output_dir, out.threads) == (Experiment.SAMPLE, 9, "runs", 1)
    assert apply_overrides(cfg) is cfg


def test_as_dict_is_plain():
    d = as_dict(SimConfig())
    assert d["experiment"] == "validate"
    assert d["observables"][0] == "l2_sq"
