import json
from datetime import datetime

import pytest
import pytz
import yaml

from gibbswave import runner
from gibbswave.core.errors import IntegratorAbort
from gibbswave.core.logger import get_log_level, set_log_level
from gibbswave.core.records import read_csv
from gibbswave.core.sim_config import Experiment
from gibbswave.main import build_parser, main
from gibbswave.version import __version__


def _write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _run(capsys, argv):
    status = main(argv)
    out = capsys.readouterr().out.strip().splitlines()
    return status, out[-1]


def test_evolve_zero_horizon(tmp_path, capsys):
    cfg = _write_config(tmp_path, "n_modes = 4\nhorizon = 0\nsobolev_indices = 0.25\n")
    status, run_dir = _run(capsys, ["evolve", "--config", cfg, "--out", str(tmp_path / "runs")])
    assert status == 0
    rows = read_csv(f"{run_dir}/trajectory.csv")
    assert len(rows) == 1
    assert rows[0]["time"] == "0"
    assert list(rows[0]) == ["time", "energy", "hs_0.25", "re_c1", "im_c1", "re_c2", "im_c2"]


def test_outputs_of_a_run(tmp_path, capsys, isolated_dirs):
    cfg = _write_config(tmp_path, "n_modes = 4\nhorizon = 0.01\ndt = 0.001\nmaster_seed = 5\n")
    status, run_dir = _run(capsys, ["evolve", "--config", cfg])
    assert status == 0
    assert run_dir.startswith(str(isolated_dirs / "evolve_"))

    with open(f"{run_dir}/summary.json", encoding="utf-8") as f:
        summary = json.load(f)
    assert summary["experiment"] == "evolve"
    assert summary["master_seed"] == 5
    assert summary["passed"] is True
    assert summary["results"]["rows"] == 11
    assert summary["config"]["n_modes"] == 4
    assert "threads" not in summary["config"]
    assert "output_dir" not in summary["config"]

    with open(f"{run_dir}/failures.json", encoding="utf-8") as f:
        assert json.load(f) == {"failures": []}

    with open(f"{run_dir}/manifest.yaml", encoding="utf-8") as f:
        manifest = yaml.safe_load(f)
    assert manifest["versions"]["gibbswave"] == __version__
    assert manifest["master_seed"] == 5
    assert "wall_clock_seconds" in manifest and "host" in manifest


def test_repeat_runs_are_byte_identical(tmp_path, capsys):
    cfg = _write_config(tmp_path, "n_modes = 4\nn_samples = 50\nmaster_seed = 3\nsobolev_indices = 0\n")
    _, first = _run(capsys, ["sample", "--config", cfg, "--out", str(tmp_path / "runs")])
    _, second = _run(capsys, ["sample", "--config", cfg, "--out", str(tmp_path / "runs")])
    assert first != second
    for name in ("ensemble.csv", "tails_s0.csv", "moments.csv", "summary.json"):
        with open(f"{first}/{name}", "rb") as f1, open(f"{second}/{name}", "rb") as f2:
            assert f1.read() == f2.read(), name


def test_thread_count_does_not_change_results(tmp_path, capsys):
    cfg = _write_config(
        tmp_path,
        "n_modes = 4\nn_samples = 1100\nhorizon = 0.05\ndt = 0.001\nbootstrap_resamples = 20\n"
        "observables = l2_sq, re:1\n",
    )
    _, one = _run(capsys, ["invariance", "--config", cfg, "--threads", "1", "--out", str(tmp_path / "t1")])
    _, two = _run(capsys, ["invariance", "--config", cfg, "--threads", "2", "--out", str(tmp_path / "t2")])
    for name in ("invariance.csv", "summary.json", "failures.json"):
        with open(f"{one}/{name}", "rb") as f1, open(f"{two}/{name}", "rb") as f2:
            assert f1.read() == f2.read(), name


def test_config_error_exits_with_two(tmp_path, capsys):
    cfg = _write_config(tmp_path, "alpha = 2.5\n")
    assert main(["validate", "--config", cfg]) == runner.EXIT_CONFIG
    assert capsys.readouterr().out == ""
    assert main(["--config", str(tmp_path / "missing.cfg")]) == runner.EXIT_CONFIG


def test_integrator_abort_exits_with_three(tmp_path, capsys, monkeypatch):
    def explode(ctx):
        raise IntegratorAbort("non-finite coefficients", step=7, time=0.007, sample_indices=[4])

    monkeypatch.setitem(runner._HANDLERS, Experiment.EVOLVE, explode)
    status, run_dir = _run(capsys, ["evolve"])
    assert status == runner.EXIT_ABORT
    with open(f"{run_dir}/failures.json", encoding="utf-8") as f:
        failures = json.load(f)["failures"]
    assert failures[0]["check"] == "evolve/integrator"
    assert failures[0]["sample_indices"] == [4]
    assert failures[0]["step"] == 7


def test_failed_checks_exit_with_one(capsys, monkeypatch):
    monkeypatch.setitem(runner._HANDLERS, Experiment.VALIDATE, lambda ctx: ({"checks": {}}, ["validate/x"]))
    status, run_dir = _run(capsys, [])
    assert status == runner.EXIT_FAILED
    with open(f"{run_dir}/failures.json", encoding="utf-8") as f:
        assert json.load(f) == {"failures": [{"check": "validate/x"}]}


def test_run_directory_naming(tmp_path):
    now = pytz.utc.localize(datetime(2026, 3, 1, 12, 30, 5))
    first = runner.make_run_dir(tmp_path, "growth", now)
    second = runner.make_run_dir(tmp_path, "growth", now)
    assert first.name == "growth_20260301T123005Z"
    assert second.name == "growth_20260301T123005Z_1"
    eastern = pytz.timezone("US/Eastern").localize(datetime(2026, 3, 1, 7, 30, 5))
    assert runner.make_run_dir(tmp_path, "sample", eastern).name == "sample_20260301T123005Z"


def test_parser_rejects_unknown_experiment(capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["fly"])
    assert info.value.code == 2
    args = build_parser().parse_args(["growth", "--seed", "4", "--threads", "0", "--log-level", "debug"])
    assert (args.experiment, args.seed, args.threads, args.log_level) == ("growth", 4, 0, "DEBUG")


def test_log_level_switch():
    set_log_level("debug")
    try:
        assert get_log_level() == "DEBUG"
    finally:
        set_log_level("INFO")
    assert get_log_level() == "INFO"
