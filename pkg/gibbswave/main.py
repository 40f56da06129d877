import argparse
import sys
from typing import List, Optional

from gibbswave.core.errors import ConfigError
from gibbswave.core.logger import log, set_log_level
from gibbswave.core.sim_config import Experiment, SimConfig, apply_overrides, load_config
from gibbswave.runner import EXIT_CONFIG, run
from gibbswave.version import __version__


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gibbswave",
        description="Truncated radial wave equation: simulation and Gibbs-measure verification.",
    )
    parser.add_argument(
        "experiment",
        nargs="?",
        choices=[e.value for e in Experiment],
        help="Experiment to run (default: the config file's 'experiment' key).",
    )
    parser.add_argument("--config", metavar="PATH", help="key = value config file.")
    parser.add_argument("--seed", type=int, metavar="U64", help="Master seed (overrides the file).")
    parser.add_argument("--out", metavar="DIR", help="Output root (default: $GIBBSWAVE_OUTPUT_DIR or ./gibbswave_runs).")
    parser.add_argument("--threads", type=int, metavar="INT", help="Worker threads, 0 = physical cores.")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "DISABLED"],
        type=str.upper,
        help="Console and log-file level.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_log_level(args.log_level)

    try:
        config = load_config(args.config) if args.config else SimConfig()
        config = apply_overrides(config, experiment=args.experiment, seed=args.seed,
                                 out=args.out, threads=args.threads)
    except ConfigError as e:
        log.error("Configuration error: %s", e)
        return EXIT_CONFIG

    result = run(config)
    # stdout carries only the run directory
    print(result.run_dir)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
