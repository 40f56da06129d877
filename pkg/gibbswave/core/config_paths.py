"""
Shared helpers for locating user-writable config and output directories.
"""
from __future__ import annotations

import os
from pathlib import Path


APP_NAME = "gibbswave"


def get_config_dir() -> Path:
    """
    Return a user-writable config directory (log file lives here).
    Priority:
      1) GIBBSWAVE_CONFIG_DIR env var (user override)
      2) Windows: LOCALAPPDATA/APPDATA/gibbswave
         Others: ~/.gibbswave
      3) CWD/.gibbswave (fallback if creation fails)
    """
    env_cfg = os.environ.get("GIBBSWAVE_CONFIG_DIR")
    if env_cfg:
        path = Path(env_cfg)
        path.mkdir(parents=True, exist_ok=True)
        return path

    if os.name == "nt":
        base = Path(os.environ.get("LOCALAPPDATA") or os.environ.get("APPDATA") or Path.home()) / APP_NAME
    else:
        base = Path.home() / f".{APP_NAME}"

    try:
        base.mkdir(parents=True, exist_ok=True)
        return base
    except Exception:
        fallback = Path.cwd() / f".{APP_NAME}"
        fallback.mkdir(parents=True, exist_ok=True)
        return fallback


def get_output_root() -> Path:
    """
    Default root under which per-run output directories are created.
    GIBBSWAVE_OUTPUT_DIR wins; otherwise ./gibbswave_runs.
    """
    env_out = os.environ.get("GIBBSWAVE_OUTPUT_DIR")
    if env_out:
        return Path(env_out)
    return Path.cwd() / "gibbswave_runs"
