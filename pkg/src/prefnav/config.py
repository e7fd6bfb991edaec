"""Declarative configuration file support.

One JSON file can set defaults for any CLI subcommand and for the gateway;
explicit command-line flags always win.  The file is looked up from the
``--config`` flag first, then the ``PREF_NAV_CONFIG`` environment variable.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

ENV_CONFIG_PATH = "PREF_NAV_CONFIG"

SECTIONS = ("train", "run", "serve", "bench", "eval", "backend")


class ConfigError(ValueError):
    pass


def load_config(explicit_path: str | Path | None = None) -> dict:
    """Load the effective config mapping: the explicit path wins over the
    environment variable; neither set means an empty config."""
    path = explicit_path or os.environ.get(ENV_CONFIG_PATH) or None
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object at top level")
    for section, value in data.items():
        if section == "log_level":
            continue
        if section not in SECTIONS:
            raise ConfigError(f"config file {path}: unknown section {section!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"config file {path}: section {section!r} must be an object")
    return data


def section(config: dict, name: str) -> dict:
    return config.get(name, {})


def pick(cli_value, config_section: dict, key: str, default):
    """Resolution order: explicit CLI flag, config file entry, default."""
    if cli_value is not None:
        return cli_value
    if key in config_section:
        return config_section[key]
    return default
