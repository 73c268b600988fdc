"""Loads config.json over the built-in defaults."""

import copy
import json
import logging
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

CONFIG_PATH = Path(__file__).parent.parent / "config.json"

DEFAULTS = {
    "cache": {
        "directory": "~/.cache/kr-toolkit",
        "enabled": True,
    },
    "check": {
        "seed": 20240611,
        "fuzz_trials": 200,
        "snf_trials": 1000,
        "retraction_samples": 500,
        "workers": 4,
    },
    "output": {
        "format": "json",
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: Optional[Path] = None) -> dict:
    path = Path(path) if path is not None else CONFIG_PATH
    if not path.exists():
        logger.debug("no config at %s, using defaults", path)
        return copy.deepcopy(DEFAULTS)
    with open(path, encoding="utf-8") as f:
        return _merge(DEFAULTS, json.load(f))
