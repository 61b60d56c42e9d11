"""Run configuration: defaults, key=value files and command-line overrides."""

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import dotenv_values

from halfwave.errors import ConfigError, UsageError

logger = logging.getLogger(__name__)

COMMANDS = ("spectrum", "soliton", "residual", "coerce", "gauge", "evolve", "lattice")
FORMATS = ("json", "csv")
SPECTRAL_COMMANDS = ("spectrum", "coerce", "gauge", "residual")
VELOCITY_COMMANDS = ("soliton", "residual", "evolve")

# Per-command defaults sit between DEFAULTS and the config file.
COMMAND_DEFAULTS = {
    "evolve": {"n": 256},
    "lattice": {"n": 64, "steps": 100},
}

DEFAULTS = {
    "m": 1,
    "v": 0.0,
    "s": 1,
    "n": 4096,
    "K": None,
    "dt": 1e-3,
    "steps": 1000,
    "tol": 1e-8,
    "out": None,
    "format": "json",
    "seed": 1234,
}

_TYPES = {
    "m": int,
    "v": float,
    "s": int,
    "n": int,
    "K": int,
    "dt": float,
    "steps": int,
    "tol": float,
    "out": str,
    "format": str,
    "seed": int,
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    m: int
    v: float
    s: int
    n: int
    K: int
    dt: float
    steps: int
    tol: float
    out: Optional[str]
    format: str
    seed: int


def load_config(file_path: str) -> dict:
    """Read a key=value configuration file.

    Args:
        file_path: path of the file.

    Returns:
        The typed values found in the file.

    Raises:
        FileNotFoundError: when the file does not exist.
        ConfigError: for unknown keys or values of the wrong type.
    """
    if not os.path.isfile(file_path):
        raise FileNotFoundError(
            f"We couldn't find your configuration file '{file_path}'. Make sure the path is correct."
        )
    raw = dotenv_values(file_path)
    config = {}
    for key, value in raw.items():
        if key not in _TYPES:
            raise ConfigError(f"Unknown configuration key '{key}' in '{file_path}'.")
        if value is None or value == "":
            continue
        try:
            config[key] = _TYPES[key](value)
        except ValueError:
            raise ConfigError(
                f"The value '{value}' for '{key}' in '{file_path}' is not a valid {_TYPES[key].__name__}."
            )
    print("Configuration file loaded successfully")
    return config


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def build_run_config(command: str, cli_values: dict, file_values: Optional[dict] = None) -> RunConfig:
    """Merge defaults, file values and command-line values (highest precedence) and validate.

    Raises:
        UsageError: naming the offending flag.
    """
    if command not in COMMANDS:
        raise UsageError(f"Unknown command '{command}'. Choose one of {', '.join(COMMANDS)}.")
    merged = dict(DEFAULTS)
    merged.update(COMMAND_DEFAULTS.get(command, {}))
    merged.update(file_values or {})
    merged.update({key: value for key, value in cli_values.items() if value is not None})

    if not _is_power_of_two(merged["n"]) or merged["n"] < 8:
        raise UsageError(f"--n must be a power of two and at least 8, got {merged['n']}.")
    if merged["K"] is None:
        merged["K"] = 2 * merged["m"] + 8 if command == "coerce" else merged["n"] // 2 - 1
    if merged["K"] < 1:
        raise UsageError(f"--K must be positive, got {merged['K']}.")
    # coerce works in coefficient space and never samples a grid of n nodes.
    if command != "coerce" and merged["K"] > merged["n"] // 2 - 1:
        raise UsageError(f"--K must lie in 1..{merged['n'] // 2 - 1}, got {merged['K']}.")
    if command in SPECTRAL_COMMANDS and merged["m"] < 1:
        raise UsageError(f"--m must be at least 1 for '{command}', got {merged['m']}.")
    if merged["m"] < 0:
        raise UsageError(f"--m must be nonnegative, got {merged['m']}.")
    if command in VELOCITY_COMMANDS and not abs(merged["v"]) < 1:
        raise UsageError(f"--v must satisfy |v| < 1, got {merged['v']}.")
    if merged["s"] not in (1, -1):
        raise UsageError(f"--s must be 1 or -1, got {merged['s']}.")
    if merged["format"] not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}, got '{merged['format']}'.")
    if merged["dt"] == 0:
        raise UsageError("--dt must be nonzero.")
    if merged["steps"] < 1:
        raise UsageError(f"--steps must be positive, got {merged['steps']}.")
    if merged["tol"] <= 0:
        raise UsageError(f"--tol must be positive, got {merged['tol']}.")
    logger.debug("Run configuration for %s: %s", command, merged)
    return RunConfig(command=command, **merged)
