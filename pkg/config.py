import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

import yaml

from tools.errors import ConfigError


T = TypeVar("T")


@dataclass
class GridConfig:
    nx: int = 21
    ny: int = 21
    margin: float = 0.0


@dataclass
class ToleranceConfig:
    first_order: float = 1e-6
    second_order: float = 1e-5
    chained: float = 1e-4
    codazzi_advisory: float = 1e-6
    codazzi_hard: float = 1e-4
    mask_radius: float = 1e-6
    classify: float = 1e-6


@dataclass
class NumericsConfig:
    quad_tol: float = 1e-10
    ode_tol: float = 1e-10
    jet_fd_step: float = 1e-5
    oracle_step: float = 1e-4
    theta_samples: int = 101
    profile_step: float = 1e-3


@dataclass
class RuntimeConfig:
    threads: int = 1
    log_file: str | None = None


@dataclass
class Config:
    grid: GridConfig = field(default_factory=GridConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)


def _threads_from_env(configured: int) -> int:
    """CPD_SURF_THREADS caps the configured thread count."""
    raw = os.environ.get("CPD_SURF_THREADS")
    if raw is None or raw == "":
        return configured
    try:
        threads = int(raw)
    except ValueError as e:
        raise ConfigError(f"CPD_SURF_THREADS must be a positive integer, got {raw!r}") from e
    if threads < 1:
        raise ConfigError(f"CPD_SURF_THREADS must be a positive integer, got {raw!r}")
    return min(configured, threads)


def _section(data: dict, name: str) -> dict:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"config section '{name}' must be a mapping, got {type(section).__name__}")
    return section


def _build(cls: type[T], defaults: T, values: dict, name: str) -> T:
    unknown = sorted(set(values) - set(vars(defaults)))
    if unknown:
        raise ConfigError(f"unknown key(s) in config section '{name}': {', '.join(map(str, unknown))}")
    return cls(**{**vars(defaults), **values})


def load_config(path: str | None = "config.yaml") -> Config:
    """
    Load configuration; a missing file or missing keys fall back to defaults.

    Raises:
        ConfigError: malformed YAML, unknown keys or an invalid CPD_SURF_THREADS
    """
    data: dict = {}
    if path and Path(path).exists():
        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a mapping of config sections")

    defaults = Config()
    runtime = _build(RuntimeConfig, defaults.runtime, _section(data, "runtime"), "runtime")
    runtime.threads = _threads_from_env(runtime.threads)

    return Config(
        grid=_build(GridConfig, defaults.grid, _section(data, "grid"), "grid"),
        tolerances=_build(ToleranceConfig, defaults.tolerances, _section(data, "tolerances"), "tolerances"),
        numerics=_build(NumericsConfig, defaults.numerics, _section(data, "numerics"), "numerics"),
        runtime=runtime,
    )
