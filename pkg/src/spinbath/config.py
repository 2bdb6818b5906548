"""Flat key=value run configuration with dotted section prefixes.

Example::

    chain.n_ions = 50
    laser.kind = travelling_wave
    laser.delta = 10
    laser.alpha_target = 2e-3
    bath.temperature = 250

Lists are comma-separated (analysis.alpha_grid = 0.1,0.5,1.0,1.5).
Unknown keys are rejected so typos fail loudly before any computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .chain import D0_CONVENTIONS
from .coupling import LASER_KINDS


class ConfigError(ValueError):
    pass


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


@dataclass
class RunConfig:
    n_ions: int = 50
    addressed_index: int | None = None
    d0_convention: str = "cubic"

    laser_kind: str = "travelling_wave"
    delta: float = 0.0
    epsilon: float = 0.0
    eta: float | None = None
    f_dipole: float | None = None
    alpha_target: float | None = None

    temperature: float = 0.0

    h: float | None = None
    t_max: float | None = None

    fit_window_lo: float | None = None
    fit_window_hi: float | None = None
    alpha_grid: list[float] = field(default_factory=lambda: [0.1, 0.5, 1.0, 1.5])
    t_list: list[float] = field(default_factory=lambda: [0.0])
    revival_window_lo: float = 0.7
    revival_window_hi: float = 1.3
    revival_min_ratio: float = 2.0

    plan_n_list: list[int] = field(default_factory=lambda: [20, 50, 100])
    plan_alpha_grid: list[float] = field(default_factory=lambda: [0.1, 0.5, 1.0, 1.5])
    er_khz: float | None = None


# config key -> (attribute, parser)
_SCHEMA = {
    "chain.n_ions": ("n_ions", int),
    "chain.addressed_index": ("addressed_index", int),
    "chain.d0_convention": ("d0_convention", str),
    "laser.kind": ("laser_kind", str),
    "laser.delta": ("delta", float),
    "laser.epsilon": ("epsilon", float),
    "laser.eta": ("eta", float),
    "laser.f_dipole": ("f_dipole", float),
    "laser.alpha_target": ("alpha_target", float),
    "bath.temperature": ("temperature", float),
    "solver.h": ("h", float),
    "solver.t_max": ("t_max", float),
    "analysis.fit_window_lo": ("fit_window_lo", float),
    "analysis.fit_window_hi": ("fit_window_hi", float),
    "analysis.alpha_grid": ("alpha_grid", _float_list),
    "analysis.t_list": ("t_list", _float_list),
    "analysis.revival_window_lo": ("revival_window_lo", float),
    "analysis.revival_window_hi": ("revival_window_hi", float),
    "analysis.revival_min_ratio": ("revival_min_ratio", float),
    "plan.n_list": ("plan_n_list", _int_list),
    "plan.alpha_grid": ("plan_alpha_grid", _float_list),
    "plan.er_khz": ("er_khz", float),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in _SCHEMA.items()}


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError naming the offending key."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        attr, parser = _SCHEMA[key]
        try:
            setattr(cfg, attr, parser(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    validate(cfg)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())


def validate(cfg: RunConfig) -> None:
    if cfg.n_ions < 1:
        raise ConfigError("chain.n_ions must be >= 1")
    if cfg.addressed_index is not None and not 0 <= cfg.addressed_index < cfg.n_ions:
        raise ConfigError("chain.addressed_index out of range")
    if cfg.d0_convention not in D0_CONVENTIONS:
        raise ConfigError(f"chain.d0_convention must be one of {D0_CONVENTIONS}")
    if cfg.laser_kind not in LASER_KINDS:
        raise ConfigError(f"laser.kind must be one of {LASER_KINDS}")
    if cfg.delta < 0:
        raise ConfigError("laser.delta must be >= 0")
    for name in ("eta", "f_dipole", "alpha_target"):
        val = getattr(cfg, name)
        if val is not None and val <= 0:
            raise ConfigError(f"laser.{name} must be > 0")
    if cfg.temperature < 0:
        raise ConfigError("bath.temperature must be >= 0")
    for name in ("h", "t_max"):
        val = getattr(cfg, name)
        if val is not None and val <= 0:
            raise ConfigError(f"solver.{name} must be > 0")
    if not cfg.alpha_grid:
        raise ConfigError("analysis.alpha_grid must be non-empty")
    if not cfg.t_list:
        raise ConfigError("analysis.t_list must be non-empty")
    if not cfg.plan_n_list:
        raise ConfigError("plan.n_list must be non-empty")
    if not cfg.plan_alpha_grid:
        raise ConfigError("plan.alpha_grid must be non-empty")
    if not 0 < cfg.revival_window_lo < cfg.revival_window_hi:
        raise ConfigError("revival window must satisfy 0 < lo < hi")


def echo_lines(cfg: RunConfig) -> list[str]:
    """Deterministic config echo for file headers, one key=value per line."""
    out = []
    for f in fields(RunConfig):
        key = _ATTR_TO_KEY[f.name]
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(str(x) for x in value)
        out.append(f"config.{key}={value}")
    return sorted(out)
