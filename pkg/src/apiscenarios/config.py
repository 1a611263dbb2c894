"""Tunables for a mining run, loadable from a TOML file."""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class Config:
    damping: float = 0.85
    tol: float = 1e-6
    max_iter: int = 100
    top_n: int = 3
    edge_threshold: float = 0.05
    negation_window: int = 3
    implicit_lookback: int = 2
    max_error_line_ratio: float = 0.5
    mode: str = "full"
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.damping < 1:
            raise ConfigError(f"damping must lie in (0, 1), got {self.damping}")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        for name in ("max_iter", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        for name in ("top_n", "negation_window", "implicit_lookback"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must not be negative")
        if not 0 <= self.max_error_line_ratio <= 1:
            raise ConfigError("max_error_line_ratio must lie in [0, 1]")
        if self.mode not in ("full", "partial"):
            raise ConfigError(f"mode must be 'full' or 'partial', got {self.mode!r}")

    def summary_params(self) -> dict:
        return {"damping": self.damping, "tol": self.tol, "max_iter": self.max_iter,
                "edge_threshold": self.edge_threshold, "top_n": self.top_n}

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides) -> "Config":
        """Copy with every non-None override applied."""
        given = {k: v for k, v in overrides.items() if v is not None}
        return self.from_mapping({**self.to_dict(), **given})

    @classmethod
    def from_mapping(cls, data: dict) -> "Config":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values = {}
        for key, value in data.items():
            want = type(getattr(cls, key))
            if want is float and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if not isinstance(value, want) or isinstance(value, bool):
                raise ConfigError(f"{key} must be {want.__name__}, got {value!r}")
            values[key] = value
        return replace(cls(), **values)


def load_config(path: str | Path | None) -> Config:
    """Read a TOML config; keys may sit at top level or in ``[mining]``."""
    if path is None:
        return Config()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if "mining" in data and isinstance(data["mining"], dict):
        data = {**{k: v for k, v in data.items() if k != "mining"}, **data["mining"]}
    return Config.from_mapping(data)
