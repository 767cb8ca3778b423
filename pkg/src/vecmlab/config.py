"""Declarative run configuration (YAML, schema version 1).

Unknown keys anywhere in the file are rejected so typos fail fast.

Example::

    schema_version: 1
    input: data/panel.csv
    date_column: date
    output_dir: out
    variables:
      - {name: CPI, transform: log, adf: ct, role: p}
      - {name: Interest Rate, transform: level, adf: c, role: i}
    lags: {p_max: 4, deterministic: ct, criterion: bic, value: 2}
    rank: 2
    deterministic: rtrend
    normalization: [CPI, M2]
    orderings: [order1, order2, [Interest Rate, CPI]]
    horizon: 6
    bootstrap: {enabled: true, reps: 1000, level: 0.95, seed: 20231122}
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError
from .structural import ORDER_PRESETS

SCHEMA_VERSION = 1
ROLES = ("p", "m_s", "y", "i", "er", "p_f", "p_r")


def _check_keys(section: str, data: dict, cls) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected a mapping, got {type(data).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{section}: unknown keys {unknown}; allowed {sorted(allowed)}")


@dataclass(frozen=True)
class VariableConfig:
    name: str
    transform: str = "level"
    adf: str = "c"
    role: str | None = None
    alias: str | None = None
    note: str = ""

    def __post_init__(self):
        if self.transform not in ("level", "log"):
            raise ConfigError(f"variable {self.name!r}: transform must be 'level' or 'log'")
        if self.adf not in ("c", "ct"):
            raise ConfigError(f"variable {self.name!r}: adf must be 'c' or 'ct'")
        if self.role is not None and self.role not in ROLES:
            raise ConfigError(f"variable {self.name!r}: role must be one of {ROLES}")


@dataclass(frozen=True)
class LagConfig:
    p_max: int = 4
    deterministic: str = "ct"
    criterion: str = "bic"
    value: int | None = None

    def __post_init__(self):
        if self.p_max < 1:
            raise ConfigError("lags.p_max must be at least 1")
        if self.deterministic not in ("c", "ct"):
            raise ConfigError("lags.deterministic must be 'c' or 'ct'")
        if self.criterion not in ("aic", "bic", "hqic"):
            raise ConfigError("lags.criterion must be aic, bic or hqic")
        if self.value is not None and self.value < 1:
            raise ConfigError("lags.value must be at least 1")


@dataclass(frozen=True)
class BootstrapConfig:
    enabled: bool = True
    reps: int = 1000
    level: float = 0.95
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.enabled and self.reps < 100:
            raise ConfigError("bootstrap.reps must be at least 100")
        if not 0 < self.level < 1:
            raise ConfigError("bootstrap.level must lie in (0, 1)")


@dataclass(frozen=True)
class RunConfig:
    input: str
    variables: tuple[VariableConfig, ...]
    schema_version: int = SCHEMA_VERSION
    date_column: str = "date"
    output_dir: str = "vecm_out"
    alpha: float = 0.05
    lags: LagConfig = field(default_factory=LagConfig)
    rank: int | None = None
    deterministic: str = "rtrend"
    normalization: tuple[str, ...] | None = None
    orderings: tuple[Any, ...] = ("order1", "order2", "order3", "order4")
    horizon: int = 6
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    lm_lags: tuple[int, ...] = (1, 2)
    strict: bool = False

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}; expected {SCHEMA_VERSION}")
        names = [v.name for v in self.variables]
        if not names:
            raise ConfigError("at least one variable is required")
        if len(set(names)) != len(names):
            raise ConfigError("variable names must be unique")
        roles = [v.role for v in self.variables if v.role]
        if len(set(roles)) != len(roles):
            raise ConfigError("each role may be assigned to one variable only")
        if self.deterministic not in ("rtrend", "constant"):
            raise ConfigError("deterministic must be 'rtrend' or 'constant'")
        if self.rank is not None and not 0 <= self.rank <= len(names):
            raise ConfigError(f"rank must lie in [0, {len(names)}]")
        if self.normalization is not None:
            bad = [n for n in self.normalization if n not in names]
            if bad:
                raise ConfigError(f"normalization names unknown variables: {bad}")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        for lag in self.lm_lags:
            if lag < 1:
                raise ConfigError("lm_lags must be positive")
        # resolve now so a bad ordering fails before any computation
        self.resolved_orderings()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def aliases(self) -> dict[str, str]:
        """Canonical variable names (used by presets) mapped to configured column names."""
        return {v.alias: v.name for v in self.variables if v.alias}

    def resolved_orderings(self):
        from .structural import Ordering

        out = []
        names = set(self.names)
        for i, o in enumerate(self.orderings):
            if isinstance(o, str):
                if o not in ORDER_PRESETS:
                    raise ConfigError(f"unknown ordering preset {o!r}; have {sorted(ORDER_PRESETS)}")
                ordering = Ordering.preset(o, self.aliases())
            elif isinstance(o, (list, tuple)):
                try:
                    ordering = Ordering(tuple(o), f"custom{i + 1}")
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            else:
                raise ConfigError(f"ordering {o!r} must be a preset name or a list of variables")
            unknown = [n for n in ordering.names if n not in names]
            if unknown:
                raise ConfigError(f"ordering {ordering.label!r} names unknown variables {unknown}")
            if sorted(ordering.names) != sorted(names):
                raise ConfigError(f"ordering {ordering.label!r} must list every variable exactly once")
            out.append(ordering)
        return out

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "RunConfig":
        _check_keys("config", data, cls)
        data = dict(data)
        if "input" not in data or "variables" not in data:
            raise ConfigError("config requires 'input' and 'variables'")
        variables = []
        for i, v in enumerate(data["variables"]):
            if isinstance(v, str):
                v = {"name": v}
            _check_keys(f"variables[{i}]", v, VariableConfig)
            variables.append(VariableConfig(**v))
        data["variables"] = tuple(variables)
        if "lags" in data:
            _check_keys("lags", data["lags"], LagConfig)
            data["lags"] = LagConfig(**data["lags"])
        if "bootstrap" in data:
            _check_keys("bootstrap", data["bootstrap"], BootstrapConfig)
            data["bootstrap"] = BootstrapConfig(**data["bootstrap"])
        for key in ("normalization", "orderings", "lm_lags"):
            if data.get(key) is not None:
                data[key] = tuple(tuple(x) if isinstance(x, list) else x for x in data[key])
        if base_dir is not None:
            for key in ("input", "output_dir"):
                if key in data and not Path(data[key]).is_absolute():
                    data[key] = str(base_dir / data[key])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return RunConfig.from_dict(data or {}, base_dir=path.parent)
