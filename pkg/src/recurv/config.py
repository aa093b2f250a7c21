"""Run configuration read from a TOML file.

Schema (every key except ``metrics`` and ``checks`` is optional)::

    seed = 7
    points_per_metric = 5
    checks = ["identities", "fluid"]
    kappa = 25.132741228718345          # defaults to 8 pi
    output_path = "report.json"         # stdout when absent
    output_format = "json"              # or "csv-summary"

    [tolerances]
    lovelock = 1e-7

    [[metrics]]
    name = "robertson_walker"
    dimension = 4
    scale_factor = "power:0.5"
    parameters = { k = 0 }

See ``configs/`` for a commented example per metric family.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .catalog import CatalogError, MetricSpec, ScaleFactor, validate_spec
from .suite import CHECKS
from .tolerances import Tolerances
from .verify import KAPPA

FORMATS = ("json", "csv-summary")
_TOP_KEYS = {"metrics", "checks", "points_per_metric", "seed", "tolerances", "kappa", "output_path", "output_format"}
_METRIC_KEYS = {"name", "dimension", "parameters", "scale_factor"}


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the offending field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class RunConfig:
    metrics: tuple[MetricSpec, ...]
    checks: tuple[str, ...]
    points_per_metric: int = 5
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    kappa: float = KAPPA
    output_path: Optional[str] = None
    output_format: str = "json"

    def to_json(self) -> dict:
        return {
            "metrics": [m.to_json() for m in self.metrics],
            "checks": list(self.checks),
            "points_per_metric": self.points_per_metric,
            "seed": self.seed,
            "kappa": self.kappa,
            "output_format": self.output_format,
        }


def _int(value: Any, where: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(where, f"must be >= {minimum}, got {value}")
    return value


def _real(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(where, f"expected a finite number, got {value!r}")
    return float(value)


def _metric(entry: Any, where: str) -> MetricSpec:
    if not isinstance(entry, Mapping):
        raise ConfigError(where, "each metric must be a table")
    extra = sorted(set(entry) - _METRIC_KEYS)
    if extra:
        raise ConfigError(f"{where}.{extra[0]}", "unknown key")
    if "name" not in entry:
        raise ConfigError(f"{where}.name", "missing")
    name = entry["name"]
    if not isinstance(name, str):
        raise ConfigError(f"{where}.name", f"expected a string, got {name!r}")
    dim = _int(entry.get("dimension", 4), f"{where}.dimension", 2)
    params = entry.get("parameters", {})
    if not isinstance(params, Mapping):
        raise ConfigError(f"{where}.parameters", "expected a table")
    params = {k: _real(v, f"{where}.parameters.{k}") for k, v in params.items()}
    if "k" in params and params["k"] == int(params["k"]):
        params["k"] = int(params["k"])
    scale = None
    if "scale_factor" in entry:
        text = entry["scale_factor"]
        if not isinstance(text, str):
            raise ConfigError(f"{where}.scale_factor", f"expected a descriptor string, got {text!r}")
        try:
            scale = ScaleFactor.parse(text)
        except (CatalogError, ValueError) as exc:
            raise ConfigError(f"{where}.scale_factor", str(exc)) from None
    spec = MetricSpec(name, dim, params, scale)
    try:
        validate_spec(spec)
    except CatalogError as exc:
        key = "name" if "unknown metric family" in str(exc) else "parameters"
        raise ConfigError(f"{where}.{key}", str(exc)) from None
    return spec


def config_from_mapping(data: Mapping[str, Any]) -> RunConfig:
    """Validate a parsed mapping; raises :class:`ConfigError` naming the bad field."""
    extra = sorted(set(data) - _TOP_KEYS)
    if extra:
        raise ConfigError(extra[0], "unknown key")
    metrics = data.get("metrics")
    if not isinstance(metrics, list) or not metrics:
        raise ConfigError("metrics", "at least one [[metrics]] table is required")
    specs = tuple(_metric(m, f"metrics[{i}]") for i, m in enumerate(metrics))

    checks = data.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ConfigError("checks", f"a non-empty list drawn from {list(CHECKS)} is required")
    for i, c in enumerate(checks):
        if c not in CHECKS:
            raise ConfigError(f"checks[{i}]", f"unknown check {c!r}; expected one of {list(CHECKS)}")
    if len(set(checks)) != len(checks):
        raise ConfigError("checks", "duplicate entries")

    tol_table = data.get("tolerances", {})
    if not isinstance(tol_table, Mapping):
        raise ConfigError("tolerances", "expected a table")
    overrides = {}
    for k, v in tol_table.items():
        if k not in Tolerances.names():
            raise ConfigError(f"tolerances.{k}", "unknown tolerance")
        overrides[k] = _real(v, f"tolerances.{k}")

    fmt = data.get("output_format", "json")
    if fmt not in FORMATS:
        raise ConfigError("output_format", f"expected one of {list(FORMATS)}, got {fmt!r}")
    path = data.get("output_path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output_path", "expected a string")
    kappa = _real(data.get("kappa", KAPPA), "kappa")
    if kappa == 0:
        raise ConfigError("kappa", "must be nonzero")

    return RunConfig(
        metrics=specs,
        checks=tuple(sorted(checks)),
        points_per_metric=_int(data.get("points_per_metric", 5), "points_per_metric", 1),
        seed=_int(data.get("seed", 0), "seed", 0),
        tolerances=Tolerances().replace(**overrides),
        kappa=kappa,
        output_path=path,
        output_format=fmt,
    )


def parse_config(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries "(at line L, column C)"
        raise ConfigError("syntax", str(exc)) from None
    return config_from_mapping(data)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from None
    return parse_config(text)
