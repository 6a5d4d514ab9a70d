"""TOML configuration for the analysis pipeline and the synthetic generator."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .index import IndexConfig
from .model import ANGLE_KEYS, MOVEMENT_NAMES, AxisId, GridSpec, JointId, Orientation
from .pipeline import AnalysisConfig
from .synth import DEFAULT_NROM, SynthParams

CONFIG_ENV = "COMPINDEX_CONFIG"

_ANALYSIS_KEYS = {
    "nrom_path", "schema", "workers", "reference_scope", "scale_features", "std_ddof",
    "joint_weights", "index", "grid", "movements",
}


def read_toml(path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _angle_key(name: str):
    try:
        j, a = name.split("_")
        key = (JointId.parse(j), AxisId.parse(a))
    except ValueError:
        raise ConfigError(f"bad movement axis name {name!r}; expected e.g. 's_z'") from None
    if key not in ANGLE_KEYS:
        raise ConfigError(f"{name!r} is not a movement axis")
    return key


def grid_from_mapping(data: Mapping) -> GridSpec:
    custom = data.get("custom")
    if custom is not None:
        custom = {int(k): tuple(v) for k, v in custom.items()}
    try:
        return GridSpec(
            numbering=data.get("numbering", "custom" if custom else "row-major-top-left"),
            custom=custom,
            spacing_mm=float(data.get("spacing_mm", 300.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def analysis_from_mapping(data: Mapping, base_dir=None) -> tuple[AnalysisConfig, dict]:
    """Build an :class:`AnalysisConfig`; also returns resolved file paths (nrom, schema)."""
    unknown = sorted(set(data) - _ANALYSIS_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    paths = {}
    for key in ("nrom_path", "schema"):
        if key in data:
            p = Path(data[key])
            paths[key] = p if p.is_absolute() else base / p
    try:
        idx = data.get("index", {})
        cfg = AnalysisConfig(
            reference_scope=data.get("reference_scope", "per-orientation"),
            joint_weights=tuple(data["joint_weights"]) if "joint_weights" in data else None,
            scale_features=bool(data.get("scale_features", False)),
            std_ddof=int(data.get("std_ddof", 0)),
            index=IndexConfig(
                divisor_L=float(idx.get("divisor_L", 100.0)),
                divisor_A=float(idx.get("divisor_A", 10.0)),
                weights=tuple(idx.get("weights", (0.25, 0.25, 0.25, 0.25))),
            ),
            grid=grid_from_mapping(data.get("grid", {})),
            workers=int(data.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.reference_scope not in ("per-orientation", "pooled"):
        raise ConfigError("reference_scope must be 'per-orientation' or 'pooled'")
    if cfg.std_ddof not in (0, 1):
        raise ConfigError("std_ddof must be 0 (population) or 1 (sample)")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    paths["movements"] = {_angle_key(k): str(v) for k, v in data.get("movements", {}).items()}
    return cfg, paths


def load_analysis_config(path=None) -> tuple[AnalysisConfig, dict]:
    """Load from ``path``, else from ``$COMPINDEX_CONFIG``, else defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return AnalysisConfig(), {"movements": {}}
    return analysis_from_mapping(read_toml(path), Path(path).parent)


def movement_names(overrides: Mapping | None = None) -> dict:
    return {**MOVEMENT_NAMES, **(overrides or {})}


def synth_params_from_mapping(data: Mapping) -> SynthParams:
    fields = dict(data)
    try:
        if "regions" in fields:
            fields["regions"] = {Orientation.parse(k): tuple(v) for k, v in fields["regions"].items()}
        if "nrom" in fields:
            fields["nrom"] = {**DEFAULT_NROM, **{_angle_key(k): float(v) for k, v in fields["nrom"].items()}}
        for key in ("height_range_mm", "arm_length_range_mm"):
            if key in fields:
                fields[key] = tuple(fields[key])
        return SynthParams(**fields)
    except TypeError as exc:
        raise ConfigError(f"bad synth parameters: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_synth_params(path=None, **overrides) -> SynthParams:
    data = read_toml(path) if path else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return synth_params_from_mapping(data)
