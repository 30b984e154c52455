"""Flat ``key = value`` configuration files.

One parameter per line, ``#`` starts a comment. Keys are namespaced by the
section they configure (``vehicle.m``, ``mpc.N``, ``scenario.mu``). A key
ending in ``_deg`` is given in degrees and stored in radians under the bare
name; ``_kmh`` likewise converts km/h to m/s. Tuple-valued fields take
comma-separated numbers.
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path
from typing import Any, Mapping

from ..params import MotorTorqueCurve, VehicleParams
from .scenario import RunConfig

# section -> (owner path inside RunConfig)
SECTIONS: dict[str, tuple[str, ...]] = {
    "scenario": ("scenario",),
    "steer": ("scenario", "steer"),
    "path": ("scenario", "path"),
    "vehicle": ("vehicle",),
    "motor": ("motor",),
    "mpc": ("mpc",),
    "sliding": ("sliding",),
    "plant": ("plant",),
    "observer": ("observer",),
    "driver": ("driver",),
    "control": ("control",),
}

_UNIT_SUFFIXES = {"_deg": math.radians, "_kmh": lambda v: v / 3.6}


_APPLIED_LAST = ("vehicle.I_z",)


class ConfigError(ValueError):
    pass


def parse_flat(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def _coerce(text: str, current: Any, convert=None) -> Any:
    def num(s: str) -> float:
        v = float(s)
        return convert(v) if convert else v

    if isinstance(current, bool):
        low = text.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"not a boolean: {text!r}")
        return low in ("true", "1", "yes")
    if isinstance(current, tuple):
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return tuple(num(p) for p in parts)
    if isinstance(current, int):
        return int(text)
    if isinstance(current, str):
        return text
    return num(text)


def _set_path(obj, path: tuple[str, ...], name: str, value_text: str):
    if not path:
        convert = None
        for suffix, fn in _UNIT_SUFFIXES.items():
            if name.endswith(suffix):
                name, convert = name[: -len(suffix)], fn
                break
        names = {f.name for f in dataclasses.fields(obj)}
        if name not in names:
            raise ConfigError(f"unknown parameter {name!r} for {type(obj).__name__}")
        current = getattr(obj, name)
        try:
            value = _coerce(value_text, current, convert)
        except ValueError as exc:
            raise ConfigError(f"bad value for {name!r}: {value_text!r} ({exc})") from None
        changes = {name: value}
        # derived defaults follow their inputs; explicit values are applied last
        if isinstance(obj, VehicleParams) and name != "I_z":
            changes["I_z"] = None
        if isinstance(obj, MotorTorqueCurve) and name in ("T_base", "P_max"):
            changes.update(speeds=(), torques=())
        return dataclasses.replace(obj, **changes)
    child = getattr(obj, path[0])
    return dataclasses.replace(obj, **{path[0]: _set_path(child, path[1:], name, value_text)})


def apply_overrides(cfg: RunConfig, values: Mapping[str, str]) -> RunConfig:
    values = dict(values)
    table = {k: values.pop(f"motor.{k}") for k in ("speeds", "torques") if f"motor.{k}" in values}
    ordered = sorted(values.items(), key=lambda kv: kv[0] in _APPLIED_LAST)
    for key, text in ordered:
        section, _, name = key.partition(".")
        if section not in SECTIONS or not name:
            raise ConfigError(f"unknown key {key!r}")
        try:
            cfg = _set_path(cfg, SECTIONS[section], name, str(text))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from None
    if table:
        try:
            motor = dataclasses.replace(
                cfg.motor, **{k: _coerce(v, (), None) for k, v in table.items()})
        except ValueError as exc:
            raise ConfigError(f"motor table: {exc}") from None
        cfg = dataclasses.replace(cfg, motor=motor)
    return cfg


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return apply_overrides(base or RunConfig(), parse_flat(text))


def builtin_scenario(name: str) -> Path:
    """Path of a scenario file shipped with the package."""
    path = Path(__file__).resolve().parent.parent / "scenarios" / f"{name}.cfg"
    if not path.exists():
        raise FileNotFoundError(path)
    return path
