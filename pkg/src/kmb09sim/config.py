"""Config-file parsing, flag overrides and the round-trippable config echo.

Config files are INI text with dotted section names::

    [protocol]
    name = kmb09
    dimension = 2

    [channel.rotation]
    theta = pi/4
    rho = 1.0

Angles accept plain radians or multiples of pi (``pi/4``, ``3pi/8``,
``-pi/2``, ``2*pi``).
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import re
from typing import Any, Mapping, Optional

from .channel import RotationNoiseConfig, TurbulenceConfig
from .experiment import ExperimentConfig
from .homodyne import HomodyneConfig


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<mult>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi"
    r"\s*(?:/\s*(?P<div>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_angle(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE_RE.match(str(text))
    if m:
        val = float(m["mult"] or 1.0) * math.pi
        if m["div"]:
            val /= float(m["div"])
        return -val if m["sign"] == "-" else val
    return float(text)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text) -> int:
    if isinstance(text, bool):
        raise ValueError("expected an integer")
    if isinstance(text, int):
        return text
    return int(str(text).strip(), 0)


def _opt_float(text):
    if text is None or str(text).strip().lower() in ("", "none", "null", "auto"):
        return None
    return float(text)


def _beat_mode(text) -> str:
    s = str(text).strip().lower()
    return {"paper": "paper_literal"}.get(s, s)


# section -> key -> (dataclass field path, converter)
SCHEMA: dict[str, dict[str, tuple[str, Any]]] = {
    "protocol": {
        "name": ("protocol", lambda s: str(s).strip().lower()),
        "dimension": ("dimension", _int),
    },
    "channel.rotation": {
        "enabled": ("rotation.enabled", _bool),
        "theta": ("rotation.theta", parse_angle),
        "rho": ("rotation.rho", float),
    },
    "channel.turbulence": {
        "enabled": ("turbulence.enabled", _bool),
        "l0": ("turbulence.l0", float),
        "L0": ("turbulence.L0", float),
        "alpha": ("turbulence.alpha", float),
        "rc": ("turbulence.rc", float),
        "wavelength": ("turbulence.wavelength", float),
        "distance": ("turbulence.distance", float),
        "gain": ("turbulence.gain", float),
        "kappa_min": ("turbulence.kappa_min", _opt_float),
        "kappa_max": ("turbulence.kappa_max", _opt_float),
    },
    "homodyne": {
        "p_signal": ("homodyne.p_signal", float),
        "p_lo": ("homodyne.p_lo", float),
        "omega_if": ("homodyne.omega_if", float),
        "phi_s": ("homodyne.phi_s", parse_angle),
        "phi_lo": ("homodyne.phi_lo", parse_angle),
        "beat_mode": ("homodyne.beat_mode", _beat_mode),
        "decision_mode": ("homodyne.decision_mode", lambda s: str(s).strip().lower()),
        "threshold": ("homodyne.threshold", float),
    },
    "run": {
        "iterations": ("iterations", _int),
        "seed": ("seed", _int),
        "workers": ("workers", _int),
    },
}

_SUB = {
    "rotation": RotationNoiseConfig,
    "turbulence": TurbulenceConfig,
    "homodyne": HomodyneConfig,
}


def _flatten(values: Mapping[str, Mapping[str, Any]]) -> dict[str, Any]:
    """Validate section/key names and convert raw values to field paths."""
    out = {}
    for section, entries in values.items():
        if section not in SCHEMA:
            raise ConfigError("unknown section", key=f"[{section}]")
        for key, raw in entries.items():
            name = f"{section}.{key}"
            if key not in SCHEMA[section]:
                raise ConfigError("unknown key", key=name)
            path, conv = SCHEMA[section][key]
            try:
                out[path] = conv(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"cannot parse {raw!r} ({exc})", key=name) from None
    return out


def _field_key(path: str) -> str:
    for section, entries in SCHEMA.items():
        for key, (p, _) in entries.items():
            if p == path:
                return f"{section}.{key}"
    return path


def _build(fields: Mapping[str, Any]) -> ExperimentConfig:
    top: dict[str, Any] = {}
    sub: dict[str, dict[str, Any]] = {k: {} for k in _SUB}
    for path, val in fields.items():
        head, _, rest = path.partition(".")
        if rest:
            sub[head][rest] = val
        else:
            top[path] = val
    parts = {}
    for name, cls in _SUB.items():
        try:
            parts[name] = cls(**sub[name])
        except ValueError as exc:
            raise ConfigError(str(exc), key=_guess_key(name, str(exc), sub[name])) from None
    try:
        return ExperimentConfig(**top, **parts)
    except ValueError as exc:
        raise ConfigError(str(exc), key=_guess_key("", str(exc), top)) from None


def _guess_key(prefix: str, message: str, given: Mapping[str, Any]) -> Optional[str]:
    """Map a dataclass validation message back to the config key it concerns."""
    candidates = [f.name for f in dataclasses.fields(_SUB[prefix])] if prefix else [
        "protocol", "dimension", "iterations", "seed", "workers"
    ]
    words = set(re.findall(r"\w+", message))
    hits = [c for c in candidates if c in words]
    hits.sort(key=lambda c: c not in given)
    if not hits:
        return None
    return _field_key(f"{prefix}.{hits[0]}" if prefix else hits[0])


def read_config_text(text: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep L0 distinct from l0
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return {s: dict(parser.items(s)) for s in parser.sections()}


def parse_config(text: str = "", overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Build an ExperimentConfig from config text plus dotted-key overrides.

    ``overrides`` maps ``"section.key"`` (e.g. ``"channel.rotation.theta"``)
    to raw values; they win over the file.
    """
    fields = _flatten(read_config_text(text)) if text.strip() else {}
    if overrides:
        nested: dict[str, dict[str, Any]] = {}
        for dotted, val in overrides.items():
            section, _, key = dotted.rpartition(".")
            nested.setdefault(section, {})[key] = val
        fields.update(_flatten(nested))
    return _build(fields)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, dict[str, Any]]:
    """Resolved config keyed like the config file; JSON-serialisable."""
    out: dict[str, dict[str, Any]] = {}
    for section, entries in SCHEMA.items():
        out[section] = {}
        for key, (path, _) in entries.items():
            obj = cfg
            for part in path.split("."):
                obj = getattr(obj, part)
            out[section][key] = obj
    return out


def config_from_dict(data: Mapping[str, Mapping[str, Any]]) -> ExperimentConfig:
    return _build(_flatten(data))


def config_to_ini(cfg: ExperimentConfig) -> str:
    lines = []
    for section, entries in config_to_dict(cfg).items():
        lines.append(f"[{section}]")
        for key, val in entries.items():
            if val is None:
                val = "auto"
            elif isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)
