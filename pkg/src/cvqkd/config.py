"""Flat ``name = value`` configuration files.

One assignment per line; ``#`` starts a comment. Numbers may be written as
``2^-32`` or ``2**-32``. ``mu = optimize`` requests the modulation search.
Keys not listed in ``REQUIRED`` fall back to the ``ProtocolConfig`` defaults.
"""

from __future__ import annotations

import re
from dataclasses import fields
from pathlib import Path

from .channel import CONFIG_FIELDS, ConfigError, ProtocolConfig

REQUIRED = ("L", "xi", "beta", "N", "p", "q")

_INT_FIELDS = {"n_bks", "N", "M", "p", "q", "iter_max", "seed", "workers"}
_STR_FIELDS = {"pe_method"}
_POW = re.compile(r"^([+-]?[\d.]+(?:e[+-]?\d+)?)\s*(?:\^|\*\*)\s*([+-]?[\d.]+)$", re.I)


def _number(text: str, name: str) -> float:
    m = _POW.match(text)
    try:
        if m:
            return float(m.group(1)) ** float(m.group(2))
        return float(text)
    except (ValueError, OverflowError):
        raise ConfigError(f"{name}: expected a number, got {text!r}") from None


def _convert(name: str, text: str):
    if text.lower() in ("none", "auto", ""):
        if name in ("M", "mu", "snr"):
            return None
        raise ConfigError(f"{name}: a value is required")
    if name in _STR_FIELDS:
        return text
    if name == "mu" and text.lower() == "optimize":
        return "optimize"
    value = _number(text, name)
    if name in _INT_FIELDS:
        if value != int(value):
            raise ConfigError(f"{name}: expected an integer, got {text!r}")
        return int(value)
    return value


def parse_config(text: str, *, require: tuple[str, ...] = REQUIRED) -> ProtocolConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'name = value', got {raw.strip()!r}")
        name, value = (s.strip() for s in line.split("=", 1))
        if name not in CONFIG_FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {name!r}")
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate key {name!r}")
        values[name] = _convert(name, value)

    missing = [k for k in require if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    # an explicit mu overrides the default SNR target
    if values.get("mu") is not None and "snr" not in values:
        values["snr"] = None
    return ProtocolConfig(**values)


def load_config(path) -> ProtocolConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def dump_config(cfg: ProtocolConfig) -> str:
    lines = []
    for f in fields(ProtocolConfig):
        value = getattr(cfg, f.name)
        lines.append(f"{f.name} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"
