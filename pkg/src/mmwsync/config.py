"""Flat key-value config files: ``key = value`` lines with ``#`` comments."""

from __future__ import annotations

import os

from .errors import ConfigError


def parse_config(path: str) -> dict:
    """Read a config file into a {key: raw-string} dict."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key] = value.strip()
    return out


def get_int(cfg: dict, key: str, default=None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected integer, got '{cfg[key]}'") from exc


def get_float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected number, got '{cfg[key]}'") from exc


def get_bool(cfg: dict, key: str, default=None) -> bool:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    value = cfg[key].lower()
    if value in ("true", "1", "yes", "on"):
        return True
    if value in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"key '{key}': expected boolean, got '{cfg[key]}'")


def get_float_list(cfg: dict, key: str, default=None) -> list:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return [float(v) for v in cfg[key].split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected comma-separated numbers") from exc


def get_str(cfg: dict, key: str, default=None) -> str:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    return cfg[key]
