"""Flat key = value run configuration with [section] headers.

Sections and keys:

    [grid]    n, length
    [time]    dt, horizon
    [model]   eps, dealias, cfl_max
    [init]    preset, amplitude, mode_x, mode_y, band_lo, band_hi,
              u_amp, v_amp, theta_amp, seed
    [output]  diag_stride, snap_stride, dir

Only [grid] n, [time] dt and [time] horizon are required; everything else
falls back to the SimConfig defaults. Unknown sections or keys, malformed
lines and out-of-range values raise ConfigParseError with the offending
location.
"""

from __future__ import annotations

import configparser

from .errors import BadParams, ConfigParseError
from .model import SimConfig

_SCHEMA = {
    "grid": {"n": int, "length": float},
    "time": {"dt": float, "horizon": float},
    "model": {"eps": float, "dealias": "bool", "cfl_max": float},
    "init": {
        "preset": str,
        "amplitude": float,
        "mode_x": int,
        "mode_y": int,
        "band_lo": int,
        "band_hi": int,
        "u_amp": float,
        "v_amp": float,
        "theta_amp": float,
        "seed": int,
    },
    "output": {"diag_stride": int, "snap_stride": int, "dir": str},
}

_KEY_TO_FIELD = {
    ("grid", "n"): "n",
    ("grid", "length"): "length",
    ("time", "dt"): "dt",
    ("time", "horizon"): "horizon",
    ("model", "eps"): "eps",
    ("model", "dealias"): "dealias",
    ("model", "cfl_max"): "cfl_max",
    ("init", "preset"): "preset",
    ("init", "amplitude"): "amplitude",
    ("init", "mode_x"): "mode_x",
    ("init", "mode_y"): "mode_y",
    ("init", "band_lo"): "band_lo",
    ("init", "band_hi"): "band_hi",
    ("init", "u_amp"): "u_amp",
    ("init", "v_amp"): "v_amp",
    ("init", "theta_amp"): "theta_amp",
    ("init", "seed"): "seed",
    ("output", "diag_stride"): "diag_stride",
    ("output", "snap_stride"): "snap_stride",
    ("output", "dir"): "outdir",
}

_REQUIRED = (("grid", "n"), ("time", "dt"), ("time", "horizon"))


def _coerce(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    try:
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return kind(raw)
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def parse_config_text(text: str) -> SimConfig:
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigParseError(str(exc)) from exc

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigParseError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigParseError(f"unknown key [{section}] {key}")
            values[_KEY_TO_FIELD[(section, key)]] = _coerce(section, key, raw)

    for section, key in _REQUIRED:
        if _KEY_TO_FIELD[(section, key)] not in values:
            raise ConfigParseError(f"missing required key [{section}] {key}")

    try:
        return SimConfig(**values)
    except BadParams as exc:
        raise ConfigParseError(str(exc)) from exc


def parse_config_file(path) -> tuple[SimConfig, str]:
    """Parse a config file; returns the config and the raw text echo."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text), text


def render_config(cfg: SimConfig) -> str:
    """Canonical text form of a config (used when none was supplied)."""
    lines = [
        "[grid]",
        f"n = {cfg.n}",
        f"length = {cfg.length!r}",
        "",
        "[time]",
        f"dt = {cfg.dt!r}",
        f"horizon = {cfg.horizon!r}",
        "",
        "[model]",
        f"eps = {cfg.eps!r}",
        f"dealias = {str(cfg.dealias).lower()}",
        f"cfl_max = {cfg.cfl_max!r}",
        "",
        "[init]",
        f"preset = {cfg.preset}",
        f"amplitude = {cfg.amplitude!r}",
        f"mode_x = {cfg.mode_x}",
        f"mode_y = {cfg.mode_y}",
        f"band_lo = {cfg.band_lo}",
        f"band_hi = {cfg.band_hi}",
        f"u_amp = {cfg.u_amp!r}",
        f"v_amp = {cfg.v_amp!r}",
        f"theta_amp = {cfg.theta_amp!r}",
        f"seed = {cfg.seed}",
        "",
        "[output]",
        f"diag_stride = {cfg.diag_stride}",
        f"snap_stride = {cfg.snap_stride}",
    ]
    if cfg.outdir:
        lines.append(f"dir = {cfg.outdir}")
    return "\n".join(lines) + "\n"
