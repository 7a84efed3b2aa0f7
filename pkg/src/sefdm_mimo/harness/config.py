"""Flat ``key = value`` experiment files.

Recognised keys (lists are comma separated)::

    arch             FDP_I, FDP_II, HP
    waveform         ofdm, sefdm
    alpha            SEFDM compression factor, default 0.9
    order            4, 16
    snr_list         e.g. 0, 10, 20 or a range start:stop:step (stop inclusive)
    frames           frames per point
    seed             master seed
    range_m          user distance from the array centre
    separation_m     distance between the two users
    user_angles_deg  explicit user angles; overrides separation_m
    carrier_hz
    symbols_per_slot
    per_subcarrier   true/false
    genie            true/false
    workers          threads across frames

``#`` starts a comment. Unknown keys are an error.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .sweep import SweepSpec


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {value!r}")


def _snr_list(value: str) -> tuple:
    if ":" in value:
        parts = [float(p) for p in value.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigurationError(f"snr range must be start:stop:step, got {value!r}")
        start, stop, step = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + i * step) for i in range(n))
    return tuple(float(v) for v in _split(value))


_PARSERS = {
    "arch": ("architectures", lambda v: tuple(_split(v))),
    "waveform": ("waveforms", lambda v: tuple(w.lower() for w in _split(v))),
    "alpha": ("alpha", float),
    "order": ("orders", lambda v: tuple(int(o) for o in _split(v))),
    "snr_list": ("snr_list", _snr_list),
    "frames": ("frames", int),
    "seed": ("seed", int),
    "range_m": ("range_m", float),
    "separation_m": ("separation_m", float),
    "user_angles_deg": ("user_angles_deg", lambda v: tuple(float(a) for a in _split(v))),
    "carrier_hz": ("carrier_hz", float),
    "symbols_per_slot": ("symbols_per_slot", int),
    "per_subcarrier": ("per_subcarrier", _bool),
    "genie": ("genie", _bool),
    "workers": ("workers", int),
}


def parse_config(text: str) -> SweepSpec:
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        name, parse = _PARSERS[key]
        try:
            kwargs[name] = parse(value)
        except ConfigurationError:
            raise
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key}: {exc}") from None
    return SweepSpec(**kwargs)


def load_config(path) -> SweepSpec:
    return parse_config(Path(path).read_text())
