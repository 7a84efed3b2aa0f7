"""Codebook-based analogue beamforming with phase-only shifters.

Each RF chain drives a short uniform line of antennas through phase
shifters. A beam pattern is a constant phase step between adjacent
shifters; the seven-entry codebook covers -30..30 degrees in 10 degree
steps. Weights use ``exp(-j i phi)`` for antenna ``i`` so that a positive
steering angle points toward positive ``sin(theta)`` in
:func:`array_response` (and toward users at positive x in the channel
model).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class BeamPattern:
    index: int
    steer_deg: float
    rel_phase_deg: float
    sign: int = 1


@dataclass(frozen=True)
class Codebook:
    patterns: tuple
    spacing_wavelengths: float = 0.5
    antennas_per_chain: int = 3

    def __len__(self):
        return len(self.patterns)

    def __getitem__(self, index) -> BeamPattern:
        return self.patterns[index]

    def weights(self, index: int) -> np.ndarray:
        return weights_for_pattern(self.patterns[index], self.antennas_per_chain)

    def to_csv(self, stream=None) -> str:
        """Write ``index,steer_deg,rel_phase_deg`` rows; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "steer_deg", "rel_phase_deg"])
        for p in self.patterns:
            writer.writerow([p.index, f"{p.steer_deg:g}", f"{p.rel_phase_deg:g}"])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


# (steer_deg, rel_phase_deg) as published for d = lambda/2; the phase steps
# are kept verbatim rather than recomputed (10 deg -> 32, not 31.26).
_PUBLISHED = ((0, 0), (10, 32), (20, 62), (30, 90), (-10, 32), (-20, 62), (-30, 90))

DEFAULT_CODEBOOK = Codebook(tuple(
    BeamPattern(i, float(s), float(p), -1 if s < 0 else 1)
    for i, (s, p) in enumerate(_PUBLISHED)))


def relative_phase_offset(steer_deg: float, spacing_wavelengths: float = 0.5) -> float:
    """Phase step between adjacent shifters steering to ``steer_deg``, in degrees."""
    return 360.0 * spacing_wavelengths * float(np.sin(np.deg2rad(steer_deg)))


def weights_for_pattern(p: BeamPattern, antennas_per_chain: int = 3) -> np.ndarray:
    if antennas_per_chain < 1:
        raise ShapeError("antennas_per_chain must be >= 1")
    i = np.arange(antennas_per_chain)
    return np.exp(-1j * i * np.deg2rad(p.rel_phase_deg) * p.sign)


def array_response(weights, theta_deg, spacing_wavelengths: float = 0.5):
    """Far-field gain ``sum_i w_i exp(j 2 pi (d/lambda) i sin(theta))``.

    ``theta_deg`` may be an array; the result has the same shape.
    """
    w = np.asarray(weights, dtype=complex)
    theta = np.deg2rad(np.asarray(theta_deg, dtype=float))
    i = np.arange(w.size)
    steering = np.exp(2j * np.pi * spacing_wavelengths * np.multiply.outer(np.sin(theta), i))
    return steering @ w


def measure_beam_power(rx_pilot) -> float:
    """Mean power of the demodulated pilot over its data sub-carriers."""
    y = np.asarray(rx_pilot)
    if y.size == 0:
        raise ShapeError("empty pilot observation")
    return float(np.mean(np.abs(y) ** 2))


def select_beam(powers: Sequence[float], n_patterns: int = len(DEFAULT_CODEBOOK)) -> int:
    """Index of the strongest pattern; ties go to the lowest index."""
    p = np.asarray(powers, dtype=float)
    if p.shape != (n_patterns,):
        raise ShapeError(f"expected {n_patterns} beam powers, got shape {p.shape}")
    return int(np.argmax(p))
