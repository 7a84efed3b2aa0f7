"""Fast invariant checks runnable without pytest (``sefdm-mimo selftest``)."""

from __future__ import annotations

import numpy as np

from ..architecture import ArchitectureConfig
from ..beamforming import DEFAULT_CODEBOOK, relative_phase_offset, weights_for_pattern
from ..metrics import PowerModel, effective_se, energy_efficiency
from ..precoding import EffectiveChannel, build_digital_precoder
from ..qam import constellation, qam_demap, qam_map
from ..waveform import (WaveformConfig, build_band_correlation, build_correlation_matrix,
                        build_modulation_matrix, build_waveform_precoder, demodulate, modulate)
from .link import run_link


def _orthogonal_limit():
    c = build_correlation_matrix(WaveformConfig(alpha=1.0)).entries
    return np.max(np.abs(c - np.eye(c.shape[0]))) <= 1e-12


def _matched_filter():
    ok = True
    for alpha in (0.8, 0.9, 1.0):
        cfg = WaveformConfig(n_total=16, n_data=8, alpha=alpha)
        F = build_modulation_matrix(cfg).entries
        C = build_correlation_matrix(cfg).entries
        ok &= np.max(np.abs(F.conj().T @ F - C)) <= 1e-10
    return ok


def _waveform_precoder():
    C = build_band_correlation(WaveformConfig())
    W = build_waveform_precoder(C)
    return np.max(np.abs(C.entries @ W - np.eye(C.size))) <= 1e-8


def _round_trip():
    cfg = WaveformConfig(n_total=12, n_data=12)
    F = build_modulation_matrix(cfg)
    C = build_correlation_matrix(cfg)
    W = build_waveform_precoder(C)
    s = qam_map(np.random.default_rng(0).integers(0, 2, 48), 16)
    return np.max(np.abs(demodulate(modulate(W @ s, F), F) - s)) <= 1e-7


def _qam():
    bits = np.random.default_rng(1).integers(0, 2, 4000)
    return (abs(np.mean(np.abs(constellation(16)) ** 2) - 1) <= 1e-12
            and np.array_equal(qam_demap(qam_map(bits, 16), 16), bits))


def _codebook():
    rows = [(p.steer_deg, p.rel_phase_deg) for p in DEFAULT_CODEBOOK.patterns]
    phase_ok = all(abs(abs(relative_phase_offset(s)) - p) <= 1.0 for s, p in rows)
    unit = all(np.allclose(np.abs(weights_for_pattern(p)), 1.0) for p in DEFAULT_CODEBOOK.patterns)
    return rows[3] == (30.0, 90.0) and phase_ok and unit


def _peak_se():
    ofdm, sefdm = WaveformConfig(alpha=1.0), WaveformConfig(alpha=0.9)
    return (abs(effective_se(0, ofdm, 4) - 2.0) < 1e-12
            and abs(effective_se(0, sefdm, 16) - 4.0 / 0.9) < 1e-9)


def _ee_ratio():
    hp = PowerModel.for_architecture(ArchitectureConfig.for_kind("HP"))
    fdp = PowerModel.for_architecture(ArchitectureConfig.for_kind("FDP_I"))
    ratio = energy_efficiency(2.0, hp) / energy_efficiency(2.0, fdp)
    return abs(ratio - 228 / 77.5) <= 1e-9


def _zero_forcing():
    rng = np.random.default_rng(2)
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    D = build_digital_precoder(EffectiveChannel(h))
    return np.max(np.abs(h @ D.entries - np.eye(2))) <= 1e-9


def _noiseless_link():
    for arch in ("HP", "FDP_I"):
        for alpha in (1.0, 0.9):
            rep = run_link(arch, WaveformConfig(alpha=alpha), 16, np.inf, seed=7, frames=1)
            if rep.aggregate_ber() != 0 or rep.leakage >= 1e-8:
                return False
    return True


CHECKS = (
    ("orthogonal limit gives identity correlation", _orthogonal_limit),
    ("matched filter equals correlation matrix", _matched_filter),
    ("waveform precoder inverts the band correlation", _waveform_precoder),
    ("precoded SEFDM round trip", _round_trip),
    ("QAM energy and round trip", _qam),
    ("codebook table and phase-only weights", _codebook),
    ("peak spectral efficiency", _peak_se),
    ("energy-efficiency ratio", _ee_ratio),
    ("zero-forcing residual", _zero_forcing),
    ("noiseless link is exact", _noiseless_link),
)


def run_selftest(stream=None) -> bool:
    """Run every check, print one PASS/FAIL line each, return overall success."""
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check())
            detail = ""
        except Exception as exc:  # report, keep going
            passed, detail = False, f" ({type(exc).__name__}: {exc})"
        ok &= passed
        line = f"{'PASS' if passed else 'FAIL'}  {name}{detail}"
        print(line, file=stream)
    return ok
