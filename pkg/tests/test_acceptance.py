"""Acceptance suite: one recorded PASS/FAIL line per criterion (see the terminal summary)."""

import logging
import time

import numpy as np
import pytest

from sefdm_mimo.architecture import ArchitectureConfig
from sefdm_mimo.beamforming import relative_phase_offset
from sefdm_mimo.channel import user_positions_at_angles
from sefdm_mimo.harness import SweepSpec, point_seed, read_results, run_link, run_sweep
from sefdm_mimo.harness.cli import main
from sefdm_mimo.metrics import PowerModel, effective_se, energy_efficiency
from sefdm_mimo.waveform import (WaveformConfig, build_correlation_matrix,
                                 build_modulation_matrix, correlation_entry)

log = logging.getLogger(__name__)

pytestmark = pytest.mark.acceptance

MASTER_SEED = 0
OFDM = WaveformConfig(alpha=1.0)
SEFDM = WaveformConfig(alpha=0.9)
PUBLISHED_CODEBOOK = ["index,steer_deg,rel_phase_deg", "0,0,0", "1,10,32", "2,20,62", "3,30,90",
                      "4,-10,32", "5,-20,62", "6,-30,90"]


def summed_entry(m, n, alpha, n_total):
    k = np.arange(n_total)
    return np.sum(np.exp(2j * np.pi * m * k * alpha / n_total)
                  * np.exp(-2j * np.pi * n * k * alpha / n_total)) / n_total


def test_c01_orthogonality_limit(acceptance):
    t0 = time.perf_counter()
    C = build_correlation_matrix(WaveformConfig(n_total=128, alpha=1.0)).entries
    elapsed = time.perf_counter() - t0
    err = float(np.max(np.abs(C - np.eye(128))))
    ok = acceptance(1, "orthogonality limit", err <= 1e-12 and elapsed < 1.0,
                    f"max|C-I|={err:.1e}, {elapsed * 1e3:.1f} ms for N=128")
    assert ok


def test_c02_closed_form_vs_summation(acceptance):
    worst = 0.0
    for n_total in (4, 8, 12, 16):
        for alpha in (0.8, 0.9, 1.0):
            m, n = np.meshgrid(np.arange(n_total), np.arange(n_total), indexing="ij")
            closed = correlation_entry(m, n, alpha, n_total)
            summed = np.vectorize(summed_entry)(m, n, alpha, n_total)
            worst = max(worst, float(np.max(np.abs(closed - summed))))
            # the built matrix must be the matched-filter product of the built modulation matrix
            cfg = WaveformConfig(n_total=n_total, n_data=n_total, alpha=alpha)
            F = build_modulation_matrix(cfg).entries
            worst = max(worst, float(np.max(np.abs(F.conj().T @ F - build_correlation_matrix(cfg).entries))))
    ok = acceptance(2, "closed form vs brute-force summation", worst <= 1e-10,
                    f"max deviation {worst:.1e} over N in 4,8,12,16 and alpha in 0.8,0.9,1.0")
    assert ok


def test_c03_codebook_fidelity(acceptance, capsys):
    assert main(["codebook"]) == 0
    dump = capsys.readouterr().out.strip().splitlines()
    exact = dump == PUBLISHED_CODEBOOK
    gaps = {}
    for line in dump[1:]:
        _, steer, phase = line.split(",")
        gaps[float(steer)] = abs(abs(relative_phase_offset(float(steer), 0.5)) - float(phase))
    within = max(gaps.values()) <= 1.0
    ten = gaps[10.0]
    log.warning("10 degree row: formula gives %.2f deg, table lists 32 deg (gap %.2f deg)",
                32 - ten, ten)
    ten_ok = abs(ten - 0.74) < 0.01
    ok = acceptance(3, "codebook fidelity", exact and within and ten_ok,
                    f"dump {'identical to' if exact else 'DIFFERS from'} the table, "
                    f"max phase gap {max(gaps.values()):.2f} deg, 10 deg row gap {ten:.2f} deg")
    assert ok


def test_c04_peak_se(acceptance):
    values = {
        ("ofdm", 4): (effective_se(0, OFDM, 4), 2.0, 1e-12),
        ("ofdm", 16): (effective_se(0, OFDM, 16), 4.0, 1e-12),
        ("sefdm", 4): (effective_se(0, SEFDM, 4), 2.222, 1e-3),
        ("sefdm", 16): (effective_se(0, SEFDM, 16), 4.444, 1e-3),
    }
    ok = all(abs(v - want) <= tol for v, want, tol in values.values())
    detail = ", ".join(f"{w}/{o}QAM={v:.4f}" for (w, o), (v, _, _) in values.items())
    assert acceptance(4, "peak spectral efficiency", ok, detail)


def test_c05_energy_efficiency_ratio(acceptance):
    hp = PowerModel.for_architecture(ArchitectureConfig.for_kind("HP"))
    fdp = PowerModel.for_architecture(ArchitectureConfig.for_kind("FDP_I"))
    worst = max(abs(energy_efficiency(se, hp) / energy_efficiency(se, fdp) - 228 / 77.5)
                for se in (0.5, 2.0, 4.444))
    assert acceptance(5, "energy-efficiency ratio", worst <= 1e-9,
                      f"ratio {energy_efficiency(2, hp) / energy_efficiency(2, fdp):.10f}, "
                      f"error {worst:.1e}")


def test_c06_noiseless_exactness(acceptance):
    t0 = time.perf_counter()
    worst_leak, errors, runs = 0.0, 0, 0
    for kind in ("HP", "FDP_I"):
        for genie in (True, False):
            for wcfg in (OFDM, SEFDM):
                for order in (4, 16):
                    rep = run_link(kind, wcfg, order, np.inf, seed=runs, frames=20, genie=genie)
                    errors += sum(u.bit_errors for u in rep.users)
                    worst_leak = max(worst_leak, rep.leakage)
                    runs += 1
    elapsed = time.perf_counter() - t0
    ok = errors == 0 and worst_leak < 1e-8 and elapsed < 30
    assert acceptance(6, "noiseless exactness", ok,
                      f"{runs} runs x 20 frames, bit errors {errors}, max leakage {worst_leak:.1e}, "
                      f"{elapsed:.1f} s")


def _beam_hits(snr_db, runs=100):
    users = user_positions_at_angles([-20.0, 20.0], 2.0)
    hits = 0
    for r in range(runs):
        seed = point_seed(MASTER_SEED + r, "sefdm", 0.9, 4, snr_db)
        rep = run_link("HP", SEFDM, 4, snr_db, seed=seed, frames=1, user_positions=users)
        # user 0 sits at -20 deg, user 1 at +20 deg
        hits += rep.beam_indices == (5, 2)
    return hits


def test_c07_beam_selection_noiseless(acceptance):
    hits = _beam_hits(np.inf)
    assert acceptance(7, "beam selection", hits == 100, f"noiseless {hits}/100 (need 100)")


def test_c07_beam_selection_10db_pilots(acceptance):
    hits = _beam_hits(10.0)
    assert acceptance(7, "beam selection", hits >= 95, f"10 dB pilots {hits}/100 (need >= 95)")


def test_c08_architecture_ordering(acceptance):
    seed = point_seed(MASTER_SEED, "sefdm", 0.9, 16, 20.0)
    reps = {k: run_link(k, SEFDM, 16, 20.0, seed=seed, frames=200, workers=4)
            for k in ("FDP_I", "HP", "FDP_II")}
    evm = {k: r.aggregate_evm_db() for k, r in reps.items()}
    ber = {k: r.aggregate_ber() for k, r in reps.items()}
    evm_ok = evm["FDP_I"] <= evm["HP"] < evm["FDP_II"]
    ber_ok = ber["FDP_I"] <= ber["HP"] < ber["FDP_II"]
    detail = ("EVM dB " + ", ".join(f"{k} {v:.3f}" for k, v in evm.items())
              + "; BER " + ", ".join(f"{k} {v:.2e}" for k, v in ber.items()))
    assert acceptance(8, "architecture ordering at 20 dB", evm_ok and ber_ok, detail)


def test_c09_se_crossover(acceptance, tmp_path):
    spec = SweepSpec(snr_list=tuple(float(s) for s in range(0, 31, 3)), frames=10, seed=MASTER_SEED)
    rows = read_results(run_sweep(spec, tmp_path / "se.csv").path)
    table = {}
    for r in rows:
        key = (r["arch"], r["order"], r["snr_db"], r["waveform"])
        table.setdefault(key, []).append((float(r["ber"]), float(r["se_e"])))
    checked, worst = 0, 0.0
    for (arch, order, snr, wf), vals in table.items():
        if wf != "sefdm":
            continue
        ofdm = table[(arch, order, snr, "ofdm")]
        for (b_s, se_s), (b_o, se_o) in zip(vals, ofdm):
            if b_s < 1e-3 and b_o < 1e-3:
                checked += 1
                worst = max(worst, abs(se_s / se_o * 0.9 - 1.0))
    ok = checked > 0 and worst <= 0.005
    assert acceptance(9, "SE gain of compression", ok,
                      f"{checked} qualifying (arch, order, SNR, user) points, "
                      f"worst relative deviation from 1/0.9 {worst:.2e}")


def test_c10_determinism(acceptance, tmp_path):
    base = dict(snr_list=(6.0, 18.0), orders=(16,), frames=6, seed=MASTER_SEED)
    run_sweep(SweepSpec(workers=1, **base), tmp_path / "a.csv")
    run_sweep(SweepSpec(workers=1, **base), tmp_path / "b.csv")
    run_sweep(SweepSpec(workers=4, **base), tmp_path / "c.csv")
    a, b, c = ((tmp_path / f"{n}.csv").read_bytes() for n in "abc")
    ok = a == b == c
    assert acceptance(10, "determinism", ok,
                      f"repeat {'identical' if a == b else 'DIFFERENT'}, "
                      f"1 vs 4 threads {'identical' if a == c else 'DIFFERENT'} ({len(a)} bytes)")
