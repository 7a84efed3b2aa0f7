"""One link simulation: beam sweep, channel estimation, data frames.

Signal chain per symbol, in order: waveform precoder on the data band,
digital precoder across RF chains (data only), guard-band mapping,
modulation, cyclic prefix, analogue weights per chain, channel plus noise,
then prefix removal, demodulation and band extraction at each user.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..architecture import ArchitectureConfig, parse_kind
from ..beamforming import DEFAULT_CODEBOOK, Codebook, measure_beam_power, select_beam
from ..channel import (DEFAULT_CARRIER_HZ, FullChannel, Geometry, analog_matrix,
                       default_user_positions, effective_channel, los_channel,
                       reference_scale, transmit)
from ..errors import SimulationError
from ..framing import (PILOT_VALUE, FrameConfig, add_cyclic_prefix, bits_per_frame, build_frame,
                       data_block, extract_data_band, map_guard_bands, remove_cyclic_prefix)
from ..metrics import LinkCounts, MetricsReport
from ..precoding import apply_digital_precoding, build_digital_precoder, estimate_channel
from ..qam import qam_demap
from ..waveform import (CorrelationMatrix, ModulationMatrix, WaveformConfig,
                        build_band_correlation, build_modulation_matrix, build_waveform_precoder, demodulate, modulate, power_expansion)

log = logging.getLogger(__name__)

# spawn_key roots inside one link run
_SWEEP_KEY = 0
_FRAME_KEY = 1


@dataclass(frozen=True)
class LinkSetup:
    """Everything fixed for a run: channel, matrices and noise level."""

    arch: ArchitectureConfig
    wcfg: WaveformConfig
    frame_cfg: FrameConfig
    H_full: FullChannel
    F: ModulationMatrix
    C: CorrelationMatrix
    W_p: np.ndarray
    power_gain: float
    snr_db: float

    @classmethod
    def create(cls, arch, wcfg: WaveformConfig, snr_db: float, user_positions=None,
               carrier_hz: float = DEFAULT_CARRIER_HZ, symbols_per_slot: int = 7) -> "LinkSetup":
        arch = arch if isinstance(arch, ArchitectureConfig) else ArchitectureConfig.for_kind(arch)
        users = default_user_positions() if user_positions is None else np.asarray(user_positions, float)
        geom = Geometry.ula(arch.n_tx, users, carrier_hz)
        # same normalisation for every architecture, so SNR points line up
        H = los_channel(geom).scaled(reference_scale(users, carrier_hz))
        C = build_band_correlation(wcfg)
        W_p = build_waveform_precoder(C)
        return cls(arch, wcfg, FrameConfig.for_architecture(arch, symbols_per_slot), H,
                   build_modulation_matrix(wcfg), C, W_p, power_expansion(C, W_p), float(snr_db))

    def analog(self, weights) -> np.ndarray:
        return analog_matrix(weights, self.arch.n_tx, self.arch.splitter_gain)

    def unit_weights(self) -> list:
        return [np.ones(self.arch.antennas_per_chain, dtype=complex) for _ in range(self.arch.n_rf)]

    def send(self, chain_band, A: np.ndarray, rng) -> np.ndarray:
        """Transmit ``(n_rf, n_sym, n_data)`` band symbols; return ``(n_user, n_sym, n_data)``.

        Noise per time sample has variance ``g / snr`` with ``g`` the waveform
        precoder's energy expansion, i.e. the SNR is referred to one occupied
        data sub-carrier of unit-energy symbols.
        """
        wcfg = self.wcfg
        n_rf, n_sym, _ = chain_band.shape
        shaped = map_guard_bands(chain_band @ self.W_p.T, wcfg)
        x = add_cyclic_prefix(modulate(shaped, self.F), wcfg.cp_len)
        tx = np.tensordot(A, x, axes=(1, 0)).reshape(A.shape[0], -1)
        rx = transmit(tx, self.H_full, self.snr_db, rng=rng, signal_power=self.power_gain)
        rx = remove_cyclic_prefix(rx.reshape(rx.shape[0], n_sym, wcfg.symbol_len), wcfg.cp_len)
        return extract_data_band(demodulate(rx, self.F), wcfg)


def _staggered_pilots(setup: LinkSetup, pilot: complex) -> np.ndarray:
    n_rf = setup.arch.n_rf
    grid = np.zeros((n_rf, setup.frame_cfg.n_overhead_symbols, setup.wcfg.n_data), dtype=complex)
    for t in range(n_rf):
        grid[t, t] = pilot
    return grid


def beam_sweep(setup: LinkSetup, rng, codebook: Codebook = DEFAULT_CODEBOOK,
               pilot: complex = PILOT_VALUE):
    """Try every pattern on every chain with one staggered pilot slot each.

    Chain ``t`` serves user ``t``. Returns the selected pattern per chain and
    the ``(n_rf, n_patterns)`` measured powers.
    """
    arch = setup.arch
    if arch.antennas_per_chain != codebook.antennas_per_chain:
        raise SimulationError("codebook does not match the antennas per chain")
    grid = _staggered_pilots(setup, pilot)
    powers = np.zeros((arch.n_rf, len(codebook)))
    for p in range(len(codebook)):
        A = setup.analog([codebook.weights(p)] * arch.n_rf)
        y = setup.send(grid, A, rng)
        for t in range(arch.n_rf):
            powers[t, p] = measure_beam_power(y[t % arch.n_user, t])
    chosen = [select_beam(powers[t], len(codebook)) for t in range(arch.n_rf)]
    return chosen, powers


def _leakage(M: np.ndarray) -> float:
    stack = M if M.ndim == 3 else M[None]
    p = np.abs(stack) ** 2
    own = np.einsum("kuu->ku", p)
    cross = p.sum(axis=2) - own
    with np.errstate(divide="ignore"):
        ratio = np.where(own > 0, cross / np.where(own > 0, own, 1.0), np.inf)
    return float(ratio.max())


def _frame_seeds(seed: int, f: int):
    bits = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_FRAME_KEY, f, 0)))
    noise = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_FRAME_KEY, f, 1)))
    return bits, noise


def run_frame(setup: LinkSetup, weights, f: int, seed: int, order: int, genie: bool = False,
              per_subcarrier: bool = False, pilot: complex = PILOT_VALUE) -> LinkCounts:
    """Simulate frame ``f``: one overhead pilot slot then the data slots."""
    arch, wcfg = setup.arch, setup.wcfg
    bit_rng, noise_rng = _frame_seeds(seed, f)
    need = bits_per_frame(wcfg, order, setup.frame_cfg)
    tx_bits = bit_rng.integers(0, 2, size=(arch.n_user, need), dtype=np.uint8)
    A = setup.analog(weights)
    stage = "build"
    try:
        frame = build_frame(list(tx_bits), arch, wcfg, order, pilot, setup.frame_cfg)
        stage = "overhead"
        y = setup.send(_staggered_pilots(setup, pilot), A, noise_rng)
        rx_pilots = y[:, :arch.n_rf]
        H_est = estimate_channel(rx_pilots, pilot * np.ones(wcfg.n_data), per_subcarrier)
        H_true = effective_channel(setup.H_full, weights, arch.splitter_gain)
        D = build_digital_precoder(H_true if genie else H_est)

        stage = "data"
        streams = data_block(frame, wcfg)
        chains = apply_digital_precoding(D, streams)
        r = setup.send(chains, A, noise_rng)
    except SimulationError as exc:
        raise type(exc)(f"frame {f}, {stage} stage: {exc}") from exc

    counts = LinkCounts(arch.n_user, frames=1)
    for u in range(arch.n_user):
        counts.add_user(u, r[u], streams[u], qam_demap(r[u], order), tx_bits[u])
    M = np.matmul(H_true.entries, D.entries)
    counts.leakage = _leakage(M)
    shaped = chains @ setup.W_p.T
    ant = np.tensordot(A, shaped, axes=(1, 0))
    # time-domain energy of F s is s^H C s; report it per symbol and data sub-carrier
    e = np.einsum("asn,nm,asm->", ant.conj(), setup.C.entries, ant).real
    counts.tx_power = float(e) / (ant.shape[1] * wcfg.n_data)
    return counts


def run_link(arch, wcfg: WaveformConfig, order: int, snr_db: float, seed: int, frames: int = 1,
             user_positions=None, genie: bool = False, per_subcarrier: bool = False,
             workers: int = 1, codebook: Codebook = DEFAULT_CODEBOOK,
             carrier_hz: float = DEFAULT_CARRIER_HZ, symbols_per_slot: int = 7,
             pilot: complex = PILOT_VALUE) -> MetricsReport:
    """Run the full three-stage precoding link and score it.

    Parameters
    ----------
    arch : ArchitectureConfig or kind name
    wcfg : WaveformConfig
    order : {4, 16}
    snr_db : float
        Per data sub-carrier SNR; ``inf`` disables noise everywhere.
    seed : int
        Root of every random draw in the run. Bits and noise of frame ``f``
        come from their own substreams, so they do not depend on ``frames``,
        ``workers`` or the architecture.
    frames : int
    genie : bool
        Build the digital precoder from the true effective channel.
    per_subcarrier : bool
        Estimate one channel matrix per data sub-carrier.
    workers : int
        Threads used across frames; results are merged in frame order.
    """
    if frames < 1:
        raise SimulationError("frames must be >= 1")
    if not isinstance(arch, ArchitectureConfig):
        arch = ArchitectureConfig.for_kind(parse_kind(arch))
    setup = LinkSetup.create(arch, wcfg, snr_db, user_positions, carrier_hz, symbols_per_slot)

    if arch.is_hybrid:
        sweep_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_SWEEP_KEY,)))
        chosen, _ = beam_sweep(setup, sweep_rng, codebook, pilot)
        weights = [codebook.weights(p) for p in chosen]
        log.debug("%s beam patterns %s", arch.name, chosen)
    else:
        chosen = []
        weights = setup.unit_weights()

    def one(f):
        return run_frame(setup, weights, f, seed, order, genie, per_subcarrier, pilot)

    if workers > 1 and frames > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(frames)))
    else:
        parts = [one(f) for f in range(frames)]

    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return MetricsReport.from_counts(total, arch, wcfg, order, snr_db, seed, chosen)
