"""EVM, BER, effective spectral efficiency and energy efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .architecture import ArchitectureConfig
from .errors import ConfigurationError, ShapeError
from .qam import bits_per_symbol
from .waveform import WaveformConfig

EVM_FLOOR_DB = -100.0
P_USRP_W = 38.0
P_PS_W = 0.25

CSV_FIELDS = ("arch", "waveform", "alpha", "order", "snr_db", "user",
              "evm_db", "ber", "se_e", "eta", "frames", "seed")


def _evm_from_energy(err: float, ref: float) -> float:
    if ref <= 0:
        raise ShapeError("reference symbols carry no energy")
    if err <= 0:
        return EVM_FLOOR_DB
    return max(EVM_FLOOR_DB, 10.0 * math.log10(err / ref))


def evm_db(rx_symbols, ref_symbols) -> float:
    """``10 log10(mean|r - s|^2 / mean|s|^2)``, floored at -100 dB."""
    r = np.asarray(rx_symbols).ravel()
    s = np.asarray(ref_symbols).ravel()
    if r.size == 0 or r.size != s.size:
        raise ShapeError(f"need equal non-empty symbol sequences, got {r.size} and {s.size}")
    return _evm_from_energy(float(np.sum(np.abs(r - s) ** 2)), float(np.sum(np.abs(s) ** 2)))


def bit_errors(rx_bits, tx_bits) -> int:
    r = np.asarray(rx_bits).ravel()
    t = np.asarray(tx_bits).ravel()
    if r.size != t.size:
        raise ShapeError(f"bit sequences differ in length ({r.size} vs {t.size})")
    return int(np.count_nonzero(r.astype(bool) != t.astype(bool)))


def ber(rx_bits, tx_bits) -> float:
    n = np.asarray(tx_bits).size
    if n == 0:
        raise ShapeError("empty bit sequence")
    return bit_errors(rx_bits, tx_bits) / n


def peak_se(wcfg: WaveformConfig, order: int) -> float:
    return effective_se(0.0, wcfg, order)


def effective_se(ber_value: float, wcfg: WaveformConfig, order: int) -> float:
    """``(1 - BER) f_s log2(O) (N_d / N) / B_e`` in bit/s/Hz."""
    if not 0.0 <= ber_value <= 1.0:
        raise ConfigurationError(f"BER must lie in [0, 1], got {ber_value}")
    rate = (1.0 - ber_value) * wcfg.fs_hz * bits_per_symbol(order) * wcfg.n_data / wcfg.n_total
    return rate / wcfg.occupied_bandwidth_hz


@dataclass(frozen=True)
class PowerModel:
    n_usrp: int
    n_ps: int
    p_usrp_w: float = P_USRP_W
    p_ps_w: float = P_PS_W

    def __post_init__(self):
        if self.p_usrp_w <= 0 or self.p_ps_w <= 0:
            raise ConfigurationError("device powers must be positive")
        if self.n_usrp < 0 or self.n_ps < 0 or self.total_w <= 0:
            raise ConfigurationError("device counts must be non-negative with at least one device")

    @classmethod
    def for_architecture(cls, arch: ArchitectureConfig, **kwargs) -> "PowerModel":
        return cls(arch.n_usrp, arch.n_shifters, **kwargs)

    @property
    def total_w(self) -> float:
        return self.n_usrp * self.p_usrp_w + self.n_ps * self.p_ps_w


def energy_efficiency(se_e: float, pm: PowerModel) -> float:
    """Spectral efficiency per watt of hardware power."""
    return se_e / pm.total_w


@dataclass
class LinkCounts:
    """Additive per-user tallies; merging is a plain sum."""

    n_user: int
    err_energy: np.ndarray = None
    ref_energy: np.ndarray = None
    bit_errors: np.ndarray = None
    bits: np.ndarray = None
    symbols: np.ndarray = None
    frames: int = 0
    leakage: float = 0.0
    tx_power: float = 0.0

    def __post_init__(self):
        for name, dtype in (("err_energy", float), ("ref_energy", float),
                            ("bit_errors", np.int64), ("bits", np.int64), ("symbols", np.int64)):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(self.n_user, dtype=dtype))

    def add_user(self, u: int, rx_symbols, ref_symbols, rx_bits, tx_bits):
        r = np.asarray(rx_symbols).ravel()
        s = np.asarray(ref_symbols).ravel()
        self.err_energy[u] += float(np.sum(np.abs(r - s) ** 2))
        self.ref_energy[u] += float(np.sum(np.abs(s) ** 2))
        self.bit_errors[u] += bit_errors(rx_bits, tx_bits)
        self.bits[u] += np.asarray(tx_bits).size
        self.symbols[u] += s.size

    def merge(self, other: "LinkCounts") -> "LinkCounts":
        if other.n_user != self.n_user:
            raise ShapeError("cannot merge counts for different user counts")
        total = self.frames + other.frames
        return LinkCounts(
            self.n_user,
            self.err_energy + other.err_energy,
            self.ref_energy + other.ref_energy,
            self.bit_errors + other.bit_errors,
            self.bits + other.bits,
            self.symbols + other.symbols,
            total,
            max(self.leakage, other.leakage),
            (self.tx_power * self.frames + other.tx_power * other.frames) / total if total else 0.0,
        )


@dataclass(frozen=True)
class UserMetrics:
    user: int
    evm_db: float
    ber: float
    se_e: float
    eta: float
    bits: int
    symbols: int
    bit_errors: int = 0
    err_energy: float = 0.0
    ref_energy: float = 0.0


@dataclass(frozen=True)
class MetricsReport:
    """Per-user link metrics for one (architecture, waveform, order, SNR) point.

    ``leakage`` is the worst cross-user to own-stream power ratio of the
    composite channel-precoder product; ``tx_power`` the mean transmitted
    power per data sub-carrier after precoding. Neither is normalised away.
    """

    arch: str
    waveform: str
    alpha: float
    order: int
    snr_db: float
    seed: int
    frames: int
    users: tuple
    leakage: float = 0.0
    tx_power: float = 0.0
    beam_indices: tuple = field(default_factory=tuple)

    @classmethod
    def from_counts(cls, counts: LinkCounts, arch: ArchitectureConfig, wcfg: WaveformConfig,
                    order: int, snr_db: float, seed: int, beam_indices=()) -> "MetricsReport":
        pm = PowerModel.for_architecture(arch)
        users = []
        for u in range(counts.n_user):
            b = float(counts.bit_errors[u] / counts.bits[u]) if counts.bits[u] else 0.0
            se = effective_se(b, wcfg, order)
            users.append(UserMetrics(u, _evm_from_energy(counts.err_energy[u], counts.ref_energy[u]),
                                     b, se, energy_efficiency(se, pm),
                                     int(counts.bits[u]), int(counts.symbols[u]),
                                     int(counts.bit_errors[u]), float(counts.err_energy[u]),
                                     float(counts.ref_energy[u])))
        return cls(arch.name, wcfg.name, wcfg.alpha, order, snr_db, seed, counts.frames,
                   tuple(users), counts.leakage, counts.tx_power, tuple(beam_indices))

    @property
    def mean_evm_db(self) -> float:
        return float(np.mean([u.evm_db for u in self.users]))

    @property
    def mean_ber(self) -> float:
        return float(np.mean([u.ber for u in self.users]))

    def aggregate_evm_db(self) -> float:
        """EVM pooled over all users' symbols (energy-weighted, not dB-averaged)."""
        return _evm_from_energy(sum(u.err_energy for u in self.users),
                                sum(u.ref_energy for u in self.users))

    def aggregate_ber(self) -> float:
        bits = sum(u.bits for u in self.users)
        return sum(u.bit_errors for u in self.users) / bits if bits else 0.0

    def csv_rows(self):
        for u in self.users:
            yield {
                "arch": self.arch, "waveform": self.waveform, "alpha": f"{self.alpha:g}",
                "order": str(self.order), "snr_db": format_snr(self.snr_db), "user": str(u.user),
                "evm_db": f"{u.evm_db:.6f}", "ber": f"{u.ber:.6e}", "se_e": f"{u.se_e:.6f}",
                "eta": f"{u.eta:.6e}", "frames": str(self.frames), "seed": str(self.seed),
            }


def format_snr(snr_db: float) -> str:
    return "inf" if math.isinf(snr_db) else f"{snr_db:g}"
