"""Frame layout: staggered pilots, guard bands and cyclic prefix.

A frame is 20 slots of ``symbols_per_slot`` symbols. Slot 0 is overhead:
RF chain ``t`` sends its pilot symbol alone at symbol position ``t`` and the
rest of the slot is silent. Slots 1-19 carry one data stream per user, all
streams on the same time/frequency cells.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .architecture import ArchitectureConfig
from .errors import ConfigurationError, ShapeError, UnderrunError
from .qam import bits_per_symbol, qam_demap, qam_map
from .waveform import WaveformConfig

#: Unit-magnitude 4QAM corner used on every data sub-carrier of a pilot symbol.
PILOT_VALUE = complex(1.0, 1.0) / np.sqrt(2.0)

SLOTS_PER_FRAME = 20


@dataclass(frozen=True)
class FrameConfig:
    slots_per_frame: int = SLOTS_PER_FRAME
    overhead_slots: int = 1
    symbols_per_slot: int = 7
    pilot_slots_needed: int = 2

    def __post_init__(self):
        if self.slots_per_frame != SLOTS_PER_FRAME:
            raise ConfigurationError(f"frames have {SLOTS_PER_FRAME} slots")
        if self.symbols_per_slot < 1 or not 0 < self.overhead_slots < self.slots_per_frame:
            raise ConfigurationError("invalid slot layout")
        if self.pilot_slots_needed > self.overhead_slots * self.symbols_per_slot:
            raise ConfigurationError(
                f"{self.pilot_slots_needed} staggered pilots do not fit in "
                f"{self.overhead_slots * self.symbols_per_slot} overhead symbols")

    @classmethod
    def for_architecture(cls, arch: ArchitectureConfig, symbols_per_slot: int = 7) -> "FrameConfig":
        return cls(symbols_per_slot=symbols_per_slot, pilot_slots_needed=arch.n_rf)

    @property
    def n_symbols(self) -> int:
        return self.slots_per_frame * self.symbols_per_slot

    @property
    def n_overhead_symbols(self) -> int:
        return self.overhead_slots * self.symbols_per_slot

    @property
    def n_data_symbols(self) -> int:
        return self.n_symbols - self.n_overhead_symbols


@dataclass(frozen=True)
class Frame:
    """Frequency-domain content of one frame, guard bands included.

    ``pilots`` is per RF chain, ``data`` per user stream (before digital
    precoding). Both are ``(streams, n_symbols, n_total)``.
    """

    pilots: np.ndarray
    data: np.ndarray
    pilot_map: np.ndarray
    data_map: np.ndarray
    order: int
    config: FrameConfig

    @property
    def pilot_symbol_count(self) -> int:
        return int(np.count_nonzero(self.pilot_map.any(axis=0)))


def map_guard_bands(data_symbols, wcfg: WaveformConfig) -> np.ndarray:
    """Place ``n_data`` values in the centre of an ``n_total`` vector (last axis)."""
    x = np.asarray(data_symbols)
    if x.ndim == 0 or x.shape[-1] != wcfg.n_data:
        raise ShapeError(f"expected {wcfg.n_data} data symbols, got shape {x.shape}")
    out = np.zeros(x.shape[:-1] + (wcfg.n_total,), dtype=complex)
    out[..., wcfg.n_guard:wcfg.n_guard + wcfg.n_data] = x
    return out


def extract_data_band(symbols, wcfg: WaveformConfig) -> np.ndarray:
    x = np.asarray(symbols)
    if x.ndim == 0 or x.shape[-1] != wcfg.n_total:
        raise ShapeError(f"expected {wcfg.n_total} sub-carriers, got shape {x.shape}")
    return x[..., wcfg.n_guard:wcfg.n_guard + wcfg.n_data]


def add_cyclic_prefix(x, cp_len: int) -> np.ndarray:
    x = np.asarray(x)
    if cp_len < 0 or cp_len > x.shape[-1]:
        raise ConfigurationError(f"cyclic prefix of {cp_len} samples does not fit {x.shape[-1]}")
    if cp_len == 0:
        return x.copy()
    return np.concatenate([x[..., -cp_len:], x], axis=-1)


def remove_cyclic_prefix(y, cp_len: int) -> np.ndarray:
    y = np.asarray(y)
    if cp_len < 0 or cp_len > y.shape[-1] // 2:
        raise ConfigurationError(f"cyclic prefix of {cp_len} samples does not fit {y.shape[-1]}")
    return y[..., cp_len:].copy()


def bits_per_frame(wcfg: WaveformConfig, order: int, config: FrameConfig) -> int:
    """Payload bits carried by each user's stream in one frame."""
    return config.n_data_symbols * wcfg.n_data * bits_per_symbol(order)


def build_frame(data_bits: Sequence, arch: ArchitectureConfig, wcfg: WaveformConfig, order: int,
                pilot: complex = PILOT_VALUE, config: FrameConfig | None = None) -> Frame:
    cfg = config or FrameConfig.for_architecture(arch)
    if cfg.pilot_slots_needed != arch.n_rf:
        raise ConfigurationError("frame config pilot count does not match the architecture")
    if len(data_bits) != arch.n_user:
        raise ShapeError(f"expected bits for {arch.n_user} users, got {len(data_bits)}")
    need = bits_per_frame(wcfg, order, cfg)
    n_ov = cfg.n_overhead_symbols

    data = np.zeros((arch.n_user, cfg.n_symbols, wcfg.n_total), dtype=complex)
    for u, bits in enumerate(data_bits):
        b = np.asarray(bits).ravel()
        if b.size < need:
            raise UnderrunError(f"user {u}: {b.size} bits supplied, frame needs {need}")
        if b.size > need:
            raise ShapeError(f"user {u}: {b.size} bits supplied, frame holds exactly {need}")
        sym = qam_map(b, order).reshape(cfg.n_data_symbols, wcfg.n_data)
        data[u, n_ov:] = map_guard_bands(sym, wcfg)

    pilots = np.zeros((arch.n_rf, cfg.n_symbols, wcfg.n_total), dtype=complex)
    pilot_map = np.zeros((arch.n_rf, cfg.n_symbols), dtype=bool)
    pilot_row = map_guard_bands(np.full(wcfg.n_data, pilot), wcfg)
    for t in range(arch.n_rf):
        pilots[t, t] = pilot_row
        pilot_map[t, t] = True
    data_map = np.zeros(cfg.n_symbols, dtype=bool)
    data_map[n_ov:] = True
    return Frame(pilots, data, pilot_map, data_map, order, cfg)


def data_block(frame: Frame, wcfg: WaveformConfig) -> np.ndarray:
    """``(n_user, n_data_symbols, n_data)`` constellation symbols."""
    return extract_data_band(frame.data[:, frame.data_map], wcfg)


def parse_frame(frame: Frame, wcfg: WaveformConfig) -> list[np.ndarray]:
    """Recover each user's payload bits from the data region."""
    return [qam_demap(s, frame.order) for s in data_block(frame, wcfg)]


# Binary sample dump: little-endian header then each chain's samples as
# interleaved float32 I/Q, chain after chain.
DUMP_MAGIC = b"SFDM"
DUMP_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_sample_dump(path, samples) -> Path:
    """Write ``(n_chains, n_samples)`` complex baseband to ``path``."""
    x = np.atleast_2d(np.asarray(samples, dtype=np.complex64))
    if x.ndim != 2:
        raise ShapeError("samples must be (n_chains, n_samples)")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, x.shape[0], x.shape[1]))
        iq = np.empty(x.shape + (2,), dtype="<f4")
        iq[..., 0] = x.real
        iq[..., 1] = x.imag
        fh.write(iq.tobytes())
    return path


def read_sample_dump(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, version, n_chains, n_samples = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != DUMP_MAGIC or version != DUMP_VERSION:
            raise ShapeError(f"{path}: not a version-{DUMP_VERSION} sample dump")
        iq = np.frombuffer(fh.read(), dtype="<f4")
    if iq.size != n_chains * n_samples * 2:
        raise ShapeError(f"{path}: truncated sample dump")
    iq = iq.reshape(n_chains, n_samples, 2)
    return iq[..., 0] + 1j * iq[..., 1]
