"""SNR sweeps over architectures, waveforms and modulation orders."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..architecture import ArchitectureKind, parse_kind
from ..channel import default_user_positions, user_positions_at_angles
from ..errors import ConfigurationError
from ..metrics import CSV_FIELDS
from ..qam import SUPPORTED_ORDERS
from ..waveform import WaveformConfig
from .link import run_link

log = logging.getLogger(__name__)

TRUNCATION_MARKER = "# TRUNCATED"
DEFAULT_SNR_LIST = tuple(float(s) for s in range(0, 31, 3))

#: CLI metric names to CSV columns
METRICS = {"evm": "evm_db", "ber": "ber", "se": "se_e", "ee": "eta"}

_WAVEFORM_IDS = {"ofdm": 0, "sefdm": 1}


@dataclass(frozen=True)
class SweepSpec:
    snr_list: tuple = DEFAULT_SNR_LIST
    waveforms: tuple = ("ofdm", "sefdm")
    orders: tuple = (4, 16)
    architectures: tuple = (ArchitectureKind.FDP_I, ArchitectureKind.FDP_II, ArchitectureKind.HP)
    frames: int = 200
    seed: int = 0
    alpha: float = 0.9
    range_m: float = 2.0
    separation_m: float = 1.1
    user_angles_deg: tuple | None = None
    carrier_hz: float = 2.4e9
    symbols_per_slot: int = 7
    per_subcarrier: bool = False
    genie: bool = False
    workers: int = 1
    wcfg: WaveformConfig = field(default_factory=WaveformConfig)

    def __post_init__(self):
        if self.frames < 1:
            raise ConfigurationError("frames must be >= 1")
        if not self.snr_list:
            raise ConfigurationError("snr_list must not be empty")
        for w in self.waveforms:
            if w not in _WAVEFORM_IDS:
                raise ConfigurationError(f"unknown waveform {w!r}; use ofdm or sefdm")
        for o in self.orders:
            if o not in SUPPORTED_ORDERS:
                raise ConfigurationError(f"unsupported order {o}")
        if not 0 < self.alpha < 1:
            raise ConfigurationError("the SEFDM alpha must lie strictly between 0 and 1")
        object.__setattr__(self, "architectures", tuple(parse_kind(a) for a in self.architectures))
        object.__setattr__(self, "snr_list", tuple(float(s) for s in self.snr_list))

    def waveform_config(self, waveform: str) -> WaveformConfig:
        return self.wcfg.with_alpha(1.0 if waveform == "ofdm" else self.alpha)

    def user_positions(self) -> np.ndarray:
        if self.user_angles_deg is not None:
            return user_positions_at_angles(self.user_angles_deg, self.range_m)
        return default_user_positions(self.range_m, self.separation_m)

    @property
    def n_points(self) -> int:
        return len(self.architectures) * len(self.waveforms) * len(self.orders) * len(self.snr_list)


def point_seed(master: int, waveform: str, alpha: float, order: int, snr_db: float) -> int:
    """Seed for one sweep point, derived from the master seed by a fixed counter.

    The architecture is deliberately not part of the key, so all architectures
    at a point see the same bits and noise. Adding or removing points never
    changes the seed of any other point.
    """
    noiseless = math.isinf(snr_db)
    # spawn_key entries must be non-negative: SNR in milli-dB, two's complement
    snr_key = 0 if noiseless else int(round(snr_db * 1000)) & 0xFFFFFFFF
    key = (_WAVEFORM_IDS[waveform], int(round(alpha * 1e6)), int(order), int(noiseless), snr_key)
    return int(np.random.SeedSequence(master, spawn_key=key).generate_state(1)[0])


@dataclass
class SweepResult:
    path: Path
    rows: int
    reports: list


def run_sweep(spec: SweepSpec, out_path) -> SweepResult:
    """Run every point of ``spec`` and write one CSV row per user.

    Rows are flushed as each point completes. If a point fails, a line
    starting with ``# TRUNCATED`` is appended before the error propagates.
    """
    out_path = Path(out_path)
    users = spec.user_positions()
    reports, rows = [], 0
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        fh.flush()
        try:
            for kind in spec.architectures:
                for waveform in spec.waveforms:
                    wcfg = spec.waveform_config(waveform)
                    for order in spec.orders:
                        for snr in spec.snr_list:
                            seed = point_seed(spec.seed, waveform, wcfg.alpha, order, snr)
                            rep = run_link(kind, wcfg, order, snr, seed, spec.frames,
                                           user_positions=users, genie=spec.genie,
                                           per_subcarrier=spec.per_subcarrier,
                                           workers=spec.workers, carrier_hz=spec.carrier_hz,
                                           symbols_per_slot=spec.symbols_per_slot)
                            for row in rep.csv_rows():
                                writer.writerow(row)
                                rows += 1
                            fh.flush()
                            reports.append(rep)
                            log.info("%s %s %dQAM %s dB: BER %.3g", kind.value, waveform, order,
                                     snr, rep.aggregate_ber())
        except BaseException as exc:
            fh.write(f"{TRUNCATION_MARKER} after {rows} rows: {type(exc).__name__}: {exc}\n")
            fh.flush()
            raise
    return SweepResult(out_path, rows, reports)


def read_results(csv_path) -> list[dict]:
    """Rows of a results CSV; comment lines (including truncation markers) are skipped."""
    with open(csv_path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def curve_filename(metric: str, arch: str, waveform: str, order) -> str:
    """``<metric>_<arch>_<waveform>_<order>qam.dat``, e.g. ``ber_HP_sefdm_16qam.dat``."""
    return f"{metric}_{arch}_{waveform}_{order}qam.dat"


def _snr_sort_key(s: str) -> float:
    return math.inf if s == "inf" else float(s)


def emit_plot_data(csv_path, metric: str, out_dir) -> list[Path]:
    """Write one two-column (SNR, metric) file per architecture/waveform/order.

    Values are averaged over users. Files are whitespace-delimited with a
    ``#`` header line.
    """
    if metric in METRICS:
        column = METRICS[metric]
    elif metric in METRICS.values():
        column = metric
        metric = next(k for k, v in METRICS.items() if v == column)
    else:
        raise ConfigurationError(f"unknown metric {metric!r}; use one of {sorted(METRICS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = defaultdict(lambda: defaultdict(list))
    for row in read_results(csv_path):
        curves[(row["arch"], row["waveform"], row["order"])][row["snr_db"]].append(float(row[column]))
    written = []
    for (arch, waveform, order), points in sorted(curves.items()):
        path = out_dir / curve_filename(metric, arch, waveform, order)
        with open(path, "w") as fh:
            fh.write(f"# snr_db {column}\n")
            for snr in sorted(points, key=_snr_sort_key):
                fh.write(f"{snr} {np.mean(points[snr]):.6e}\n")
        written.append(path)
    return written
