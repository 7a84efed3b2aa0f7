"""Experiment orchestration: link runs, sweeps, config files and the CLI."""

from ..architecture import ArchitectureConfig, ArchitectureKind
from .config import load_config, parse_config
from .link import LinkSetup, beam_sweep, run_frame, run_link
from .sweep import (METRICS, SweepResult, SweepSpec, curve_filename, emit_plot_data,
                    point_seed, read_results, run_sweep)

__all__ = [
    "ArchitectureConfig", "ArchitectureKind", "LinkSetup", "METRICS", "SweepResult", "SweepSpec",
    "beam_sweep", "curve_filename", "emit_plot_data", "load_config", "parse_config",
    "point_seed", "read_results", "run_frame", "run_link", "run_sweep",
]
