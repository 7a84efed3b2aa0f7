"""Link-level simulator for hybrid-precoded multiuser SEFDM/OFDM downlinks."""

from .architecture import ArchitectureConfig, ArchitectureKind
from .beamforming import DEFAULT_CODEBOOK, BeamPattern, Codebook
from .channel import FullChannel, Geometry
from .errors import (ConfigurationError, DegeneratePilotError, GeometryError,
                     IllConditionedError, RankDeficiencyError, ShapeError,
                     SimulationError, UnderrunError)
from .framing import Frame, FrameConfig
from .metrics import MetricsReport, PowerModel
from .precoding import DigitalPrecoder, EffectiveChannel
from .waveform import CorrelationMatrix, ModulationMatrix, WaveformConfig

__version__ = "0.1.0"

__all__ = [
    "ArchitectureConfig", "ArchitectureKind", "BeamPattern", "Codebook", "ConfigurationError",
    "CorrelationMatrix", "DEFAULT_CODEBOOK", "DegeneratePilotError", "DigitalPrecoder",
    "EffectiveChannel", "Frame", "FrameConfig", "FullChannel", "Geometry", "GeometryError",
    "IllConditionedError", "MetricsReport", "ModulationMatrix", "PowerModel",
    "RankDeficiencyError", "ShapeError", "SimulationError", "UnderrunError", "WaveformConfig",
]
