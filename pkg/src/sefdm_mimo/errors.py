"""Exception types raised across the simulator."""


class SimulationError(Exception):
    """Base class for every error raised by :mod:`sefdm_mimo`."""


class ConfigurationError(SimulationError, ValueError):
    """Invalid configuration value (bad alpha, unsupported order, ...)."""


class ShapeError(SimulationError, ValueError):
    """Array dimensions or lengths do not match what an operation needs."""


class IllConditionedError(SimulationError, ArithmeticError):
    """A matrix is too ill-conditioned to be inverted meaningfully."""


class RankDeficiencyError(IllConditionedError):
    """The Gram matrix of a channel is singular (users not separable)."""


class DegeneratePilotError(SimulationError, ValueError):
    """A pilot value is too small to divide by."""


class GeometryError(SimulationError, ValueError):
    """Antenna/user geometry is inconsistent (zero range, bad spacing)."""


class UnderrunError(SimulationError, ValueError):
    """Not enough payload bits to fill a frame."""
