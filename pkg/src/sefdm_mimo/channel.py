"""Geometric line-of-sight multiuser channel with AWGN.

The base-station array lies on the x axis, centred at the origin, with
users in the half-plane y > 0. Path gains use exact spherical ranges,
``h(u, i) = exp(-j 2 pi r_ui / lambda) / r_ui``, so the curvature of the
wavefront across the aperture is kept at short range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ShapeError
from .precoding import ChannelSource, EffectiveChannel

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 2.4e9


def ula_positions(n_tx: int, wavelength_m: float, spacing_wavelengths: float = 0.5) -> np.ndarray:
    x = (np.arange(n_tx) - (n_tx - 1) / 2.0) * spacing_wavelengths * wavelength_m
    return np.column_stack([x, np.zeros(n_tx)])


def default_user_positions(range_m: float = 2.0, separation_m: float = 1.1) -> np.ndarray:
    """Two users ``separation_m`` apart, each ``range_m`` from the array centre."""
    half = separation_m / 2.0
    if not range_m > half:
        raise GeometryError(f"range {range_m} m cannot fit users {separation_m} m apart")
    y = math.sqrt(range_m ** 2 - half ** 2)
    return np.array([[-half, y], [half, y]])


def user_positions_at_angles(angles_deg, range_m: float = 2.0) -> np.ndarray:
    """Users at the given angles from broadside (positive toward +x)."""
    t = np.deg2rad(np.asarray(angles_deg, dtype=float))
    return np.column_stack([range_m * np.sin(t), range_m * np.cos(t)])


@dataclass(frozen=True)
class Geometry:
    tx_positions: np.ndarray
    user_positions: np.ndarray
    carrier_hz: float = DEFAULT_CARRIER_HZ

    def __post_init__(self):
        tx = np.atleast_2d(np.asarray(self.tx_positions, dtype=float))
        users = np.atleast_2d(np.asarray(self.user_positions, dtype=float))
        object.__setattr__(self, "tx_positions", tx)
        object.__setattr__(self, "user_positions", users)
        if tx.shape[1] != 2 or users.shape[1] != 2:
            raise GeometryError("positions must be (x, y) pairs")
        if self.carrier_hz <= 0:
            raise GeometryError("carrier frequency must be positive")
        if tx.shape[0] > 1:
            gaps = np.linalg.norm(np.diff(tx, axis=0), axis=1)
            if np.max(np.abs(gaps - self.wavelength_m / 2.0)) > 1e-9:
                raise GeometryError("adjacent antennas must be half a wavelength apart")
        if np.min(self.ranges()) <= 0:
            raise GeometryError("a user coincides with a transmit antenna")

    @classmethod
    def ula(cls, n_tx: int, user_positions, carrier_hz: float = DEFAULT_CARRIER_HZ) -> "Geometry":
        lam = SPEED_OF_LIGHT / carrier_hz
        return cls(ula_positions(n_tx, lam), user_positions, carrier_hz)

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def n_tx(self) -> int:
        return self.tx_positions.shape[0]

    @property
    def n_user(self) -> int:
        return self.user_positions.shape[0]

    def ranges(self) -> np.ndarray:
        """``(n_user, n_tx)`` Euclidean distances in metres."""
        d = self.user_positions[:, None, :] - self.tx_positions[None, :, :]
        return np.linalg.norm(d, axis=-1)


@dataclass(frozen=True)
class FullChannel:
    entries: np.ndarray
    model: str = "los"

    def scaled(self, factor: float) -> "FullChannel":
        return FullChannel(self.entries * factor, self.model)


def los_channel(geom: Geometry, seed=None, k_factor: float | None = None) -> FullChannel:
    """Line-of-sight channel, optionally with a Rician scattered component.

    ``k_factor`` is the linear LOS-to-scatter power ratio; ``None`` or
    ``inf`` gives pure LOS and ignores ``seed``.
    """
    r = geom.ranges()
    if np.min(r) <= 0:
        raise GeometryError("zero range between a user and an antenna")
    h = np.exp(-2j * np.pi * r / geom.wavelength_m) / r
    if k_factor is None or np.isinf(k_factor):
        return FullChannel(h, "los")
    if k_factor < 0:
        raise GeometryError("Rician K-factor must be non-negative")
    rng = np.random.default_rng(seed)
    power = np.abs(h) ** 2
    scatter = np.sqrt(power / 2.0) * (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape))
    h = math.sqrt(k_factor / (k_factor + 1.0)) * h + math.sqrt(1.0 / (k_factor + 1.0)) * scatter
    return FullChannel(h, f"rician(K={k_factor:g})")


def reference_scale(user_positions, carrier_hz: float = DEFAULT_CARRIER_HZ) -> float:
    """Factor giving the two-antenna, unit-weight reference link unit mean power gain."""
    ref = los_channel(Geometry.ula(2, user_positions, carrier_hz)).entries
    return 1.0 / math.sqrt(float(np.mean(np.abs(ref) ** 2)))


def _chain_slices(n_tx: int, weights) -> list[slice]:
    sizes = [np.asarray(w).size for w in weights]
    if sum(sizes) != n_tx:
        raise ShapeError(f"analogue weights cover {sum(sizes)} antennas, channel has {n_tx}")
    edges = np.cumsum([0] + sizes)
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def analog_matrix(weights, n_tx: int, gain: float = 1.0) -> np.ndarray:
    """``(n_tx, n_rf)`` map from RF chains to antennas (sub-connected)."""
    a = np.zeros((n_tx, len(weights)), dtype=complex)
    for t, sl in enumerate(_chain_slices(n_tx, weights)):
        a[sl, t] = gain * np.asarray(weights[t], dtype=complex)
    return a


def effective_channel(H_full: FullChannel, weights, gain: float = 1.0) -> EffectiveChannel:
    """``H_eff(u, t) = gain * sum_{i in chain t} H_full(u, i) w_{t, i}``.

    Chain ``t`` drives the ``t``-th consecutive block of antennas, in the
    order given by ``weights``.
    """
    h = np.asarray(H_full.entries)
    return EffectiveChannel(h @ analog_matrix(weights, h.shape[1], gain), ChannelSource.GENIE)


def noise_variance(signal_power, snr_db: float):
    if np.isposinf(snr_db):
        return np.zeros_like(np.asarray(signal_power, dtype=float))
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    return np.asarray(signal_power, dtype=float) / 10.0 ** (snr_db / 10.0)


def transmit(tx_streams, H_full: FullChannel, snr_db: float, rng=None, signal_power=None) -> np.ndarray:
    """Pass per-antenna sample blocks through the channel and add AWGN.

    Parameters
    ----------
    tx_streams : array, shape (n_tx, n_samples)
    H_full : FullChannel
    snr_db : float
        ``+inf`` disables the noise entirely.
    rng : numpy Generator or seed
    signal_power : float or array of n_user, optional
        Reference signal power per user. Defaults to the measured mean power
        of each user's noiseless received samples. Noise variance per time
        sample is ``signal_power / 10**(snr_db / 10)``.
    """
    tx = np.asarray(tx_streams)
    h = np.asarray(H_full.entries)
    if tx.ndim != 2 or tx.shape[0] != h.shape[1]:
        raise ShapeError(f"expected ({h.shape[1]}, n_samples) antenna streams, got {tx.shape}")
    rx = h @ tx
    if np.isposinf(snr_db):
        return rx
    if signal_power is None:
        signal_power = np.mean(np.abs(rx) ** 2, axis=1)
    var = np.broadcast_to(noise_variance(signal_power, snr_db), (h.shape[0],))
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    z = gen.standard_normal((2,) + rx.shape)
    return rx + np.sqrt(var / 2.0)[:, None] * (z[0] + 1j * z[1])
