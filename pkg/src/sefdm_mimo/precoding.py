"""Staggered-pilot channel estimation and zero-forcing digital precoding."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePilotError, RankDeficiencyError, ShapeError
from .waveform import MAX_CONDITION

PILOT_FLOOR = 1e-12


class ChannelSource(enum.Enum):
    ESTIMATED = "estimated"
    GENIE = "genie"


@dataclass(frozen=True)
class EffectiveChannel:
    """Users x RF-chains channel after analogue beamforming.

    ``entries`` is ``(n_user, n_rf)`` for a flat channel or
    ``(n_subcarrier, n_user, n_rf)`` when estimated per sub-carrier.
    """

    entries: np.ndarray
    source: ChannelSource = ChannelSource.ESTIMATED

    @property
    def per_subcarrier(self) -> bool:
        return self.entries.ndim == 3

    @property
    def n_user(self) -> int:
        return self.entries.shape[-2]

    @property
    def n_rf(self) -> int:
        return self.entries.shape[-1]


@dataclass(frozen=True)
class DigitalPrecoder:
    """``(n_rf, n_user)`` matrix, or ``(n_subcarrier, n_rf, n_user)``."""

    entries: np.ndarray

    @property
    def per_subcarrier(self) -> bool:
        return self.entries.ndim == 3


def estimate_channel(rx_pilots, pilots, per_subcarrier: bool = False) -> EffectiveChannel:
    """Element-wise least-squares estimate ``h(u, t) = y(u, t) / p(t)``.

    Parameters
    ----------
    rx_pilots : array, shape (n_user, n_rf, n_subcarrier)
        Demodulated pilot symbol seen by user ``u`` in the time slot where only
        chain ``t`` was transmitting.
    pilots : array, shape (n_rf, n_subcarrier) or (n_subcarrier,)
        Transmitted pilot values.
    per_subcarrier : bool
        Return one matrix per sub-carrier instead of the sub-carrier average.
    """
    y = np.asarray(rx_pilots, dtype=complex)
    if y.ndim != 3:
        raise ShapeError(f"rx_pilots must be (n_user, n_rf, n_subcarrier), got {y.shape}")
    p = np.asarray(pilots, dtype=complex)
    try:
        if p.ndim not in (1, 2):
            raise ValueError
        p = np.broadcast_to(p, y.shape[1:])
    except ValueError:
        raise ShapeError(f"pilots of shape {p.shape} do not match rx_pilots {y.shape}") from None
    if np.min(np.abs(p)) < PILOT_FLOOR:
        raise DegeneratePilotError(f"pilot magnitude below {PILOT_FLOOR:g}")
    h = y / p[None, :, :]
    if per_subcarrier:
        return EffectiveChannel(np.moveaxis(h, -1, 0).copy(), ChannelSource.ESTIMATED)
    return EffectiveChannel(h.mean(axis=-1), ChannelSource.ESTIMATED)


def _worst_pair(h: np.ndarray):
    """User pair whose channel rows are most collinear."""
    norms = np.linalg.norm(h, axis=1)
    best, pair = -1.0, (0, 1)
    for a in range(h.shape[0]):
        for b in range(a + 1, h.shape[0]):
            denom = norms[a] * norms[b]
            rho = 1.0 if denom == 0 else abs(np.vdot(h[a], h[b])) / denom
            if rho > best:
                best, pair = rho, (a, b)
    return pair


def build_digital_precoder(H: EffectiveChannel, max_condition: float = MAX_CONDITION) -> DigitalPrecoder:
    """Right pseudo-inverse ``D = H^H (H H^H)^{-1}``.

    Raises
    ------
    RankDeficiencyError
        When ``H H^H`` has singular-value ratio above ``max_condition``; the
        message names the most collinear user pair.
    """
    h = np.asarray(H.entries, dtype=complex)
    stack = h if h.ndim == 3 else h[None]
    if stack.shape[1] > stack.shape[2]:
        raise RankDeficiencyError(
            f"{stack.shape[1]} users cannot be separated with {stack.shape[2]} RF chains")
    out = np.empty((stack.shape[0], stack.shape[2], stack.shape[1]), dtype=complex)
    for k, hk in enumerate(stack):
        gram = hk @ hk.conj().T
        sv = np.linalg.svd(gram, compute_uv=False)
        if not sv[-1] > 0 or sv[0] / sv[-1] > max_condition:
            a, b = _worst_pair(hk)
            raise RankDeficiencyError(
                f"channel Gram matrix is singular (cond {sv[0] / sv[-1] if sv[-1] else np.inf:.3g}); "
                f"users {a} and {b} are not separable")
        # D^H = (H H^H)^{-1} H since the Gram matrix is Hermitian
        out[k] = np.linalg.solve(gram, hk).conj().T
    return DigitalPrecoder(out if h.ndim == 3 else out[0])


def apply_digital_precoding(D: DigitalPrecoder, streams) -> np.ndarray:
    """Mix per-user streams into per-chain streams, ``X_bar = D X_tilde``.

    ``streams`` has shape ``(n_user, ..., n_subcarrier)``; the result has
    shape ``(n_rf, ..., n_subcarrier)``. A per-sub-carrier precoder is applied
    independently on every sub-carrier.
    """
    x = np.asarray(streams)
    d = D.entries
    if x.shape[0] != d.shape[-1]:
        raise ShapeError(f"precoder expects {d.shape[-1]} streams, got {x.shape[0]}")
    if not D.per_subcarrier:
        return np.tensordot(d, x, axes=(1, 0))
    if x.shape[-1] != d.shape[0]:
        raise ShapeError(f"precoder covers {d.shape[0]} sub-carriers, streams have {x.shape[-1]}")
    return np.einsum("krv,v...k->r...k", d, x)
