"""Gray-mapped square QAM with unit average symbol energy."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, ShapeError

SUPPORTED_ORDERS = (4, 16)


def bits_per_symbol(order: int) -> int:
    if order not in SUPPORTED_ORDERS:
        raise ConfigurationError(f"unsupported QAM order {order}; use one of {SUPPORTED_ORDERS}")
    return int(np.log2(order))


@lru_cache(maxsize=None)
def _axis_levels(order: int):
    """Per-axis amplitude for each Gray-coded bit group, already normalized."""
    m = int(np.sqrt(order))
    k = bits_per_symbol(order) // 2
    # level index i (0..m-1, left to right) carries the Gray code i ^ (i >> 1)
    levels = np.empty(m)
    for i in range(m):
        levels[i ^ (i >> 1)] = 2 * i - (m - 1)
    scale = np.sqrt(2.0 * (m * m - 1) / 3.0)
    return levels / scale, k, scale


def constellation(order: int) -> np.ndarray:
    """All points, indexed by the integer value of their bit label (MSB first)."""
    n = bits_per_symbol(order)
    labels = (np.arange(order)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return qam_map(labels.ravel(), order)


def _group_values(bits: np.ndarray, k: int) -> np.ndarray:
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits @ weights


def qam_map(bits, order: int) -> np.ndarray:
    """Map a flat bit sequence to complex symbols.

    The first half of each symbol's bits selects the in-phase level and the
    second half the quadrature level.
    """
    n = bits_per_symbol(order)
    b = np.asarray(bits).astype(np.int64).ravel()
    if b.size % n:
        raise ShapeError(f"bit count {b.size} is not a multiple of {n}")
    levels, k, _ = _axis_levels(order)
    groups = b.reshape(-1, n)
    i = levels[_group_values(groups[:, :k], k)]
    q = levels[_group_values(groups[:, k:], k)]
    return i + 1j * q


def _axis_decide(x: np.ndarray, order: int) -> np.ndarray:
    levels, k, scale = _axis_levels(order)
    m = levels.size
    # nearest level index along the axis, then back to its Gray label
    pos = np.clip(np.rint((x * scale + (m - 1)) / 2.0), 0, m - 1).astype(np.int64)
    label = pos ^ (pos >> 1)
    return (label[:, None] >> np.arange(k - 1, -1, -1)) & 1


def qam_demap(symbols, order: int) -> np.ndarray:
    """Hard nearest-neighbour decision back to a flat bit array (``uint8``)."""
    s = np.asarray(symbols, dtype=complex).ravel()
    bi = _axis_decide(s.real, order)
    bq = _axis_decide(s.imag, order)
    return np.concatenate([bi, bq], axis=1).ravel().astype(np.uint8)
