"""SEFDM/OFDM symbol modulation, correlation matrix and waveform precoding.

All sub-carrier and time-sample indices are 0-based. Shifting both
indices to a 1-based origin only multiplies every modulation-matrix entry
by a phase that depends on ``k`` and ``n`` separately; those factors cancel
between :func:`modulate` and :func:`demodulate`, so they are not
compensated anywhere.

The modulation matrix is applied as an explicit ``N x N`` product. At the
sizes used here (``N = 128``) that is cheap and it keeps every result
bit-comparable with a direct evaluation of the defining sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, IllConditionedError, ShapeError

#: Largest singular-value ratio accepted before a zero-forcing inverse is refused.
MAX_CONDITION = 1e8


@dataclass(frozen=True)
class WaveformConfig:
    """Signal parameters of one multicarrier symbol.

    Defaults describe the SEFDM signal used in the experiments:
    128-point symbol, 12 data sub-carriers centred between 58 null
    sub-carriers on each side, 10 cyclic-prefix samples, 1.92 MHz sampling
    and 15 kHz sub-carrier bandwidth.
    """

    n_total: int = 128
    n_data: int = 12
    alpha: float = 0.9
    cp_len: int = 10
    fs_hz: float = 1.92e6
    subcarrier_bw_hz: float = 15e3

    def __post_init__(self):
        if self.n_total <= 0:
            raise ConfigurationError(f"n_total must be positive, got {self.n_total}")
        if not 0 < self.n_data <= self.n_total:
            raise ConfigurationError(
                f"n_data must be in 1..{self.n_total}, got {self.n_data}")
        if not (np.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0):
            raise ConfigurationError(f"alpha must satisfy 0 < alpha <= 1, got {self.alpha}")
        if self.cp_len < 0:
            raise ConfigurationError(f"cp_len must be >= 0, got {self.cp_len}")
        if self.fs_hz <= 0 or self.subcarrier_bw_hz <= 0:
            raise ConfigurationError("fs_hz and subcarrier_bw_hz must be positive")

    @property
    def is_ofdm(self) -> bool:
        return self.alpha == 1.0

    @property
    def name(self) -> str:
        return "ofdm" if self.is_ofdm else "sefdm"

    @property
    def n_guard(self) -> int:
        """Null sub-carriers below the data band (the band is centred)."""
        return (self.n_total - self.n_data) // 2

    @property
    def data_indices(self) -> np.ndarray:
        return np.arange(self.n_guard, self.n_guard + self.n_data)

    @property
    def occupied_bandwidth_hz(self) -> float:
        # alpha = 1 gives n_data * subcarrier_bw_hz, as for OFDM
        return self.n_data * self.subcarrier_bw_hz * self.alpha

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.subcarrier_bw_hz * self.alpha

    @property
    def symbol_len(self) -> int:
        """Samples per symbol including the cyclic prefix."""
        return self.n_total + self.cp_len

    def with_alpha(self, alpha: float) -> "WaveformConfig":
        return WaveformConfig(self.n_total, self.n_data, alpha, self.cp_len,
                              self.fs_hz, self.subcarrier_bw_hz)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModulationMatrix:
    """``N x N`` matrix with entry ``(k, n) = exp(j 2 pi n k alpha / N) / sqrt(N)``."""

    entries: np.ndarray
    alpha: float
    n_total: int


@dataclass(frozen=True)
class CorrelationMatrix:
    """Sub-carrier correlation matrix ``C`` such that ``F^H F S = C S``.

    ``indices`` records which sub-carriers the (possibly band-restricted)
    matrix covers.
    """

    entries: np.ndarray
    alpha: float
    n_total: int
    indices: np.ndarray
    condition: float = field(default=np.nan)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@lru_cache(maxsize=32)
def _modulation_entries(n: int, alpha: float) -> np.ndarray:
    k = np.arange(n)
    phase = 2.0 * np.pi * alpha * np.outer(k, k) / n
    return _readonly(np.exp(1j * phase) / np.sqrt(n))


def build_modulation_matrix(cfg: WaveformConfig) -> ModulationMatrix:
    return ModulationMatrix(_modulation_entries(cfg.n_total, float(cfg.alpha)),
                            cfg.alpha, cfg.n_total)


def _check_last_axis(x: np.ndarray, n: int, what: str) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[-1] != n:
        raise ShapeError(f"{what} must have last dimension {n}, got shape {x.shape}")
    return x


def modulate(symbols, F: ModulationMatrix) -> np.ndarray:
    """Time samples ``X = F S``; batched over leading axes of ``symbols``."""
    s = _check_last_axis(symbols, F.n_total, "symbol vector")
    return s @ F.entries.T


def demodulate(samples, F: ModulationMatrix) -> np.ndarray:
    """Matched-filter output ``R = F^H Y`` (cyclic prefix already removed)."""
    y = _check_last_axis(samples, F.n_total, "received symbol")
    return y @ F.entries.conj()


def correlation_entry(m, n, alpha: float, n_total: int):
    """Closed-form correlation between sub-carriers ``m`` and ``n``.

    Evaluates ``(1 - e^{j2 pi alpha (m-n)}) / (N (1 - e^{j2 pi alpha (m-n)/N}))``
    with the diagonal defined as exactly 1. This is the geometric-series value of
    ``(1/N) sum_{k=0}^{N-1} exp(j2 pi m k alpha/N) exp(-j2 pi n k alpha/N)``.
    Broadcasts over array arguments.
    """
    d = np.asarray(m, dtype=float) - np.asarray(n, dtype=float)
    num = 1.0 - np.exp(2j * np.pi * alpha * d)
    den = n_total * (1.0 - np.exp(2j * np.pi * alpha * d / n_total))
    same = d == 0
    # alpha * d / N never hits an integer for 0 < alpha <= 1 and |d| < N
    with np.errstate(invalid="ignore", divide="ignore"):
        value = np.where(same, 1.0 + 0j, num / np.where(same, 1.0, den))
    return value


def build_correlation_matrix(cfg: WaveformConfig, indices=None) -> CorrelationMatrix:
    """Correlation matrix of ``cfg``, optionally restricted to ``indices``.

    Entry ``(m, n)`` is :func:`correlation_entry` ``(n, m)``, the conjugate of
    the textbook orientation, which is what ``F^H F`` produces for the
    modulation matrix built here.
    """
    idx = np.arange(cfg.n_total) if indices is None else np.asarray(indices, dtype=int)
    if idx.ndim != 1 or idx.size == 0 or idx.min() < 0 or idx.max() >= cfg.n_total:
        raise ShapeError(f"sub-carrier indices must lie in 0..{cfg.n_total - 1}")
    if cfg.is_ofdm:
        c = np.eye(idx.size, dtype=complex)
    else:
        c = correlation_entry(idx[None, :], idx[:, None], cfg.alpha, cfg.n_total)
        np.fill_diagonal(c, 1.0)
    sv = np.linalg.svd(c, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    return CorrelationMatrix(_readonly(c), cfg.alpha, cfg.n_total, _readonly(idx.copy()), cond)


def build_band_correlation(cfg: WaveformConfig) -> CorrelationMatrix:
    """Correlation matrix over the data sub-carriers only."""
    return build_correlation_matrix(cfg, cfg.data_indices)


def build_waveform_precoder(C: CorrelationMatrix, max_condition: float = MAX_CONDITION) -> np.ndarray:
    """Zero-forcing waveform precoder ``W_p = C^H (C C^H)^{-1}``.

    Raises
    ------
    IllConditionedError
        If the singular-value ratio of ``C`` exceeds ``max_condition``.
    """
    if not C.condition <= max_condition:
        raise IllConditionedError(
            f"correlation matrix for alpha={C.alpha}, N={C.n_total} "
            f"({C.size} sub-carriers) has condition number {C.condition:.3g} "
            f"> {max_condition:.3g}")
    c = C.entries
    if np.array_equal(c, np.eye(C.size)):
        return np.eye(C.size, dtype=complex)
    gram = c @ c.conj().T
    # W^H = (C C^H)^{-1} C because the Gram matrix is Hermitian
    return np.linalg.solve(gram, c).conj().T


def power_expansion(C: CorrelationMatrix, W_p: np.ndarray) -> float:
    """Mean received energy per sub-carrier of a precoded unit-energy symbol.

    ``trace(W_p^H C W_p) / K`` for i.i.d. unit-energy inputs; 1 for OFDM.
    """
    return float(np.real(np.trace(W_p.conj().T @ C.entries @ W_p))) / C.size
