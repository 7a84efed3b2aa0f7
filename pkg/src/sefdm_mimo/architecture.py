"""Transmitter architectures compared in the experiments."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigurationError


class ArchitectureKind(str, enum.Enum):
    FDP_I = "FDP_I"
    FDP_II = "FDP_II"
    HP = "HP"


# n_rf, n_tx, n_splitters, n_shifters
_TABLE = {
    ArchitectureKind.FDP_I: (6, 6, 0, 0),
    ArchitectureKind.FDP_II: (2, 2, 0, 0),
    ArchitectureKind.HP: (2, 6, 2, 6),
}


def parse_kind(value) -> ArchitectureKind:
    if isinstance(value, ArchitectureKind):
        return value
    key = str(value).strip().upper().replace("-", "_")
    try:
        return ArchitectureKind(key)
    except ValueError:
        raise ConfigurationError(f"unknown architecture {value!r}; "
                                 f"use one of {[k.value for k in ArchitectureKind]}") from None


@dataclass(frozen=True)
class ArchitectureConfig:
    kind: ArchitectureKind
    n_rf: int
    n_tx: int
    n_splitters: int
    n_shifters: int
    n_user: int = 2

    def __post_init__(self):
        if self.n_rf < self.n_user:
            raise ConfigurationError("need at least one RF chain per user")
        if self.kind is ArchitectureKind.HP:
            if self.n_tx != 3 * self.n_rf or self.n_shifters != self.n_tx:
                raise ConfigurationError("hybrid architecture needs 3 shifters/antennas per chain")
        elif self.n_tx != self.n_rf or self.n_shifters:
            raise ConfigurationError("fully digital architecture needs one antenna per chain")

    @classmethod
    def for_kind(cls, kind) -> "ArchitectureConfig":
        k = parse_kind(kind)
        return cls(k, *_TABLE[k])

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def is_hybrid(self) -> bool:
        return self.kind is ArchitectureKind.HP

    @property
    def antennas_per_chain(self) -> int:
        return self.n_tx // self.n_rf

    @property
    def n_usrp(self) -> int:
        return self.n_rf

    @property
    def splitter_gain(self) -> float:
        """Amplitude reaching each antenna behind an equal power split."""
        return 1.0 / math.sqrt(self.antennas_per_chain) if self.n_splitters else 1.0
