"""Shared domain types: regional presets, hopping sequences, transmissions.

Conventions used throughout the package:

* OBW (channel) indices are 0-based, ``0 <= c < C``.
* Slot indices are 1-based, ``1 <= t <= T``, matching how start slots are
  reported.  Array code converts with ``t - 1``.
* Randomness comes from ``numpy.random.Generator(PCG64(SeedSequence(...)))``.
  PCG64 is numpy's default bit generator and is bit-reproducible across
  platforms for a given seed.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

__all__ = [
    "CodingRate",
    "RegionalPreset",
    "PRESETS",
    "preset",
    "HoppingSequence",
    "SequenceSet",
    "Transmission",
    "TransmissionSet",
    "make_rng",
    "generate_sequences",
    "InfeasibleUniquenessError",
    "UnknownPresetError",
    "SLOT_MS",
    "HEADER_MS",
]

SLOT_MS = 102.4
HEADER_MS = 233.0

# default experiment grid
DEFAULT_OBWS = 35
DEFAULT_SEQUENCES = 512
DEFAULT_MAX_LEN = 90


class InfeasibleUniquenessError(ValueError):
    """Requested more distinct sequences than the hop alphabet allows."""


class UnknownPresetError(KeyError):
    pass


def make_rng(*seed_words: int) -> np.random.Generator:
    """PCG64 generator seeded from one or more non-negative integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(seed_words))))


class CodingRate(enum.Enum):
    CR1_3 = "1/3"
    CR2_3 = "2/3"

    @property
    def threshold(self) -> float:
        """Fraction of fragments that must survive for the payload to decode."""
        return 1.0 / 3.0 if self is CodingRate.CR1_3 else 2.0 / 3.0

    @property
    def header_replicas(self) -> int:
        return 3 if self is CodingRate.CR1_3 else 2


@dataclass(frozen=True)
class RegionalPreset:
    name: str
    obw_per_grid: int
    grids: int
    obw_total: int
    coding_rate: CodingRate
    header_replicas: int
    slot_ms: float = SLOT_MS
    header_ms: float = HEADER_MS

    def __post_init__(self) -> None:
        if self.obw_total != self.grids * self.obw_per_grid:
            raise ValueError(f"{self.name}: obw_total != grids * obw_per_grid")
        if self.header_replicas != self.coding_rate.header_replicas:
            raise ValueError(f"{self.name}: replicas do not match coding rate")

    @property
    def config(self) -> str:
        """``"robust"`` or ``"fast"``."""
        return "robust" if self.coding_rate is CodingRate.CR1_3 else "fast"


def _preset(name: str, per_grid: int, grids: int, cr: CodingRate) -> RegionalPreset:
    return RegionalPreset(name, per_grid, grids, per_grid * grids, cr, cr.header_replicas)


PRESETS: dict[str, RegionalPreset] = {
    p.name: p
    for p in (
        _preset("EU_DR8", 35, 8, CodingRate.CR1_3),
        _preset("EU_DR9", 35, 8, CodingRate.CR2_3),
        _preset("EU_DR10", 86, 8, CodingRate.CR1_3),
        _preset("EU_DR11", 86, 8, CodingRate.CR2_3),
        _preset("US_DR5", 60, 52, CodingRate.CR1_3),
        _preset("US_DR6", 60, 52, CodingRate.CR2_3),
    )
}


def preset(name: str) -> RegionalPreset:
    """Look up a regional LR-FHSS data-rate preset, e.g. ``preset("EU_DR8")``."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; expected one of {sorted(PRESETS)}"
        ) from None


@dataclass(frozen=True)
class HoppingSequence:
    id: int
    hops: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.hops)


@dataclass(frozen=True, eq=False)
class SequenceSet:
    """The ``S`` known hopping sequences, stored as an ``(S, max_len)`` array.

    ``hops[s, k]`` is the OBW used by the ``k``-th fragment (0-based) of a
    frame sent with sequence ``s``.
    """

    hops: np.ndarray
    obw_count: int
    seed: int

    def __post_init__(self) -> None:
        hops = np.array(self.hops, dtype=np.int32, copy=True)
        if hops.ndim != 2 or hops.shape[0] < 1 or hops.shape[1] < 1:
            raise ValueError("hops must be a non-empty 2-D array")
        if hops.min() < 0 or hops.max() >= self.obw_count:
            raise ValueError("hop index outside [0, obw_count)")
        hops.setflags(write=False)
        object.__setattr__(self, "hops", hops)

    @property
    def count(self) -> int:
        return self.hops.shape[0]

    @property
    def max_len(self) -> int:
        return self.hops.shape[1]

    @property
    def sequences(self) -> list[HoppingSequence]:
        return [HoppingSequence(i, tuple(int(h) for h in row)) for i, row in enumerate(self.hops)]

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, s: int) -> HoppingSequence:
        return HoppingSequence(int(s), tuple(int(h) for h in self.hops[s]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SequenceSet):
            return NotImplemented
        return (
            self.obw_count == other.obw_count
            and self.seed == other.seed
            and np.array_equal(self.hops, other.hops)
        )

    def __hash__(self) -> int:
        return hash((self.obw_count, self.seed, self.hops.tobytes()))

    # -- text format -------------------------------------------------------
    # Line 1: "S C PMAX SEED"; then S lines of PMAX space-separated hops.

    def dumps(self) -> str:
        lines = [f"{self.count} {self.obw_count} {self.max_len} {self.seed}"]
        lines.extend(" ".join(str(int(h)) for h in row) for row in self.hops)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SequenceSet":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 4:
            raise ValueError("sequence file must start with 'S C PMAX SEED'")
        count, obw_count, max_len, seed = (int(x) for x in rows[0])
        body = rows[1:]
        if len(body) != count:
            raise ValueError(f"expected {count} sequences, found {len(body)}")
        if any(len(r) != max_len for r in body):
            raise ValueError(f"every sequence must have {max_len} hops")
        return cls(np.array(body, dtype=np.int32), obw_count, seed)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SequenceSet":
        with open(path, encoding="ascii") as fh:
            return cls.loads(fh.read())


def generate_sequences(
    count: int = DEFAULT_SEQUENCES,
    obw_count: int = DEFAULT_OBWS,
    max_len: int = DEFAULT_MAX_LEN,
    seed: int = 0,
) -> SequenceSet:
    """Draw ``count`` distinct hopping sequences with uniform i.i.d. hops.

    Rows that duplicate an earlier row are redrawn until all rows differ.
    Deterministic in ``(count, obw_count, max_len, seed)``.
    """
    if count < 1 or obw_count < 1 or max_len < 1:
        raise ValueError("count, obw_count and max_len must be >= 1")
    # compare in log space: obw_count**max_len overflows quickly
    if np.log(count) > max_len * np.log(obw_count) + 1e-12:
        raise InfeasibleUniquenessError(
            f"cannot draw {count} distinct sequences from {obw_count}**{max_len}"
        )
    rng = make_rng(seed)
    hops = rng.integers(0, obw_count, size=(count, max_len), dtype=np.int32)
    seen: set[bytes] = set()
    for i in range(count):
        row = hops[i].tobytes()
        while row in seen:
            hops[i] = rng.integers(0, obw_count, size=max_len, dtype=np.int32)
            row = hops[i].tobytes()
        seen.add(row)
    return SequenceSet(hops, obw_count, seed)


class Transmission(NamedTuple):
    """One frame: sequence id ``s``, 1-based start slot ``t``, fragment count ``p``."""

    s: int
    t: int
    p: int


@dataclass(frozen=True, eq=False)
class TransmissionSet:
    """Multiset of transmissions held as parallel integer arrays."""

    s: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    t: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    p: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self) -> None:
        arrays = []
        for a in (self.s, self.t, self.p):
            a = np.array(a, dtype=np.int64, copy=True).reshape(-1)
            a.setflags(write=False)
            arrays.append(a)
        if not (len(arrays[0]) == len(arrays[1]) == len(arrays[2])):
            raise ValueError("s, t and p must have equal length")
        for name, a in zip("stp", arrays):
            object.__setattr__(self, name, a)

    @classmethod
    def from_items(cls, items) -> "TransmissionSet":
        items = list(items)
        if not items:
            return cls()
        s, t, p = zip(*items)
        return cls(np.array(s), np.array(t), np.array(p))

    def __len__(self) -> int:
        return len(self.s)

    def __iter__(self) -> Iterator[Transmission]:
        for s, t, p in zip(self.s.tolist(), self.t.tolist(), self.p.tolist()):
            yield Transmission(s, t, p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransmissionSet):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip((self.s, self.t, self.p), (other.s, other.t, other.p)))

    def __add__(self, other: "TransmissionSet") -> "TransmissionSet":
        return TransmissionSet(
            np.concatenate([self.s, other.s]),
            np.concatenate([self.t, other.t]),
            np.concatenate([self.p, other.p]),
        )

    @property
    def items(self) -> list[Transmission]:
        return list(self)

    def pairs(self) -> set[tuple[int, int]]:
        """Distinct ``(s, t)`` pairs; duplicates collapse."""
        return set(zip(self.s.tolist(), self.t.tolist()))

    @property
    def total_fragments(self) -> int:
        return int(self.p.sum())
