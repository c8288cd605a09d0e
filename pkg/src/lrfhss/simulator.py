"""Random slotted traffic and the observed occupancy matrix it produces.

Only payload fragments are rendered; header replicas never appear in the
matrix.  A real gateway would also see header energy, so occupancy here is
slightly lower than on air.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .core import SequenceSet, TransmissionSet, make_rng

__all__ = [
    "ObservedMatrix",
    "CollisionMap",
    "InvalidHorizonError",
    "generate_traffic",
    "observe",
    "occupancy",
]

_MATRIX_MAGIC = "LRFHSS-M1"


class InvalidHorizonError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CollisionMap:
    """``counts[t-1, c]``: number of fragments on OBW ``c`` during slot ``t``."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int32, copy=True)
        if counts.ndim != 2:
            raise ValueError("counts must be 2-D")
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CollisionMap):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def to_matrix(self) -> "ObservedMatrix":
        return ObservedMatrix(self.counts >= 1)

    def dumps_cells(self) -> str:
        """CSV of occupied cells ``t,c,count`` with 1-based ``t``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t", "c", "count"))
        for ti, ci in zip(*np.nonzero(self.counts)):
            w.writerow((int(ti) + 1, int(ci), int(self.counts[ti, ci])))
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """Boolean ``(T, C)`` busy/free matrix; row ``t-1`` is slot ``t``."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise ValueError("bits must be 2-D")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def empty(cls, T_slots: int, C: int) -> "ObservedMatrix":
        return cls(np.zeros((T_slots, C), dtype=bool))

    @property
    def slots(self) -> int:
        return self.bits.shape[0]

    @property
    def obws(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObservedMatrix):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def columns(self):
        """Yield ``(t, column)`` per slot in order; ``t`` is 1-based."""
        for i in range(self.slots):
            yield i + 1, self.bits[i]

    # Text format: "LRFHSS-M1 T C" then T rows of C '0'/'1' characters.
    def dumps(self) -> str:
        rows = ["".join("1" if b else "0" for b in row) for row in self.bits]
        return f"{_MATRIX_MAGIC} {self.slots} {self.obws}\n" + "".join(r + "\n" for r in rows)

    @classmethod
    def loads(cls, text: str) -> "ObservedMatrix":
        lines = text.splitlines()
        head = lines[0].split() if lines else []
        if len(head) != 3 or head[0] != _MATRIX_MAGIC:
            raise ValueError(f"matrix file must start with '{_MATRIX_MAGIC} T C'")
        T_slots, C = int(head[1]), int(head[2])
        body = lines[1:1 + T_slots]
        if len(body) != T_slots or any(len(r) != C or set(r) - {"0", "1"} for r in body):
            raise ValueError(f"expected {T_slots} rows of {C} '0'/'1' characters")
        bits = np.array([[ch == "1" for ch in r] for r in body], dtype=bool).reshape(T_slots, C)
        return cls(bits)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ObservedMatrix":
        with open(path, encoding="ascii") as fh:
            return cls.loads(fh.read())


def generate_traffic(F: int, seqs: SequenceSet, T_slots: int, P: int, seed: int | np.random.Generator) -> TransmissionSet:
    """``F`` frames with uniform sequence and uniform start slot in ``[1, T-P+1]``."""
    if P < 1 or P > seqs.max_len:
        raise ValueError(f"P={P} must be in [1, {seqs.max_len}]")
    if T_slots < P:
        raise InvalidHorizonError(f"T_slots={T_slots} shorter than a frame of P={P}")
    if F < 0:
        raise ValueError("F must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    s = rng.integers(0, seqs.count, size=F)
    t = rng.integers(1, T_slots - P + 2, size=F)
    return TransmissionSet(s, t, np.full(F, P))


def observe(tx: TransmissionSet, seqs: SequenceSet, T_slots: int, C: int) -> tuple[ObservedMatrix, CollisionMap]:
    """Render every fragment of ``tx`` into ``(M, collision map)``; no fragment is lost."""
    counts = np.zeros((T_slots, C), dtype=np.int32)
    if len(tx):
        if seqs.obw_count > C:
            raise IndexError(f"sequences use {seqs.obw_count} OBWs but matrix has {C}")
        if tx.p.max() > seqs.max_len or tx.p.min() < 1:
            raise IndexError("fragment count outside sequence length")
        if tx.s.min() < 0 or tx.s.max() >= seqs.count:
            raise IndexError("sequence id out of range")
        # expand (s, t, p) into one row per fragment
        reps = tx.p
        frame = np.repeat(np.arange(len(tx)), reps)
        k = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        rows = tx.t[frame] - 1 + k
        cols = seqs.hops[tx.s[frame], k]
        if rows.min() < 0 or rows.max() >= T_slots:
            raise IndexError("transmission extends outside [1, T_slots]")
        np.add.at(counts, (rows, cols), 1)
    cmap = CollisionMap(counts)
    return cmap.to_matrix(), cmap


def occupancy(M: ObservedMatrix) -> float:
    """Fraction of busy cells."""
    if M.bits.size == 0:
        return 0.0
    return float(np.count_nonzero(M.bits)) / M.bits.size
