"""Headerless frame recovery from an observed occupancy matrix.

A candidate frame is a pair ``(s, t)``: sequence ``s`` starting at slot
``t``.  Its *window* is the ``P`` cells ``M[t+k-1][hops[s][k]]`` for
``k = 0..P-1``.  Every decoder here returns the candidates whose window
satisfies its acceptance rule.

ILP model
---------
One binary ``y_{t,s}`` per candidate, objective ``min sum y``.  Two
constraint forms are supported:

``"forcing"`` (default)
    ``y_{t,s} >= w_{t,s} - P + 1`` where ``w`` is the number of busy
    window cells.  The right side is positive only for a fully busy window,
    so the optimum is exactly the full-match set.
``"printed"``
    ``P * y_{t,s} >= w_{t,s}``.  Any busy cell forces ``y = 1``, so the
    optimum selects every window touching a busy cell.  Kept for
    comparison; it does not reproduce the heuristic's output.

Each constraint involves a single variable, so the optimum decomposes into
``y = max(0, ceil(rhs / coef))`` per variable; ``decode_exact`` evaluates
that closed form.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core import SequenceSet, Transmission
from .simulator import ObservedMatrix

__all__ = [
    "DecodedSet",
    "decode_greedy",
    "decode_partial",
    "decode_exact",
    "decode_online",
    "OnlineDecoder",
    "OutOfOrderColumnError",
    "InstanceTooLargeError",
    "ilp_constraints",
    "export_lp",
    "brute_force_ilp",
    "BRUTE_FORCE_LIMIT",
    "ILP_FORMS",
]

BRUTE_FORCE_LIMIT = 24
ILP_FORMS = ("forcing", "printed")


class OutOfOrderColumnError(ValueError):
    pass


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DecodedSet:
    """Set of decoded ``(s, t, P)`` frames, kept sorted by ``(t, s)``."""

    s: np.ndarray
    t: np.ndarray
    P: int

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=np.int64).reshape(-1)
        t = np.asarray(self.t, dtype=np.int64).reshape(-1)
        if len(s) != len(t):
            raise ValueError("s and t must have equal length")
        order = np.lexsort((s, t))
        s, t = s[order], t[order]
        if len(s) > 1 and np.any((np.diff(t) == 0) & (np.diff(s) == 0)):
            raise ValueError("duplicate (s, t) pair")
        s.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @classmethod
    def empty(cls, P: int) -> "DecodedSet":
        return cls(np.zeros(0, np.int64), np.zeros(0, np.int64), P)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], P: int) -> "DecodedSet":
        pairs = sorted(set(pairs))
        if not pairs:
            return cls.empty(P)
        s, t = zip(*pairs)
        return cls(np.array(s), np.array(t), P)

    def __len__(self) -> int:
        return len(self.s)

    def __iter__(self) -> Iterator[Transmission]:
        for s, t in zip(self.s.tolist(), self.t.tolist()):
            yield Transmission(s, t, self.P)

    def __contains__(self, item) -> bool:
        s, t = item[0], item[1]
        return bool(np.any((self.s == s) & (self.t == t)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecodedSet):
            return NotImplemented
        return self.P == other.P and np.array_equal(self.s, other.s) and np.array_equal(self.t, other.t)

    def __repr__(self) -> str:
        return f"DecodedSet(P={self.P}, n={len(self)})"

    @property
    def items(self) -> list[Transmission]:
        return list(self)

    @property
    def objective(self) -> int:
        return len(self)

    def pairs(self) -> set[tuple[int, int]]:
        return set(zip(self.s.tolist(), self.t.tolist()))

    def dumps(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("s", "t", "p"))
        for tr in self:
            w.writerow(tr)
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "DecodedSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["s", "t", "p"]:
            raise ValueError("decoded-set CSV must start with header 's,t,p'")
        body = [tuple(int(x) for x in r) for r in rows[1:] if r]
        ps = {r[2] for r in body}
        if len(ps) > 1:
            raise ValueError("all decoded frames must share one fragment count")
        if not body:
            raise ValueError("cannot infer P from an empty decoded-set CSV")
        return cls.from_pairs(((s, t) for s, t, _ in body), ps.pop())


def _check(M: ObservedMatrix, seqs: SequenceSet, P: int) -> int:
    if P < 1 or P > seqs.max_len:
        raise ValueError(f"P={P} must be in [1, {seqs.max_len}]")
    if seqs.obw_count > M.obws:
        raise ValueError(f"sequences use {seqs.obw_count} OBWs but M has {M.obws} columns")
    return M.slots - P + 1  # number of candidate start slots (may be <= 0)


# dense slab ANDs beat sparse probing while more than 1/_DENSE_RATIO of candidates live
_DENSE_RATIO = 8


def decode_greedy(M: ObservedMatrix, seqs: SequenceSet, P: int) -> DecodedSet:
    """All ``(s, t)`` whose ``P`` window cells are busy.

    Vectorised over slots and sequences.  While most candidates survive,
    whole ``(slot, sequence)`` slabs are ANDed hop by hop; once few remain,
    only the survivors are probed, so sparse matrices stop early.
    Worst case ``O(T*S*P)``.
    """
    n_t = _check(M, seqs, P)
    if n_t <= 0:
        return DecodedSet.empty(P)
    bits, hops = M.bits, seqs.hops
    alive = bits[:n_t][:, hops[:, 0]]  # (n_t, S)
    k = 1
    while k < P and np.count_nonzero(alive) * _DENSE_RATIO > alive.size:
        alive &= bits[k:k + n_t][:, hops[:, k]]
        k += 1
    ti, si = np.nonzero(alive)
    for k in range(k, P):
        if ti.size == 0:
            break
        keep = bits[ti + k, hops[si, k]]
        ti, si = ti[keep], si[keep]
    return DecodedSet(si, ti + 1, P)


def _window_sums(M: ObservedMatrix, seqs: SequenceSet, P: int) -> np.ndarray:
    """``w[t-1, s]`` = number of busy cells in the window of ``(s, t)``."""
    n_t = M.slots - P + 1
    w = np.zeros((max(n_t, 0), seqs.count), dtype=np.int32)
    if n_t <= 0:
        return w
    for k in range(P):
        w += M.bits[k:k + n_t][:, seqs.hops[:, k]]
    return w


def _min_busy(P: int, match_fraction: float) -> int:
    # small epsilon keeps ceil(0.9 * 10) at 9 despite float rounding
    return max(1, math.ceil(match_fraction * P - 1e-9))


def decode_partial(M: ObservedMatrix, seqs: SequenceSet, P: int, match_fraction: float = 1.0) -> DecodedSet:
    """Accept ``(s, t)`` when at least ``ceil(match_fraction * P)`` window cells are busy.

    Tolerates missed fragment detections.  ``match_fraction=1`` is
    identical to :func:`decode_greedy`.
    """
    if not 0.0 < match_fraction <= 1.0:
        raise ValueError("match_fraction must be in (0, 1]")
    n_t = _check(M, seqs, P)
    if n_t <= 0:
        return DecodedSet.empty(P)
    w = _window_sums(M, seqs, P)
    ti, si = np.nonzero(w >= _min_busy(P, match_fraction))
    return DecodedSet(si, ti + 1, P)


def ilp_constraints(M: ObservedMatrix, seqs: SequenceSet, P: int, form: str = "forcing"):
    """Per-variable constraint data ``coef * y[t, s] >= rhs``.

    Returns ``(coef, rhs)`` where ``coef`` is a scalar and ``rhs`` an
    integer array of shape ``(T-P+1, S)`` indexed by ``[t-1, s]``.
    """
    if form not in ILP_FORMS:
        raise ValueError(f"form must be one of {ILP_FORMS}")
    _check(M, seqs, P)
    w = _window_sums(M, seqs, P)
    if form == "forcing":
        return 1, w - (P - 1)
    return P, w


def decode_exact(M: ObservedMatrix, seqs: SequenceSet, P: int, form: str = "forcing") -> DecodedSet:
    """Optimal solution of the decoding ILP via its per-variable closed form."""
    coef, rhs = ilp_constraints(M, seqs, P, form)
    # smallest binary y with coef*y >= rhs; rhs <= coef always holds here
    y = np.maximum(0, -(-rhs // coef))
    if y.size and y.max() > 1:
        raise AssertionError("ILP infeasible over binary variables")
    ti, si = np.nonzero(y)
    return DecodedSet(si, ti + 1, P)


def _constraint_rows(M: ObservedMatrix, seqs: SequenceSet, P: int, form: str):
    """Constraints as ``(variable, coef, rhs)`` rows, built with plain loops."""
    bits = M.bits.tolist()
    hops = seqs.hops.tolist()
    rows = []
    for t in range(1, M.slots - P + 2):
        for s in range(seqs.count):
            busy = sum(bits[t + k - 1][hops[s][k]] for k in range(P))
            var = (t - 1) * seqs.count + s
            if form == "forcing":
                rows.append((var, 1, busy - P + 1))
            else:
                rows.append((var, P, busy))
    return rows


def brute_force_ilp(M: ObservedMatrix, seqs: SequenceSet, P: int, form: str = "forcing",
                    limit: int = BRUTE_FORCE_LIMIT) -> DecodedSet:
    """Minimum-objective feasible assignment by exhaustive enumeration.

    Each constraint is evaluated literally at ``y = 0`` and ``y = 1`` to
    find the values its variable may take; those verdicts are folded into
    two bit masks.  All ``2**n`` assignments (integers, bit ``i`` =
    variable ``i``) are then scanned and the feasible one with the fewest
    ones wins, ties going to the smallest integer.  Constraints are rebuilt
    with plain loops, independent of the vectorised window code.  Test
    oracle only.
    """
    if form not in ILP_FORMS:
        raise ValueError(f"form must be one of {ILP_FORMS}")
    _check(M, seqs, P)
    n = max(M.slots - P + 1, 0) * seqs.count
    if n > limit:
        raise InstanceTooLargeError(f"{n} variables exceeds enumeration bound {limit}")
    if n == 0:
        return DecodedSet.empty(P)
    must_one = must_zero = 0
    for var, coef, rhs in _constraint_rows(M, seqs, P, form):
        if not coef * 0 >= rhs:
            must_one |= 1 << var
        if not coef * 1 >= rhs:
            must_zero |= 1 << var
    if must_one & must_zero:
        raise AssertionError("no feasible assignment; constraints are inconsistent")
    m1, m0 = np.uint32(must_one), np.uint32(must_zero)
    best_cost, best = n + 1, None
    chunk = 1 << min(n, 22)
    for lo in range(0, 1 << n, chunk):
        a = np.arange(lo, lo + chunk, dtype=np.uint32)
        cand = a[((a & m1) == m1) & ((a & m0) == 0)]
        if cand.size == 0:
            continue
        cost = np.bitwise_count(cand)
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best_cost, best = int(cost[i]), int(cand[i])
    sel = np.array([i for i in range(n) if best >> i & 1], dtype=np.int64)
    return DecodedSet(sel % seqs.count, sel // seqs.count + 1, P)


def export_lp(M: ObservedMatrix, seqs: SequenceSet, P: int, path: str | os.PathLike,
              form: str = "forcing") -> None:
    """Write the decoding ILP in CPLEX LP text format.

    Variables are named ``y_<t>_<s>`` (1-based slot, 0-based sequence).
    Constraints with a non-positive right-hand side are implied by the
    binary bounds and are left out.
    """
    coef, rhs = ilp_constraints(M, seqs, P, form)
    n_t, S = rhs.shape
    names = [f"y_{t + 1}_{s}" for t in range(n_t) for s in range(S)]
    out = [
        "\\ LRFHSS headerless decoding ILP v1",
        f"\\ form={form} T={M.slots} C={M.obws} S={S} P={P}",
        "Minimize",
    ]
    if names:
        terms = [f"{'' if i == 0 else '+ '}{v}" for i, v in enumerate(names)]
        out.append(" obj: " + " ".join(terms[:8]))
        for i in range(8, len(terms), 8):
            out.append("   " + " ".join(terms[i:i + 8]))
    else:
        out.append(" obj: 0")
    out.append("Subject To")
    lhs = "" if coef == 1 else f"{coef} "
    for ti, si in zip(*np.nonzero(rhs > 0)):
        out.append(f" c_{ti + 1}_{si}: {lhs}y_{ti + 1}_{si} >= {int(rhs[ti, si])}")
    out.append("Binary")
    out.extend(f" {v}" for v in names)
    out.append("End")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out) + "\n")


class OnlineDecoder:
    """Sliding-window decoder fed one matrix column per slot.

    Holds the last ``P`` columns.  After column ``t >= P`` arrives it
    reports every sequence whose pattern fills the window, i.e. frames
    starting at ``t - P + 1``.  ``O(S*P)`` time and memory per slot.
    """

    def __init__(self, seqs: SequenceSet, P: int, C: int | None = None) -> None:
        if P < 1 or P > seqs.max_len:
            raise ValueError(f"P={P} must be in [1, {seqs.max_len}]")
        self.P = P
        self.C = seqs.obw_count if C is None else C
        if seqs.obw_count > self.C:
            raise ValueError("matrix narrower than the sequences' OBW range")
        self._hops = np.ascontiguousarray(seqs.hops[:, :P])
        self._ring = np.zeros((P, self.C), dtype=bool)
        self._k = np.arange(P)
        self.slot = 0  # last slot received (1-based)

    def push(self, column, t: int | None = None) -> list[Transmission]:
        col = np.asarray(column, dtype=bool).reshape(-1)
        if col.shape[0] != self.C:
            raise ValueError(f"column has {col.shape[0]} cells, expected {self.C}")
        if t is not None and t != self.slot + 1:
            raise OutOfOrderColumnError(f"expected slot {self.slot + 1}, got {t}")
        self.slot += 1
        self._ring[(self.slot - 1) % self.P] = col
        if self.slot < self.P:
            return []
        # row of hop k (k-th fragment) inside the ring buffer
        start = self.slot - self.P  # 0-based slot of the oldest column
        rows = (start + self._k) % self.P
        match = self._ring[rows[None, :], self._hops].all(axis=1)
        t0 = start + 1
        return [Transmission(int(s), t0, self.P) for s in np.flatnonzero(match)]


def decode_online(columns: Iterable, seqs: SequenceSet, P: int, C: int | None = None) -> DecodedSet:
    """Replay ``columns`` (one boolean row per slot, in order) through :class:`OnlineDecoder`.

    Items may also be ``(t, column)`` pairs, in which case slot order is
    checked.
    """
    dec = None
    found: list[Transmission] = []
    for item in columns:
        if isinstance(item, tuple) and len(item) == 2 and np.isscalar(item[0]):
            t, col = item
        else:
            t, col = None, item
        if dec is None:
            dec = OnlineDecoder(seqs, P, C if C is not None else len(np.asarray(col).reshape(-1)))
        found.extend(dec.push(col, t))
    if not found:
        return DecodedSet.empty(P)
    return DecodedSet(np.array([f.s for f in found]), np.array([f.t for f in found]), P)
