"""Closed-form reception model for slotted LR-FHSS traffic with headers.

All durations are in milliseconds and slot ceilings use a 102 ms slot.
Header reception needs at least one surviving replica; payload reception
needs at least ``ceil(threshold * P)`` collision-free fragments.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

__all__ = [
    "AnalyticScenario",
    "ongoing_count",
    "free_obw",
    "coll",
    "p_header",
    "p_payload",
    "p_frame",
    "frame_breakdown",
    "analytic_rows",
    "write_analytic_csv",
    "ANALYTIC_COLUMNS",
]

HEADER_MS = 233
SLOT_MS = 102

THRESHOLDS = {3: 1.0 / 3.0, 2: 2.0 / 3.0}
CONFIG_REPLICAS = {"robust": 3, "fast": 2}


def _min_fragments(P: int, threshold: float) -> int:
    # Fraction avoids ceil(0.6666...*30) == 21 style float noise
    return math.ceil(Fraction(threshold).limit_denominator(1000) * P)


@dataclass(frozen=True)
class AnalyticScenario:
    C: int
    T_slots: int
    P: int
    n_tx: int
    replicas: int = 3
    cr_threshold: float = 1.0 / 3.0
    header_ms: float = HEADER_MS
    slot_ms: float = SLOT_MS

    def __post_init__(self) -> None:
        if self.replicas not in THRESHOLDS:
            raise ValueError("replicas must be 2 or 3")
        if not math.isclose(self.cr_threshold, THRESHOLDS[self.replicas]):
            raise ValueError("3 replicas pair with threshold 1/3, 2 replicas with 2/3")
        if self.C < 1 or self.T_slots < 1 or self.P < 1 or self.n_tx < 0:
            raise ValueError("C, T_slots, P must be positive and n_tx non-negative")

    @classmethod
    def for_config(cls, config: str, C: int, T_slots: int, P: int, n_tx: int) -> "AnalyticScenario":
        """Build the ``"robust"`` (3 replicas, CR 1/3) or ``"fast"`` (2, CR 2/3) scenario."""
        replicas = CONFIG_REPLICAS[config]
        return cls(C, T_slots, P, n_tx, replicas, THRESHOLDS[replicas])

    @property
    def config(self) -> str:
        return "robust" if self.replicas == 3 else "fast"


def ongoing_count(n_tx: float, P: int, T_slots: int, replicas: int = 3,
                  header_ms: float = HEADER_MS, slot_ms: float = SLOT_MS) -> float:
    """Mean number of transmissions on air in one slot."""
    return (replicas * header_ms + P * slot_ms) * n_tx / (slot_ms * T_slots)


def free_obw(C: int, n_og: float) -> float:
    """Expected number of OBWs left unused by ``n_og`` uniformly placed fragments."""
    return C * (1.0 - 1.0 / C) ** n_og


def coll(d_ms: float, C: int, n_og: float, slot_ms: float = SLOT_MS) -> float:
    """Probability that an emission of ``d_ms`` milliseconds is hit at least once."""
    slots = math.ceil(d_ms / slot_ms)
    return 1.0 - (free_obw(C, n_og) / C) ** slots


def p_header(coll_233: float, replicas: int = 3) -> float:
    return 1.0 - coll_233 ** replicas


def p_payload(P: int, coll_102: float, cr_threshold: float = 1.0 / 3.0) -> float:
    """Binomial upper tail: at least ``ceil(cr_threshold * P)`` of ``P`` fragments survive.

    Terms are summed in log space so large ``P`` neither under- nor overflows.
    """
    k_min = _min_fragments(P, cr_threshold)
    if k_min <= 0:
        return 1.0
    if coll_102 <= 0.0:
        return 1.0
    if coll_102 >= 1.0:
        return 0.0
    log_q = math.log1p(-coll_102)  # survival
    log_c = math.log(coll_102)
    lg_p1 = math.lgamma(P + 1)
    logs = [
        lg_p1 - math.lgamma(i + 1) - math.lgamma(P - i + 1) + i * log_q + (P - i) * log_c
        for i in range(k_min, P + 1)
    ]
    top = max(logs)
    total = math.exp(top) * math.fsum(math.exp(v - top) for v in logs)
    return min(1.0, max(0.0, total))


def frame_breakdown(sc: AnalyticScenario) -> tuple[float, float, float]:
    """``(p_hdr, p_pld, p_frame)`` for one scenario."""
    n_og = ongoing_count(sc.n_tx, sc.P, sc.T_slots, sc.replicas, sc.header_ms, sc.slot_ms)
    c_hdr = coll(sc.header_ms, sc.C, n_og, sc.slot_ms)
    c_frag = coll(sc.slot_ms, sc.C, n_og, sc.slot_ms)
    ph = p_header(c_hdr, sc.replicas)
    pp = p_payload(sc.P, c_frag, sc.cr_threshold)
    return ph, pp, ph * pp


def p_frame(sc: AnalyticScenario) -> float:
    return frame_breakdown(sc)[2]


ANALYTIC_COLUMNS = ("n_tx", "P", "config", "p_hdr", "p_pld", "p_frame")


def analytic_rows(n_tx_values: Iterable[int], P_values: Iterable[int],
                  configs: Iterable[str] = ("fast", "robust"),
                  C: int = 35, T_slots: int = 1000) -> list[dict]:
    rows = []
    n_tx_values = list(n_tx_values)
    for config in configs:
        for P in P_values:
            for n in n_tx_values:
                sc = AnalyticScenario.for_config(config, C, T_slots, P, n)
                ph, pp, pf = frame_breakdown(sc)
                rows.append(dict(n_tx=n, P=P, config=config, p_hdr=ph, p_pld=pp, p_frame=pf))
    return rows


def write_analytic_csv(path: str | os.PathLike, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ANALYTIC_COLUMNS)
        for r in rows:
            w.writerow([r["n_tx"], r["P"], r["config"], repr(float(r["p_hdr"])),
                        repr(float(r["p_pld"])), repr(float(r["p_frame"]))])
