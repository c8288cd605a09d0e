"""Detection (TP/FP/FN/F1) and extraction scoring.

Detection compares distinct ``(s, t)`` pairs, so a transmission sent twice
with identical sequence and start slot counts once.  Extraction is per
transmitted frame and keeps multiplicity; duplicated frames overlap
themselves on every cell and are therefore never extracted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analytic import AnalyticScenario, p_frame
from .core import SequenceSet, TransmissionSet
from .decoder import DecodedSet
from .simulator import CollisionMap

__all__ = [
    "DetectionReport",
    "ExtractionReport",
    "score_detection",
    "score_extraction",
    "headerfull_baseline",
    "f1_score",
    "CONFIG_THRESHOLDS",
]

CONFIG_THRESHOLDS = {"robust": 1.0 / 3.0, "fast": 2.0 / 3.0}


def f1_score(tp: int, fp: int, fn: int) -> float:
    den = 2 * tp + fp + fn
    return 1.0 if den == 0 else 2 * tp / den


@dataclass(frozen=True)
class DetectionReport:
    tp: int
    fp: int
    fn: int
    f1: float
    occupancy: float = float("nan")
    total_fragments: int = 0


@dataclass(frozen=True)
class ExtractionReport:
    headerless_rate: float
    headerfull_rate: float
    config: str


def _keys(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    return (np.asarray(t, dtype=np.int64) << 32) | np.asarray(s, dtype=np.int64)


def score_detection(T: TransmissionSet, T_hat: DecodedSet, occupancy: float = float("nan")) -> DetectionReport:
    truth = np.unique(_keys(T.s, T.t))
    found = np.unique(_keys(T_hat.s, T_hat.t))
    tp = int(np.isin(truth, found, assume_unique=True).sum())
    fn = len(truth) - tp
    fp = len(found) - tp
    return DetectionReport(tp, fp, fn, f1_score(tp, fp, fn), occupancy, T.total_fragments)


def _min_clean(P: int, threshold: float) -> int:
    return math.ceil(Fraction(threshold).limit_denominator(1000) * P)


def score_extraction(T: TransmissionSet, T_hat: DecodedSet, collision_map: CollisionMap,
                     seqs: SequenceSet, threshold: float) -> float:
    """Fraction of transmitted frames that are detected and have enough clean fragments.

    A fragment is clean when its cell holds exactly one fragment.
    """
    if len(T) == 0:
        return 0.0
    counts = collision_map.counts
    detected = np.isin(_keys(T.s, T.t), _keys(T_hat.s, T_hat.t))
    extracted = 0
    for p in np.unique(T.p[detected]):
        idx = np.flatnonzero(detected & (T.p == p))
        k = np.arange(p)
        cells = counts[T.t[idx, None] - 1 + k, seqs.hops[T.s[idx, None], k]]
        extracted += int(np.count_nonzero((cells == 1).sum(axis=1) >= _min_clean(int(p), threshold)))
    return extracted / len(T)


def headerfull_baseline(scenario: AnalyticScenario) -> float:
    """Legacy (header-dependent) frame reception probability from the analytic model."""
    return p_frame(scenario)
