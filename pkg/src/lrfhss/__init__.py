"""Headerless LR-FHSS frame recovery.

Simulate slotted frequency-hopping traffic, observe the busy/free channel
matrix, and recover ``(sequence, start slot)`` pairs without headers.
"""

from .analytic import (
    AnalyticScenario,
    coll,
    frame_breakdown,
    free_obw,
    ongoing_count,
    p_frame,
    p_header,
    p_payload,
)
from .core import (
    PRESETS,
    CodingRate,
    HoppingSequence,
    RegionalPreset,
    SequenceSet,
    Transmission,
    TransmissionSet,
    generate_sequences,
    make_rng,
    preset,
)
from .decoder import (
    DecodedSet,
    OnlineDecoder,
    brute_force_ilp,
    decode_exact,
    decode_greedy,
    decode_online,
    decode_partial,
    export_lp,
    ilp_constraints,
)
from .harness import ExperimentConfig, RunRecord, benchmark, emit_csv, emit_plots, run_sweep
from .metrics import DetectionReport, ExtractionReport, headerfull_baseline, score_detection, score_extraction
from .simulator import CollisionMap, ObservedMatrix, generate_traffic, observe, occupancy

__version__ = "0.1.0"
