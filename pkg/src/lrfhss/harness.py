"""Parameter sweeps, CSV output and timing for the headerless decoders.

Every ``(F, P, run)`` triple gets its own seed derived from
``(base_seed, F, P, run)`` with :class:`numpy.random.SeedSequence`, so a
single run can be re-created without replaying the sweep.  A fresh
sequence set and fresh traffic are drawn per run.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import logging
import math
import os
import platform
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .analytic import AnalyticScenario
from .core import generate_sequences, make_rng, preset
from .decoder import decode_exact, decode_greedy, decode_online, decode_partial
from .metrics import CONFIG_THRESHOLDS, headerfull_baseline, score_detection, score_extraction
from .simulator import generate_traffic, observe, occupancy

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "derive_seed",
    "run_one",
    "run_sweep",
    "aggregate",
    "emit_csv",
    "read_csv",
    "emit_plots",
    "benchmark",
    "BenchmarkResult",
    "CSV_COLUMNS",
    "TIMING_COLUMNS",
    "DECODERS",
    "parse_int_list",
]

DECODERS = ("greedy", "online", "exact")


def parse_int_list(text: str) -> list[int]:
    """``"500:3300:100"`` (inclusive stop) or ``"10,30,50"`` -> list of ints."""
    out: list[int] = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        if ":" in part:
            bits = [int(x) for x in part.split(":")]
            start, stop = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            if step <= 0:
                raise ValueError(f"range step must be positive: {part!r}")
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(part))
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    C: int = 35
    T_slots: int = 1000
    S: int = 512
    P_max: int = 90
    frame_range: tuple[int, ...] = tuple(range(500, 3301, 100))
    fragment_values: tuple[int, ...] = (10, 30, 50, 70, 90)
    runs_per_step: int = 10
    base_seed: int = 0
    decoder: str = "greedy"
    match_fraction: float = 1.0
    thresholds: tuple[tuple[str, float], ...] = tuple(CONFIG_THRESHOLDS.items())
    output_dir: str = "results"
    workers: int = 1
    plots: bool = False
    preset: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame_range", tuple(int(f) for f in self.frame_range))
        object.__setattr__(self, "fragment_values", tuple(int(p) for p in self.fragment_values))
        object.__setattr__(self, "thresholds", tuple((str(k), float(v)) for k, v in dict(self.thresholds).items()))
        if self.preset is not None:
            preset(self.preset)  # validates the name
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if min(self.C, self.T_slots, self.S, self.P_max, self.runs_per_step) < 1:
            raise ValueError("C, T_slots, S, P_max and runs_per_step must be >= 1")
        if any(f < 0 for f in self.frame_range):
            raise ValueError("frame counts must be non-negative")
        if any(p < 1 or p > self.P_max or p > self.T_slots for p in self.fragment_values):
            raise ValueError("fragment counts must lie in [1, min(P_max, T_slots)]")
        if not 0.0 < self.match_fraction <= 1.0:
            raise ValueError("match_fraction must be in (0, 1]")
        if self.decoder != "greedy" and self.match_fraction != 1.0:
            raise ValueError("match_fraction < 1 is only supported by the greedy decoder")

    @property
    def steps(self) -> list[tuple[int, int]]:
        return [(F, P) for F in self.frame_range for P in self.fragment_values]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    # INI file layout:
    #   [model]  obws, slots, sequences, max_len, preset
    #   [sweep]  frames, fragments, runs, seed, decoder, match_fraction, workers
    #   [output] dir, plots
    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
        kw: dict = {}
        m = cp["model"] if cp.has_section("model") else {}
        s = cp["sweep"] if cp.has_section("sweep") else {}
        o = cp["output"] if cp.has_section("output") else {}
        if "preset" in m:
            kw["preset"] = m["preset"]
            kw["C"] = preset(m["preset"]).obw_per_grid
        for key, name in (("obws", "C"), ("slots", "T_slots"), ("sequences", "S"), ("max_len", "P_max")):
            if key in m:
                kw[name] = int(m[key])
        if "frames" in s:
            kw["frame_range"] = parse_int_list(s["frames"])
        if "fragments" in s:
            kw["fragment_values"] = parse_int_list(s["fragments"])
        for key, name, conv in (("runs", "runs_per_step", int), ("seed", "base_seed", int),
                                ("decoder", "decoder", str), ("match_fraction", "match_fraction", float),
                                ("workers", "workers", int)):
            if key in s:
                kw[name] = conv(s[key])
        if "dir" in o:
            kw["output_dir"] = o["dir"]
        if "plots" in o:
            kw["plots"] = o.getboolean("plots")
        return cls().replace(**kw)


@dataclass(frozen=True)
class RunRecord:
    F: int
    P: int
    run: int
    seed: int
    C: int
    T_slots: int
    S: int
    decoder: str
    match_fraction: float
    fragment_total: int
    tp: int = 0
    fp: int = 0
    fn: int = 0
    f1: float = math.nan
    occupancy: float = math.nan
    distinct_tx: int = 0
    decoded: int = 0
    extraction_fast: float = math.nan
    extraction_robust: float = math.nan
    headerfull_fast: float = math.nan
    headerfull_robust: float = math.nan
    decode_time_s: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def derive_seed(base_seed: int, F: int, P: int, run: int) -> int:
    """Stable 63-bit seed for one run."""
    state = np.random.SeedSequence([base_seed, F, P, run]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def _decode(cfg: ExperimentConfig, M, seqs, P):
    if cfg.decoder == "exact":
        return decode_exact(M, seqs, P)
    if cfg.decoder == "online":
        return decode_online(M.bits, seqs, P, M.obws)
    if cfg.match_fraction < 1.0:
        return decode_partial(M, seqs, P, cfg.match_fraction)
    return decode_greedy(M, seqs, P)


def run_one(cfg: ExperimentConfig, F: int, P: int, run: int) -> RunRecord:
    """Generate, observe, decode and score one instance."""
    seed = derive_seed(cfg.base_seed, F, P, run)
    base = dict(F=F, P=P, run=run, seed=seed, C=cfg.C, T_slots=cfg.T_slots, S=cfg.S,
                decoder=cfg.decoder, match_fraction=cfg.match_fraction, fragment_total=F * P)
    try:
        seqs = generate_sequences(cfg.S, cfg.C, cfg.P_max, seed)
        tx = generate_traffic(F, seqs, cfg.T_slots, P, make_rng(seed, 1))
        M, cmap = observe(tx, seqs, cfg.T_slots, cfg.C)
        t0 = time.perf_counter()
        decoded = _decode(cfg, M, seqs, P)
        elapsed = time.perf_counter() - t0
        occ = occupancy(M)
        det = score_detection(tx, decoded, occ)
        thr = dict(cfg.thresholds)
        ext = {c: score_extraction(tx, decoded, cmap, seqs, thr[c]) if c in thr else math.nan
               for c in ("fast", "robust")}
        hf = {c: headerfull_baseline(AnalyticScenario.for_config(c, cfg.C, cfg.T_slots, P, F))
              for c in ("fast", "robust")}
        return RunRecord(**base, tp=det.tp, fp=det.fp, fn=det.fn, f1=det.f1, occupancy=occ,
                         distinct_tx=det.tp + det.fn, decoded=len(decoded),
                         extraction_fast=ext["fast"], extraction_robust=ext["robust"],
                         headerfull_fast=hf["fast"], headerfull_robust=hf["robust"],
                         decode_time_s=elapsed)
    except Exception as exc:  # recorded, not dropped
        log.error("run F=%d P=%d run=%d failed: %s", F, P, run, exc)
        msg = "".join(traceback.format_exception_only(type(exc), exc)).strip()
        return RunRecord(**base, error=msg)


def _run_step(args):
    cfg, F, P, run = args
    return run_one(cfg, F, P, run)


def run_sweep(cfg: ExperimentConfig) -> list[RunRecord]:
    """Every ``(F, P, run)`` of the config, returned in ``(F, P, run)`` order."""
    jobs = [(cfg, F, P, r) for F, P in cfg.steps for r in range(cfg.runs_per_step)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_step, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        records = [_run_step(j) for j in jobs]
    failed = [r for r in records if not r.ok]
    if failed:
        log.warning("%d of %d runs failed; see the 'error' column", len(failed), len(records))
    return records


METRICS = ("tp", "fp", "fn", "f1", "occupancy", "distinct_tx", "decoded",
           "extraction_fast", "extraction_robust", "headerfull_fast", "headerfull_robust",
           "decode_time_s")
KEYS = ("kind", "F", "P", "run", "seed", "C", "T_slots", "S", "decoder", "match_fraction", "fragment_total")
CSV_COLUMNS = KEYS + tuple(c for m in METRICS for c in (m, f"{m}_min", f"{m}_max")) + ("runs_ok", "error")
TIMING_COLUMNS = ("decode_time_s", "decode_time_s_min", "decode_time_s_max")


def aggregate(records: Sequence[RunRecord]) -> list[dict]:
    """Mean, min and max of every metric per ``(F, P)`` step, failed runs excluded."""
    steps: dict[tuple[int, int], list[RunRecord]] = {}
    for r in records:
        steps.setdefault((r.F, r.P), []).append(r)
    out = []
    for (F, P), recs in steps.items():
        ok = [r for r in recs if r.ok]
        row = {"F": F, "P": P, "runs": len(recs), "runs_ok": len(ok), "first": recs[0]}
        for m in METRICS:
            vals = np.array([getattr(r, m) for r in ok], dtype=float)
            if vals.size:
                row[m] = float(vals.mean())
                row[f"{m}_min"] = float(vals.min())
                row[f"{m}_max"] = float(vals.max())
            else:
                row[m] = row[f"{m}_min"] = row[f"{m}_max"] = math.nan
        row["error"] = "; ".join(sorted({r.error for r in recs if r.error}))
        out.append(row)
    return out


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip form
    return str(v)


def emit_csv(records: Sequence[RunRecord], path: str | os.PathLike) -> None:
    """One ``kind=run`` row per record, then one ``kind=step`` row per ``(F, P)``.

    Step rows hold the mean in the metric column and the extremes in
    ``<metric>_min`` / ``<metric>_max``; run rows leave those blank.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            row = {k: getattr(r, k) for k in KEYS[1:]}
            row["kind"] = "run"
            for m in METRICS:
                row[m] = getattr(r, m) if r.ok else ""
            row["runs_ok"] = int(r.ok)
            row["error"] = r.error
            w.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])
        for st in aggregate(records):
            first: RunRecord = st["first"]
            row = {k: getattr(first, k) for k in ("C", "T_slots", "S", "decoder", "match_fraction", "fragment_total")}
            row.update(kind="step", F=st["F"], P=st["P"], run="", seed="", runs_ok=st["runs_ok"], error=st["error"])
            for m in METRICS:
                for c in (m, f"{m}_min", f"{m}_max"):
                    row[c] = st[c]
            w.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])


def read_csv(path: str | os.PathLike, drop_timing: bool = False) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if drop_timing:
        for r in rows:
            for c in TIMING_COLUMNS:
                r.pop(c, None)
    return rows


def emit_plots(records: Sequence[RunRecord], path_prefix: str | os.PathLike) -> list[str]:
    from .plots import emit_plots as _emit

    return _emit(records, path_prefix)


def _cpu_model() -> str:
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or platform.machine()


@dataclass
class BenchmarkResult:
    decoder: str
    rows: list[dict]
    environment: dict
    spearman: float
    records: list[RunRecord] = field(repr=False, default_factory=list)

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for k, v in self.environment.items():
                fh.write(f"# {k}={v}\n")
            fh.write(f"# spearman_time_vs_fragments={self.spearman!r}\n")
            w = csv.writer(fh, lineterminator="\n")
            cols = ("decoder", "F", "P", "fragment_total", "runs", "time_mean_s", "time_min_s", "time_max_s")
            w.writerow(cols)
            for r in self.rows:
                w.writerow([_fmt(r[c]) for c in cols])


def benchmark(cfg: ExperimentConfig) -> BenchmarkResult:
    """Decode wall-clock time per step plus machine metadata."""
    from scipy.stats import spearmanr

    records = run_sweep(cfg)
    rows = []
    for st in aggregate(records):
        rows.append(dict(decoder=cfg.decoder, F=st["F"], P=st["P"], fragment_total=st["F"] * st["P"],
                         runs=st["runs_ok"], time_mean_s=st["decode_time_s"],
                         time_min_s=st["decode_time_s_min"], time_max_s=st["decode_time_s_max"]))
    ok = [r for r in records if r.ok]
    if len({r.fragment_total for r in ok}) > 1:
        rho = float(spearmanr([r.fragment_total for r in ok], [r.decode_time_s for r in ok]).statistic)
    else:
        rho = math.nan
    env = dict(cpu=_cpu_model(), cores=os.cpu_count(), python=platform.python_version(),
               numpy=np.__version__, platform=platform.platform(), workers=cfg.workers)
    return BenchmarkResult(cfg.decoder, rows, env, rho, records)


def analytic_sweep_rows(n_tx_values: Iterable[int], P_values: Iterable[int], C: int = 35, T_slots: int = 1000):
    from .analytic import analytic_rows

    return analytic_rows(n_tx_values, P_values, ("fast", "robust"), C, T_slots)
