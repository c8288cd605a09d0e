"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a PASS/FAIL line that is repeated in the terminal summary.
Criteria 8, 9 and 10 share the session-wide default sweep from ``conftest``.
"""

import csv
import io
import math
import time

import numpy as np
from scipy.stats import spearmanr

from lrfhss.analytic import AnalyticScenario, coll, frame_breakdown, p_frame
from lrfhss.core import generate_sequences, make_rng
from lrfhss.decoder import brute_force_ilp, decode_exact, decode_greedy, decode_online
from lrfhss.harness import TIMING_COLUMNS, ExperimentConfig, emit_csv, run_sweep
from lrfhss.simulator import generate_traffic, observe

from .oracles import balls_in_bins_hit, tiny_instance


def test_c01_exactness_equivalence(accept):
    rng = make_rng(2024, 1)
    n, mismatches = 500, 0
    start = time.perf_counter()
    for _ in range(n):
        M, seqs, P = tiny_instance(rng)
        g = decode_greedy(M, seqs, P)
        if not (g == decode_exact(M, seqs, P) == brute_force_ilp(M, seqs, P)):
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    accept("1 exactness equivalence", ok, f"{n} tiny instances, {mismatches} mismatches, {elapsed:.1f} s (< 60 s)")
    assert ok


def test_c02_tp_completeness(accept):
    rng = make_rng(2024, 2)
    n, missed, worst = 100, 0, None
    for i in range(n):
        P = (10, 90)[i % 2]
        F = int(rng.integers(0, 3301))
        seqs = generate_sequences(512, 35, 90, seed=int(rng.integers(2**31)))
        tx = generate_traffic(F, seqs, 1000, P, rng)
        M, _ = observe(tx, seqs, 1000, 35)
        d = decode_greedy(M, seqs, P)
        lost = set(tx.pairs()) - set(d.pairs())
        if lost:
            missed += len(lost)
            worst = (F, P)
    accept("2 TP-completeness", missed == 0,
           f"{n} instances (T=1000, C=35, S=512, P in {{10,90}}), {missed} true pairs missed"
           + (f", e.g. at F,P={worst}" if worst else ""))
    assert missed == 0


def test_c03_online_static_equivalence(accept):
    rng = make_rng(2024, 3)
    n, mismatches = 60, 0
    for _ in range(n):
        C = int(rng.integers(2, 36))
        P = int(rng.integers(1, 31))
        T = int(rng.integers(P, 400))
        S = int(rng.integers(1, min(128, C**P) + 1))
        seqs = generate_sequences(S, C, P, seed=int(rng.integers(2**31)))
        tx = generate_traffic(int(rng.integers(0, 3 * T)), seqs, T, P, rng)
        M, _ = observe(tx, seqs, T, C)
        if decode_online(M.columns(), seqs, P, C) != decode_greedy(M, seqs, P):
            mismatches += 1
    accept("3 online/static equivalence", mismatches == 0, f"{n} instances, {mismatches} mismatches")
    assert mismatches == 0


def test_c04_extraction_fast_headline(accept):
    cfg = ExperimentConfig(frame_range=(2000,), fragment_values=(30,), runs_per_step=10)
    recs = run_sweep(cfg)
    assert all(r.ok for r in recs)
    headerless = float(np.mean([r.extraction_fast for r in recs]))
    headerfull = p_frame(AnalyticScenario.for_config("fast", 35, 1000, 30, 2000))
    ok = 0.20 <= headerless <= 0.40 and headerfull <= 0.05
    accept("4 fast extraction F=2000 P=30", ok,
           f"mean headerless {headerless:.5f} (want [0.20, 0.40]), analytic headerfull {headerfull:.5f} (want <= 0.05)")
    assert ok


def test_c05_occupancy_landmark(accept):
    cfg = ExperimentConfig(frame_range=(3500,), fragment_values=(10,), runs_per_step=10)
    occ = float(np.mean([r.occupancy for r in run_sweep(cfg)]))
    ok = 0.57 <= occ <= 0.67
    accept("5 occupancy landmark", ok, f"mean occupancy {occ:.4f} at 35000 fragments (want [0.57, 0.67], 1-1/e = 0.6321)")
    assert ok


def test_c06a_model_boundary_and_monotonicity(accept):
    problems = []
    for config in ("fast", "robust"):
        for P in (10, 30, 50, 70, 90):
            if p_frame(AnalyticScenario.for_config(config, 35, 1000, P, 0)) != 1.0:
                problems.append(f"{config} P={P}: p_frame(0) != 1")
            vals = [p_frame(AnalyticScenario.for_config(config, 35, 1000, P, n)) for n in range(0, 3001, 100)]
            if any(b > a for a, b in zip(vals, vals[1:])):
                problems.append(f"{config} P={P}: not non-increasing")
    accept("6a p_frame(0)=1 and non-increasing", not problems,
           "; ".join(problems) or "both configs, P in {10,...,90}, n_tx in {0,...,3000}")
    assert not problems


def test_c06b_model_headline_point(accept):
    p_hdr, p_pld, _ = frame_breakdown(AnalyticScenario.for_config("robust", 35, 1000, 30, 1000))
    ok = 0.85 <= p_hdr <= 0.95 and 0.35 <= p_pld <= 0.45
    accept("6b headline point robust P=30 n_tx=1000", ok,
           f"p_header {p_hdr:.4f} (want [0.85, 0.95]), p_payload {p_pld:.4f} (want [0.35, 0.45])")
    assert ok


def test_c07_coll_monte_carlo(accept):
    trials = 10**6
    details, ok = [], True
    for n_og in (5, 35, 70):
        est = balls_in_bins_hit(35, n_og, trials, seed=700 + n_og)
        p = coll(102, 35, n_og)
        se = math.sqrt(p * (1 - p) / trials)
        z = abs(est - p) / se
        ok &= z <= 3
        details.append(f"n_og={n_og}: formula {p:.5f} MC {est:.5f} ({z:.2f} SE)")
    accept("7 coll(102) vs Monte Carlo", ok, "; ".join(details))
    assert ok


def test_c08_f1_low_load(default_sweep, accept):
    _, recs = default_sweep
    f1 = [r.f1 for r in recs if (r.F, r.P) == (500, 10)]
    mean = float(np.mean(f1))
    ok = len(f1) == 10 and mean >= 0.95
    accept("8 F1 at F=500 P=10", ok, f"mean F1 {mean:.4f} over {len(f1)} runs (want >= 0.95)")
    assert ok


def test_c09_performance(default_sweep, accept):
    _, recs = default_sweep
    worst = [r for r in recs if (r.F, r.P) == (3300, 90)]
    worst_time = max(r.decode_time_s for r in worst)
    ok_recs = [r for r in recs if r.ok]
    rho = float(spearmanr([r.fragment_total for r in ok_recs], [r.decode_time_s for r in ok_recs]).statistic)
    ok = all(r.ok for r in worst) and worst_time <= 60 and rho > 0
    accept("9 performance ceiling", ok,
           f"worst-case greedy decode {worst_time:.2f} s (want <= 60 s), Spearman(time, fragments) {rho:.3f} (want > 0)")
    assert ok


def _csv_without_timing(records, path) -> str:
    emit_csv(records, path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    keep = [i for i, name in enumerate(rows[0]) if name not in TIMING_COLUMNS]
    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows([row[i] for i in keep] for row in rows)
    return out.getvalue()


def test_c10_reproducibility(default_sweep, accept, tmp_path):
    cfg, first = default_sweep
    a = _csv_without_timing(first, tmp_path / "a.csv")
    b = _csv_without_timing(run_sweep(cfg), tmp_path / "b.csv")
    ok = a == b
    accept("10 reproducibility", ok,
           f"two full default sweeps, {a.count(chr(10))} CSV lines each, "
           + ("byte-identical excluding timing" if ok else "differ"))
    assert ok
