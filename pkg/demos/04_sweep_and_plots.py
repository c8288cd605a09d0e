# %% [markdown]
# # A reduced parameter sweep
#
# The full default grid (29 frame counts, 5 fragment counts, 10 runs) takes
# a couple of minutes; `lrfhss sweep --plots` runs it. Here we use a coarse
# slice to show the moving parts.

# %%
import os
import tempfile

from lrfhss.harness import ExperimentConfig, aggregate, benchmark, emit_csv, emit_plots, run_sweep

cfg = ExperimentConfig(frame_range=(500, 1500, 2500), fragment_values=(10, 30), runs_per_step=3, base_seed=11)
records = run_sweep(cfg)
print(len(records), "runs")

# %% [markdown]
# Per-step means with their spread across runs.

# %%
for st in aggregate(records):
    print(f"F={st['F']:5d} P={st['P']:2d}  f1 {st['f1']:.3f} [{st['f1_min']:.3f}, {st['f1_max']:.3f}]"
          f"  fast {st['extraction_fast']:.3f} vs {st['headerfull_fast']:.4f}"
          f"  robust {st['extraction_robust']:.3f} vs {st['headerfull_robust']:.4f}")

# %% [markdown]
# Every run is reproducible from (base seed, F, P, run index), so rerunning
# a single point gives the same numbers.

# %%
out = tempfile.mkdtemp()
emit_csv(records, os.path.join(out, "sweep.csv"))
for f in emit_plots(records, os.path.join(out, "sweep")):
    print("wrote", f)

# %% [markdown]
# Decode time grows with the number of fragments on the grid.

# %%
res = benchmark(cfg)
for row in res.rows:
    print(row["F"], row["P"], f"{row['time_mean_s'] * 1e3:.1f} ms")
print("spearman", round(res.spearman, 3), "on", res.environment["cpu"])
