# %% [markdown]
# # Reception probability under slotted random traffic
#
# A frame survives if at least one header replica gets through and enough
# payload fragments land on a free sub-channel. Here we evaluate that model
# for both coding configurations and look at where it breaks down.

# %%
import numpy as np

from lrfhss import AnalyticScenario, coll, frame_breakdown, ongoing_count

C, T = 35, 1000

# %% [markdown]
# How many transmissions overlap a given one, on average? Header replicas
# last 233 ms, fragments one 102 ms slot.

# %%
for n_tx in (500, 1000, 2000):
    print(f"n_tx={n_tx:5d}  ongoing (robust, P=30) = {ongoing_count(n_tx, 30, T, 3):6.2f}")

# %% [markdown]
# Collision probability for one fragment and one header replica as the
# overlap count grows. Headers span three slots, so they suffer more.

# %%
for n_og in (5, 20, 35, 70):
    print(f"n_og={n_og:3d}  fragment {coll(102, C, n_og):.3f}  header {coll(233, C, n_og):.3f}")

# %% [markdown]
# Full breakdown across load. The fast configuration needs two thirds of
# its fragments, so it collapses much earlier than the robust one.

# %%
print(f"{'n_tx':>6} {'P':>3} {'config':>7} {'p_hdr':>8} {'p_pld':>8} {'p_frame':>8}")
for n_tx in (0, 250, 500, 1000, 2000):
    for P in (10, 30):
        for config in ("fast", "robust"):
            ph, pp, pf = frame_breakdown(AnalyticScenario.for_config(config, C, T, P, n_tx))
            print(f"{n_tx:6d} {P:3d} {config:>7} {ph:8.4f} {pp:8.4f} {pf:8.4f}")

# %% [markdown]
# Longer frames are strictly worse: each extra fragment is one more chance
# to be hit, and the threshold grows with P.

# %%
P_values = np.arange(10, 91, 20)
curve = [frame_breakdown(AnalyticScenario.for_config("robust", C, T, int(P), 1000))[2] for P in P_values]
print(dict(zip(P_values.tolist(), np.round(curve, 4).tolist())))
