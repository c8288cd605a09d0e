# %% [markdown]
# # Decoding as an integer program
#
# Four sequences over four sub-channels and three overlapping frames. We
# write the selection problem as a 0/1 program, solve it three ways, and
# export it for an external solver.

# %%
import os
import tempfile

import numpy as np

from lrfhss import (
    SequenceSet,
    TransmissionSet,
    brute_force_ilp,
    decode_exact,
    decode_greedy,
    export_lp,
    ilp_constraints,
    observe,
)

hops = np.array([[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]])
seqs = SequenceSet(hops, 4, 0)
frames = TransmissionSet.from_items([(0, 1, 4), (1, 2, 4), (2, 3, 4)])
M, _ = observe(frames, seqs, 8, 4)
print(M.dumps())

# %% [markdown]
# Each candidate y[t, s] gets one lower bound. In the default form the
# bound is 1 exactly when every cell of its window is busy, so the minimum
# selection is the set of full matches.

# %%
coef, rhs = ilp_constraints(M, seqs, 4)
print("forced (s, t):", sorted((int(s), int(t) + 1) for t, s in zip(*np.nonzero(rhs > 0))))
for name, dec in (("greedy", decode_greedy), ("closed form", decode_exact), ("brute force", brute_force_ilp)):
    print(f"{name:12s}", sorted(dec(M, seqs, 4).pairs()))

# %% [markdown]
# The alternative form divides the busy-cell count by P. Any single busy
# cell then forces a selection, which inflates the answer.

# %%
print("printed form selects", len(decode_exact(M, seqs, 4, form="printed")), "candidates")

# %% [markdown]
# Export for CPLEX, Gurobi, HiGHS or any solver reading the LP format.

# %%
path = os.path.join(tempfile.mkdtemp(), "toy.lp")
export_lp(M, seqs, 4, path)
print(open(path).read())

# %%
try:
    import highspy
except ImportError:
    print("highspy not installed; skipping solve")
else:
    h = highspy.Highs()
    h.silent()
    h.readModel(path)
    h.run()
    values = h.getSolution().col_value
    names = [h.getColName(i)[1] for i in range(h.getNumCol())]
    print("HiGHS picks", sorted(n for n, v in zip(names, values) if v > 0.5))
