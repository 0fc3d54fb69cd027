# %% [markdown]
# # Basis pursuit and a phase transition
#
# We recover sparse complex vectors from a few random rows of the 256-point
# DFT by minimizing the l1 norm under the measurement constraint.

# %%
import numpy as np

from blockcs import blocks, montecarlo, operators, sampling
from blockcs.solver import basis_pursuit

# %%
n, s = 256, 5
rng = np.random.default_rng(0)
x = montecarlo.random_signal(n, s, rng)
A = sampling.isolated_sampler(operators.dft_operator(n), np.full(n, 1 / n), 60, seed=1)
res = basis_pursuit(A.operator, A.matvec(x.dense()), reference=x.dense())
print(res.success, res.relative_error, res.iterations, "iterations, certified:", res.certified)

# %% [markdown]
# Sweeping m shows the transition from failure to exact recovery.  Each cell
# is seeded by (seed, cell, trial), so any cell can be replayed alone.

# %%
rows = blocks.partition_blocks(operators.dft_operator(n), [[i] for i in range(n)])
diagram = montecarlo.phase_transition(
    rows, blocks.DrawingDistribution.uniform(n), [5, 10], [10, 20, 40, 80], trials=10, seed=0
)
print(diagram.to_csv())
