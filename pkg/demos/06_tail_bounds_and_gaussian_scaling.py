# %% [markdown]
# # Deviation inequalities and Gaussian blocks
#
# Each deviation inequality bounds the probability that a random sensing
# matrix misbehaves on the support.  We count how often it happens and
# compare the Wilson interval with the bound.

# %%
from blockcs import blocks, coherence, montecarlo, operators

# %%
lines = blocks.line_blocks(operators.dft_operator(16))
pi = blocks.DrawingDistribution.uniform(16)
S = [0, 1, 16, 17]
report = coherence.gamma(lines, pi, S)
for event, thr in (("E1", 1.0), ("E4", 0.4)):
    r = montecarlo.tail_check(event, lines, pi, S, m=8, threshold=thr, trials=2000, seed=0, report=report)
    print(event, f"freq={r.frequency:.4f} wilson=({r.interval[0]:.4f}, {r.interval[1]:.4f}) bound={r.bound:.3g}", r.passed)

# %% [markdown]
# At this size both bounds exceed 1, so they hold trivially.  The E1 event
# never occurs, while E4 occurs almost always at a small threshold.  The
# bounds only start to bite for much larger m.

# %% [markdown]
# For Gaussian blocks gamma shrinks roughly like (s/p) log(s): doubling p
# about halves it.

# %%
table = montecarlo.gaussian_gamma_scaling([4, 8], [4, 8, 16], n=64, trials=1000, seed=0)
for row in table["rows"]:
    print(row["s"], row["p"], round(row["gamma"], 3))
print("fit a =", round(table["fit_coefficient"], 3), "relative residual", round(table["fit_relative_residual"], 3))
