# %% [markdown]
# # Block coherences and the best drawing distribution
#
# For a support S the number of blocks needed for recovery is driven by
# gamma(S) = max(mu1, mu2, mu3), and crudely bounded by s * mu4.  The
# distribution minimizing mu4 draws block k with probability proportional to
# the largest entry of its Gram.

# %%
import numpy as np

from blockcs import blocks, coherence, operators

# %% [markdown]
# Line blocks of the 16 x 16 2-D DFT all have Gram sup-norm 1/16, so the best
# distribution is uniform.

# %%
lines = blocks.line_blocks(operators.dft_operator(16))
print(coherence.block_sup_norms(lines)[:4])
print(coherence.optimal_pi(lines).probabilities[:4])

# %% [markdown]
# The matrix diag(1, F_63) has one perfectly localized row.  The best
# distribution picks it half of the time.

# %%
a0 = operators.block_diag_example(64)
rows = blocks.partition_blocks(a0, [[i] for i in range(64)])
pi = coherence.optimal_pi(rows).probabilities
print(pi[0], pi[1], 1 / 126)

# %% [markdown]
# The support matters.  On line blocks, a support spread over distinct image
# rows and columns is harmless (mu1 = 1), whereas a support stacked in one
# image column is the worst case (mu1 = s).

# %%
uniform = blocks.DrawingDistribution.uniform(16)
for S in ([0, 17, 34, 51], [0, 1, 16, 17], [0, 16, 32, 48]):
    r = coherence.gamma(lines, uniform, S)
    print(S, f"mu1={r.mu1:.2f} mu2={r.mu2:.2f} mu3={r.mu3:.2f} s*mu4={r.s * r.mu4:.2f}")

# %% [markdown]
# Gaussian blocks have mu3 = s/p exactly.  mu1 and mu2 are reported as
# 0.99-quantiles over random blocks.

# %%
g = blocks.gaussian_dictionary(4, 64)
print(coherence.gamma(g, None, range(8), trials=2000).to_json(indent=1))

# %% [markdown]
# The block-count formula has a large constant, which makes it vacuous at
# desk scale.

# %%
print(round(coherence.required_blocks(1.0, 1024, 0.01)))
