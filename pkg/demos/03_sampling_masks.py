# %% [markdown]
# # Drawing blocks and looking at the mask
#
# A sensing matrix stacks m blocks drawn i.i.d. from a distribution, each
# scaled by 1/sqrt(m pi_k) so that A^H A is the identity on average.

# %%
import tempfile
from pathlib import Path

import numpy as np

from blockcs import blocks, operators, sampling

# %%
lines = blocks.line_blocks(operators.dft_operator(32))
pi = blocks.variable_density(lines, decay=1.0)
A = sampling.draw_blocks(lines, pi, m=12, seed=7)
print(A.indices, A.q, "rows")

# %% [markdown]
# Draws are with replacement, so a line may come up twice.  The mask shows
# which k-space lines were acquired, low frequencies sitting at the top and
# bottom edges (0-based, uncentered frequencies).

# %%
mask = sampling.sampling_mask(A)
for row in mask[:, :8]:
    print("".join("#" if v else "." for v in row))

out = Path(tempfile.mkdtemp()) / "mask.pgm"
sampling.write_pgm(out, mask)
print("wrote", out)

# %% [markdown]
# Averaging A^H A over many draws gives back the identity.

# %%
small = blocks.line_blocks(operators.dft_operator(4))
upi = blocks.DrawingDistribution.uniform(4)
mean = sum(sampling.draw_blocks(small, upi, 2, seed=t).gram() for t in range(5000)) / 5000
print("max deviation:", np.abs(mean - np.eye(16)).max())
