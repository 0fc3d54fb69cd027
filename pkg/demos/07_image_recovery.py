# %% [markdown]
# # Recovering a piecewise-constant image from k-space lines
#
# A piecewise-constant image on dyadic squares is sparse in the Haar basis.
# We sample horizontal k-space lines with a density favoring low
# frequencies, then solve basis pursuit over Haar coefficients.

# %%
import numpy as np

from blockcs import blocks, images, operators, sampling
from blockcs.solver import basis_pursuit, psnr

# %%
side = 32
img = images.piecewise_constant_image(side, pieces=6, seed=3)
haar = images.haar2_matrix(side)
coeffs = haar @ img.ravel()
print("nonzero Haar coefficients:", np.count_nonzero(np.abs(coeffs) > 1e-9), "of", side * side)

# %%
lines = blocks.line_blocks(operators.dft_operator(side))
for name, pi in (("uniform", blocks.DrawingDistribution.uniform(side)), ("variable density", blocks.variable_density(lines, 1.0))):
    A = sampling.draw_blocks(lines, pi, m=12, seed=5)
    res = basis_pursuit(A.matrix @ haar.T, A.matvec(img.ravel()), reference=coeffs)
    est = (haar.T @ res.estimate).real
    print(f"{name:17s} lines={len(set(A.indices.tolist()))} PSNR={psnr(img, est, 255.0):.1f} dB")

# %% [markdown]
# Uniform lines often miss the DC line, and with it the image mean; the
# variable-density draw keeps it and recovers the image exactly.
