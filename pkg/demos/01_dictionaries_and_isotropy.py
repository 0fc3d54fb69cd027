# %% [markdown]
# # Block dictionaries
#
# A block is a group of measurement rows acquired together, for instance one
# line of k-space in MRI.  A dictionary is a finite family of blocks whose
# Grams add up to the identity.  Here we build the usual ones and check that
# property numerically.

# %%
import numpy as np

from blockcs import blocks, operators

# %% [markdown]
# The 1-D DFT is unitary with entries exp(2i pi p l / d) / sqrt(d).  Applied to
# the first canonical vector it returns the flat DC column.

# %%
f4 = operators.dft_operator(4)
e0 = np.array([1.0, 0, 0, 0])
print(f4.matvec(e0).real)

# %% [markdown]
# The 2-D DFT on row-major images is the Kronecker product of two 1-D DFTs.
# Cutting it into horizontal k-space lines gives `sqrt(n)` blocks of
# `sqrt(n)` rows each.

# %%
lines = blocks.line_blocks(operators.dft_operator(16))
print(lines.describe()["M"], "blocks of", lines.block_sizes[0], "rows")
print("isotropy deviation:", blocks.verify_isotropy(lines))

# %% [markdown]
# Rows plus columns cover every k-space sample twice, so each sample is
# scaled by 1/sqrt(2) to keep the sum of Grams equal to the identity.

# %%
rc = blocks.rows_and_columns_blocks(16)
print(rc.M, "blocks, entry modulus", np.abs(rc.dense_blocks[0]).max(), "=", 1 / np.sqrt(2 * 256))
print("isotropy deviation:", blocks.verify_isotropy(rc))

# %% [markdown]
# Dropping a block breaks isotropy by exactly the norm of its Gram.

# %%
part = blocks.partition_blocks(operators.dft_operator(8), [[0, 1, 2], [3, 4], [5, 6, 7]])
missing = blocks.BlockDictionary(8, part.blocks[:2])
print(blocks.verify_isotropy(missing))

# %% [markdown]
# Gaussian blocks are not stored: each one is generated on demand from a
# seed and an index, with N(0, 1/p) entries, and only satisfy isotropy on
# average.

# %%
g = blocks.gaussian_dictionary(p=2, n=8)
mean = sum(b.T @ b for b in (g.gaussian_block(0, j) for j in range(5000))) / 5000
print("max deviation of the mean Gram:", np.abs(mean - np.eye(8)).max())
