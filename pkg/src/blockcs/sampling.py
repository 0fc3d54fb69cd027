"""Random block sensing matrices.

``m`` blocks are drawn i.i.d. (with replacement) from a dictionary under a
distribution ``pi`` and stacked with per-block scale ``1/sqrt(m * pi_k)``,
so that ``E[A^H A] = Id``.

Seeding: block indices come from ``np.random.default_rng(seed)``; Gaussian
block ``j`` comes from ``np.random.default_rng([seed, j])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .blocks import BlockDictionary, DrawingDistribution, partition_blocks
from .operators import DenseMatrix, aslinearoperator

__all__ = [
    "SampledOperator",
    "draw_blocks",
    "draw_distinct_blocks",
    "from_indices",
    "isolated_sampler",
    "partition_for_golfing",
    "sampling_mask",
    "write_pgm",
    "read_pgm",
]


@dataclass(frozen=True, eq=False)
class SampledOperator:
    """A drawn sensing matrix ``A`` together with its provenance.

    ``blocks[j]`` is the j-th drawn block already multiplied by its scale
    ``1/sqrt(m_total * pi_{k_j})``.  ``m_total`` is the draw count of the parent
    operator; groups split off for the golfing scheme keep it.
    """

    dictionary: BlockDictionary
    indices: np.ndarray
    blocks: tuple = field(repr=False)
    distribution: DrawingDistribution | None = None
    m_total: int | None = None
    seed: int | None = None
    offset: int = 0

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return self.dictionary.n

    @property
    def q(self) -> int:
        return int(sum(b.shape[0] for b in self.blocks))

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.vstack(self.blocks)

    @property
    def operator(self) -> DenseMatrix:
        return DenseMatrix(self.matrix, name=f"A[m={self.m}]")

    def matvec(self, x):
        return self.matrix @ np.asarray(x, dtype=complex)

    def rmatvec(self, y):
        return self.matrix.conj().T @ np.asarray(y, dtype=complex)

    def columns(self, idx) -> np.ndarray:
        return self.matrix[:, np.asarray(idx, dtype=int)]

    def gram(self) -> np.ndarray:
        A = self.matrix
        return A.conj().T @ A

    def to_dict(self) -> dict:
        out = {
            "dictionary": self.dictionary.describe(),
            "m": self.m,
            "m_total": self.m_total,
            "q": self.q,
            "seed": self.seed,
        }
        if not self.dictionary.is_gaussian:
            out["indices"] = [int(k) for k in self.indices]
            out["probabilities"] = self.distribution.probabilities.tolist()
        else:
            out["draw_numbers"] = [int(k) for k in self.indices]
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _assemble(dictionary, pi, indices, m_total, seed=None, offset=0):
    probs = pi.probabilities
    dense = dictionary.dense_blocks
    blocks = tuple(dense[k] / np.sqrt(m_total * probs[k]) for k in indices)
    return SampledOperator(dictionary, np.asarray(indices, dtype=int), blocks, pi, m_total, seed, offset)


def _check(dictionary, pi, m):
    if m < 1:
        raise ValueError("m must be >= 1")
    if not isinstance(pi, DrawingDistribution):
        pi = DrawingDistribution(pi)
    if len(pi) != dictionary.M:
        raise ValueError(f"distribution has {len(pi)} entries, dictionary has {dictionary.M} blocks")
    return pi


def draw_blocks(dictionary: BlockDictionary, pi, m: int, seed: int) -> SampledOperator:
    """Draw ``m`` blocks i.i.d. from ``pi`` and build ``A``.

    For a Gaussian dictionary ``pi`` is ignored and ``m`` fresh blocks are
    generated, each scaled by ``1/sqrt(m)``.
    """
    if dictionary.is_gaussian:
        if m < 1:
            raise ValueError("m must be >= 1")
        blocks = tuple(dictionary.gaussian_block(seed, j) / np.sqrt(m) for j in range(m))
        return SampledOperator(dictionary, np.arange(m), blocks, None, m, seed)
    pi = _check(dictionary, pi, m)
    rng = np.random.default_rng(seed)
    indices = rng.choice(dictionary.M, size=m, replace=True, p=pi.probabilities)
    return _assemble(dictionary, pi, indices, m, seed)


def from_indices(dictionary: BlockDictionary, pi, indices) -> SampledOperator:
    """Build ``A`` for an explicit block index list ``K``."""
    indices = np.asarray(indices, dtype=int)
    pi = _check(dictionary, pi, indices.size)
    if indices.min() < 0 or indices.max() >= dictionary.M:
        raise ValueError("block index out of range")
    return _assemble(dictionary, pi, indices, indices.size)


def draw_distinct_blocks(dictionary: BlockDictionary, pi, m: int, seed: int) -> SampledOperator:
    """Keep drawing i.i.d. from ``pi`` until ``m`` distinct blocks are seen.

    Repeats are discarded, so the result is ``A`` conditioned on having no
    repeated block.
    """
    pi = _check(dictionary, pi, m)
    if m > dictionary.M:
        raise ValueError(f"cannot pick {m} distinct blocks out of {dictionary.M}")
    rng = np.random.default_rng(seed)
    seen: list[int] = []
    while len(seen) < m:
        for k in rng.choice(dictionary.M, size=4 * m, replace=True, p=pi.probabilities):
            if k not in seen:
                seen.append(int(k))
                if len(seen) == m:
                    break
    return _assemble(dictionary, pi, seen, m, seed)


def isolated_sampler(a0, P, m: int, seed: int) -> SampledOperator:
    """Draw ``m`` single rows of ``a0`` from ``P`` (blocks of one row).

    Same draws as :func:`draw_blocks` on the singleton partition of ``a0``.
    """
    a0 = aslinearoperator(a0)
    singles = partition_blocks(a0, [[i] for i in range(a0.rows)], name="rows")
    return draw_blocks(singles, P, m, seed)


def partition_for_golfing(A: SampledOperator, group_sizes) -> list:
    """Split ``A`` into consecutive groups of draws.

    Each group keeps the parent's ``1/sqrt(m * pi)`` scale; the ``m/m_l``
    factor is applied by the certificate code.
    """
    sizes = [int(g) for g in group_sizes]
    if any(g < 1 for g in sizes):
        raise ValueError("group sizes must be positive")
    if sum(sizes) != A.m:
        raise ValueError(f"group sizes sum to {sum(sizes)}, operator has {A.m} draws")
    if len(sizes) == 1:
        return [A]
    groups = []
    lo = 0
    for g in sizes:
        groups.append(
            SampledOperator(
                A.dictionary,
                A.indices[lo : lo + g],
                A.blocks[lo : lo + g],
                A.distribution,
                A.m_total,
                A.seed,
                A.offset + lo,
            )
        )
        lo += g
    return groups


def sampling_mask(A: SampledOperator) -> np.ndarray:
    """Boolean acquisition-grid mask of the sampled locations.

    Needs a dictionary built from a 2-D transform (``grid`` and ``row_sets``
    set), e.g. line blocks or rows-and-columns blocks.
    """
    d = A.dictionary
    if d.grid is None or d.row_sets is None:
        raise ValueError("dictionary has no acquisition grid")
    mask = np.zeros(d.grid[0] * d.grid[1], dtype=bool)
    for k in np.unique(A.indices):
        mask[d.row_sets[k]] = True
    return mask.reshape(d.grid)


def write_pgm(path, mask) -> None:
    """Write a boolean mask as an ASCII PGM (P2) image, 255 where sampled."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    lines = ["P2", f"{w} {h}", "255"]
    lines += [" ".join("255" if v else "0" for v in row) for row in mask]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm(path) -> np.ndarray:
    tokens = [t for line in Path(path).read_text().splitlines() if not line.startswith("#") for t in line.split()]
    if tokens[0] != "P2":
        raise ValueError("not an ASCII PGM file")
    w, h, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    return np.array(tokens[4:], dtype=int).reshape(h, w)
