"""Block dictionaries: groups of measurement rows that are acquired together.

Deterministic dictionaries hold ``M`` blocks ``B_k`` whose Grams sum to the
identity (isotropy).  Any multiplicity renormalization for overlapping blocks
is folded into the stored blocks.  The ``1/sqrt(pi_k)`` drawing rescale is
*not* stored here; :mod:`blockcs.sampling` applies it so a single dictionary
can serve many drawing distributions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .operators import (
    DenseMatrix,
    LinearOperator,
    aslinearoperator,
    dft_operator,
    kron,
    operator_norm,
)

__all__ = [
    "BlockDictionary",
    "DrawingDistribution",
    "partition_blocks",
    "overlapping_blocks",
    "line_blocks",
    "rows_and_columns_blocks",
    "gaussian_dictionary",
    "verify_isotropy",
    "dft2_operator",
    "variable_density",
]

DETERMINISTIC = "deterministic"
GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class BlockDictionary:
    """A finite family of blocks, or a Gaussian block generator.

    Attributes
    ----------
    n : int
        Ambient dimension (column count of every block).
    blocks : tuple of LinearOperator
        The blocks ``B_k`` (empty for Gaussian generators).
    kind : {"deterministic", "gaussian"}
    p : int or None
        Rows per Gaussian block.
    row_sets : tuple of ndarray or None
        For blocks extracted from a transform ``A0``, the ``A0`` row indices of
        each block.  Used to draw sampling masks.
    grid : tuple of int or None
        Shape of the acquisition grid when ``A0`` is a 2-D transform.
    factor : ndarray or None
        For line blocks ``psi[k] (x) psi``, the dense 1-D transform ``psi``.
    """

    n: int
    blocks: tuple = ()
    kind: str = DETERMINISTIC
    p: int | None = None
    row_sets: tuple | None = None
    grid: tuple | None = None
    name: str = "dictionary"
    factor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in (DETERMINISTIC, GAUSSIAN):
            raise ValueError(f"unknown dictionary kind {self.kind!r}")
        if self.kind == DETERMINISTIC:
            if not self.blocks:
                raise ValueError("a deterministic dictionary needs at least one block")
            if any(b.cols != self.n for b in self.blocks):
                raise ValueError("all blocks must have n columns")

    @property
    def is_gaussian(self) -> bool:
        return self.kind == GAUSSIAN

    @property
    def M(self) -> int:
        if self.is_gaussian:
            raise TypeError("a Gaussian dictionary has no finite block count")
        return len(self.blocks)

    @property
    def block_sizes(self) -> np.ndarray:
        if self.is_gaussian:
            raise TypeError("a Gaussian dictionary has no finite block list")
        return np.array([b.rows for b in self.blocks])

    @cached_property
    def dense_blocks(self) -> list:
        """Materialized ``p_k x n`` matrices, computed once."""
        if self.is_gaussian:
            raise TypeError("Gaussian blocks are drawn, not stored; use gaussian_block")
        return [b.to_dense() for b in self.blocks]

    def gaussian_block(self, seed: int, index: int = 0) -> np.ndarray:
        """Draw Gaussian block number ``index`` of the stream started by ``seed``.

        Entries are i.i.d. N(0, 1/p).  The pair ``(seed, index)`` fully
        determines the block.
        """
        if not self.is_gaussian:
            raise TypeError("gaussian_block needs a Gaussian dictionary")
        rng = np.random.default_rng([int(seed), int(index)])
        return rng.standard_normal((self.p, self.n)) / np.sqrt(self.p)

    def describe(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "n": self.n}
        if self.is_gaussian:
            out["p"] = self.p
        else:
            out["M"] = self.M
            out["block_sizes"] = self.block_sizes.tolist()
        return out


@dataclass(frozen=True, eq=False)
class DrawingDistribution:
    """Probabilities ``pi_k`` with which dictionary blocks are drawn."""

    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        pi = np.asarray(self.probabilities, dtype=float).ravel()
        if pi.size == 0:
            raise ValueError("empty distribution")
        if np.any(pi <= 0):
            raise ValueError("every block needs a positive probability; drop zero-mass blocks")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {pi.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", pi)

    @classmethod
    def uniform(cls, M: int) -> "DrawingDistribution":
        return cls(np.full(M, 1.0 / M))

    @classmethod
    def from_weights(cls, weights) -> "DrawingDistribution":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    def __len__(self):
        return self.probabilities.size

    def __getitem__(self, k):
        return self.probabilities[k]


def _check_orthogonal(a0: LinearOperator, tol=1e-8, max_dense=1024):
    if a0.rows != a0.cols:
        raise ValueError("A0 must be square")
    if a0.cols > max_dense:
        return
    d = a0.to_dense()
    err = np.linalg.norm(d.conj().T @ d - np.eye(a0.cols), 2)
    if err > tol:
        raise ValueError(f"A0 is not orthogonal (deviation {err:.3g})")


def _index_sets(index_sets, n):
    sets = [np.asarray(sorted(set(int(i) for i in I)), dtype=int) for I in index_sets]
    if any(I.size == 0 for I in sets):
        raise ValueError("empty index set")
    allidx = np.concatenate(sets)
    if allidx.min() < 0 or allidx.max() >= n:
        raise ValueError(f"index out of range 0..{n - 1}")
    if np.unique(allidx).size != n:
        raise ValueError("index sets must cover every row of A0")
    return sets


def partition_blocks(a0, index_sets: Sequence, name: str = "partition", grid=None) -> BlockDictionary:
    """Blocks made of disjoint row groups ``I_j`` of an orthogonal ``a0``.

    Indices are 0-based.  Overlapping or incomplete index sets are rejected.
    """
    a0 = aslinearoperator(a0)
    _check_orthogonal(a0)
    sets = _index_sets(index_sets, a0.rows)
    if sum(I.size for I in sets) != a0.rows:
        raise ValueError("index sets overlap; use overlapping_blocks")
    blocks = tuple(DenseMatrix(a0.row_block(I), name=f"B{j}") for j, I in enumerate(sets))
    return BlockDictionary(a0.cols, blocks, row_sets=tuple(sets), grid=grid, name=name)


def overlapping_blocks(a0, index_sets: Sequence, name: str = "overlap", grid=None) -> BlockDictionary:
    """Blocks from possibly overlapping row groups of an orthogonal ``a0``.

    Row ``i`` is scaled by ``1/sqrt(alpha_i)``, ``alpha_i`` being the number of
    groups containing it, which restores isotropy.
    """
    a0 = aslinearoperator(a0)
    _check_orthogonal(a0)
    sets = _index_sets(index_sets, a0.rows)
    alpha = np.bincount(np.concatenate(sets), minlength=a0.rows)
    blocks = tuple(
        DenseMatrix(a0.row_block(I) / np.sqrt(alpha[I])[:, None], name=f"B{j}")
        for j, I in enumerate(sets)
    )
    return BlockDictionary(a0.cols, blocks, row_sets=tuple(sets), grid=grid, name=name)


def dft2_operator(sqrt_n: int) -> LinearOperator:
    f = dft_operator(sqrt_n)
    return kron(f, f)


def line_blocks(psi) -> BlockDictionary:
    """Horizontal lines of the separable transform ``psi (x) psi``.

    Block ``k`` is ``psi[k, :] (x) psi`` (``sqrt(n) x n``), i.e. rows
    ``k*sqrt(n) ... (k+1)*sqrt(n)-1`` of ``psi (x) psi``.  Blocks stay
    matrix-free.
    """
    psi = aslinearoperator(psi)
    _check_orthogonal(psi)
    d = psi.rows
    rows = psi.to_dense()
    blocks = tuple(kron(DenseMatrix(rows[k : k + 1], name=f"psi[{k}]"), psi) for k in range(d))
    row_sets = tuple(np.arange(k * d, (k + 1) * d) for k in range(d))
    return BlockDictionary(
        d * d, blocks, row_sets=row_sets, grid=(d, d), name=f"lines{d}", factor=rows
    )


def rows_and_columns_blocks(sqrt_n: int) -> BlockDictionary:
    """Rows and columns of the 2-D DFT grid, each sample scaled by ``1/sqrt(2)``.

    Blocks ``0..sqrt_n-1`` are k-space rows, blocks ``sqrt_n..2*sqrt_n-1``
    are k-space columns.
    """
    if sqrt_n < 2:
        raise ValueError("sqrt_n must be >= 2")
    d = sqrt_n
    sets = [np.arange(k * d, (k + 1) * d) for k in range(d)]
    sets += [np.arange(k, d * d, d) for k in range(d)]
    return overlapping_blocks(dft2_operator(d), sets, name=f"rowscols{d}", grid=(d, d))


def variable_density(dictionary: BlockDictionary, decay: float) -> DrawingDistribution:
    """k-space line distribution ``pi_k ~ (1 + |f_k|)^(-decay)``.

    ``f_k`` is the signed (folded) frequency of line ``k``; for
    rows-and-columns dictionaries row ``k`` and column ``k`` share it.  Low
    frequencies, where natural images keep most of their energy, are favored.
    """
    if dictionary.grid is None or dictionary.is_gaussian:
        raise ValueError("variable density needs a k-space line dictionary")
    d = dictionary.grid[0]
    if dictionary.M not in (d, 2 * d):
        raise ValueError("variable density needs one block per k-space line")
    k = np.arange(dictionary.M) % d
    f = np.minimum(k, d - k)
    return DrawingDistribution.from_weights((1.0 + f) ** (-float(decay)))


def gaussian_dictionary(p: int, n: int) -> BlockDictionary:
    """Generator of ``p x n`` blocks with i.i.d. N(0, 1/p) entries."""
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    return BlockDictionary(n, kind=GAUSSIAN, p=int(p), name=f"gaussian{p}x{n}")


def verify_isotropy(dictionary: BlockDictionary, max_dense: int = 4096) -> float:
    """Spectral norm of ``sum_k B_k^H B_k - Id``."""
    if dictionary.is_gaussian:
        raise TypeError("isotropy of a Gaussian dictionary only holds in expectation")
    n = dictionary.n
    if n <= max_dense:
        total = np.zeros((n, n), dtype=complex)
        for b in dictionary.dense_blocks:
            total += b.conj().T @ b
        total -= np.eye(n)
        return float(np.linalg.norm(total, 2))

    blocks = dictionary.blocks

    def gram_minus_id(x):
        out = -x
        for b in blocks:
            out = out + b._rmatvec(b._matvec(x))
        return out

    dev = LinearOperator((n, n), gram_minus_id, gram_minus_id, name="isotropy")
    return operator_norm(dev, atol=1e-12)
