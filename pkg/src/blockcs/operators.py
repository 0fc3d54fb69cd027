"""Matrix-free linear operators and the transforms used to build block dictionaries.

Vectors act as columns: ``matvec`` accepts an array of shape ``(cols,)`` or
``(cols, k)`` and applies the operator to each column.  Images of size
``d x d`` are identified with vectors of length ``d**2`` in row-major (C)
order, so ``np.kron(alpha, e0)`` is an image whose first column is ``alpha``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "LinearOperator",
    "DenseMatrix",
    "aslinearoperator",
    "identity",
    "dft_operator",
    "kron",
    "vstack",
    "block_diag",
    "block_diag_example",
    "operator_norm",
]


class ConvergenceError(RuntimeError):
    """Raised when an iterative estimate hits its iteration cap.

    The last iterate is kept on ``estimate`` so callers can still use it.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def _as_columns(x, n):
    x = np.asarray(x)
    if x.shape[0] != n:
        raise ValueError(f"expected leading dimension {n}, got {x.shape[0]}")
    return x.astype(complex, copy=False)


class LinearOperator:
    """A linear map ``C^cols -> C^rows`` given by its forward and adjoint actions.

    Parameters
    ----------
    shape : tuple of int
        ``(rows, cols)``.
    matvec, rmatvec : callable
        Forward and adjoint maps.  Both receive a complex array whose first
        axis has the input length (optionally with a trailing batch axis)
        and must return the same layout.
    name : str, optional
        Used in ``repr``.
    """

    def __init__(self, shape, matvec: Callable, rmatvec: Callable, name: str = "op"):
        rows, cols = (int(shape[0]), int(shape[1]))
        if rows < 1 or cols < 1:
            raise ValueError(f"operator dimensions must be positive, got {shape}")
        self.shape = (rows, cols)
        self._matvec = matvec
        self._rmatvec = rmatvec
        self.name = name

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    def matvec(self, x):
        return self._matvec(_as_columns(x, self.cols))

    def rmatvec(self, y):
        return self._rmatvec(_as_columns(y, self.rows))

    def __matmul__(self, x):
        if isinstance(x, LinearOperator):
            return compose(self, x)
        return self.matvec(x)

    @property
    def H(self) -> "LinearOperator":
        return LinearOperator(
            (self.cols, self.rows), self._rmatvec, self._matvec, name=f"{self.name}^H"
        )

    def to_dense(self) -> np.ndarray:
        return self.matvec(np.eye(self.cols, dtype=complex))

    def columns(self, idx) -> np.ndarray:
        """Dense ``rows x len(idx)`` matrix of the selected columns."""
        idx = np.asarray(idx, dtype=int)
        e = np.zeros((self.cols, idx.size), dtype=complex)
        e[idx, np.arange(idx.size)] = 1.0
        return self.matvec(e)

    def row_block(self, idx) -> np.ndarray:
        """Dense ``len(idx) x cols`` matrix of the selected rows."""
        idx = np.asarray(idx, dtype=int)
        e = np.zeros((self.rows, idx.size), dtype=complex)
        e[idx, np.arange(idx.size)] = 1.0
        return self.rmatvec(e).conj().T

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} {self.rows}x{self.cols}>"


class DenseMatrix(LinearOperator):
    """Explicit complex matrix wrapped as an operator (the small-scale oracle)."""

    def __init__(self, matrix, name: str = "dense"):
        mat = np.atleast_2d(np.asarray(matrix, dtype=complex))
        if mat.ndim != 2:
            raise ValueError("DenseMatrix expects a 2-D array")
        if not np.all(np.isfinite(mat)):
            raise ValueError("DenseMatrix entries must be finite")
        self.matrix = mat
        super().__init__(mat.shape, mat.__matmul__, mat.conj().T.__matmul__, name=name)

    def to_dense(self):
        return self.matrix.copy()

    def columns(self, idx):
        return self.matrix[:, np.asarray(idx, dtype=int)]

    def row_block(self, idx):
        return self.matrix[np.asarray(idx, dtype=int), :]


def aslinearoperator(a) -> LinearOperator:
    if isinstance(a, LinearOperator):
        return a
    return DenseMatrix(a)


def identity(n: int) -> LinearOperator:
    return LinearOperator((n, n), lambda x: x.copy(), lambda y: y.copy(), name=f"Id{n}")


def compose(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    if a.cols != b.rows:
        raise ValueError(f"cannot compose {a.shape} with {b.shape}")
    return LinearOperator(
        (a.rows, b.cols),
        lambda x: a._matvec(b._matvec(x)),
        lambda y: b._rmatvec(a._rmatvec(y)),
        name=f"{a.name}*{b.name}",
    )


def dft_operator(dim: int) -> LinearOperator:
    """Unitary 1-D DFT of size ``dim``.

    Entry ``(p, l)`` is ``exp(2i*pi*p*l/dim) / sqrt(dim)`` with 0-based
    frequencies, so row 0 is the DC row.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return LinearOperator(
        (dim, dim),
        lambda x: np.fft.ifft(x, axis=0, norm="ortho"),
        lambda y: np.fft.fft(y, axis=0, norm="ortho"),
        name=f"F{dim}",
    )


def _kron_apply(fa, fb, a_in, b_in, a_out, b_out, x):
    # x[(a, b)] in C order -> (A X B^T)[(i, j)]
    batch = x.ndim == 2
    k = x.shape[1] if batch else 1
    X = x.reshape(a_in, b_in, k)
    Y = fb(X.transpose(1, 0, 2).reshape(b_in, a_in * k))
    Y = Y.reshape(b_out, a_in, k).transpose(1, 0, 2).reshape(a_in, b_out * k)
    Z = fa(Y).reshape(a_out * b_out, k)
    return Z if batch else Z[:, 0]


def kron(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    """Kronecker product ``a (x) b`` applied through reshapes, never materialized."""
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    limit = np.iinfo(np.intp).max
    if rows > limit or cols > limit:
        raise OverflowError(f"Kronecker dimensions {rows}x{cols} overflow the index type")

    def fwd(x):
        return _kron_apply(a._matvec, b._matvec, a.cols, b.cols, a.rows, b.rows, x)

    def adj(y):
        return _kron_apply(a._rmatvec, b._rmatvec, a.rows, b.rows, a.cols, b.cols, y)

    return LinearOperator((rows, cols), fwd, adj, name=f"({a.name}(x){b.name})")


def vstack(ops: Sequence[LinearOperator], scales=None) -> LinearOperator:
    """Stack operators with a common column count, each optionally scaled."""
    ops = list(ops)
    if not ops:
        raise ValueError("vstack needs at least one operator")
    cols = ops[0].cols
    if any(op.cols != cols for op in ops):
        raise ValueError("all stacked operators must share the column count")
    scales = np.ones(len(ops)) if scales is None else np.asarray(scales, dtype=float)
    offsets = np.concatenate([[0], np.cumsum([op.rows for op in ops])])

    def fwd(x):
        return np.concatenate([c * op._matvec(x) for c, op in zip(scales, ops)], axis=0)

    def adj(y):
        out = 0
        for c, op, lo, hi in zip(scales, ops, offsets[:-1], offsets[1:]):
            out = out + c * op._rmatvec(y[lo:hi])
        return out

    return LinearOperator((int(offsets[-1]), cols), fwd, adj, name="vstack")


def block_diag(ops: Sequence[LinearOperator]) -> LinearOperator:
    ops = list(ops)
    r_off = np.concatenate([[0], np.cumsum([op.rows for op in ops])])
    c_off = np.concatenate([[0], np.cumsum([op.cols for op in ops])])

    def fwd(x):
        return np.concatenate(
            [op._matvec(x[lo:hi]) for op, lo, hi in zip(ops, c_off[:-1], c_off[1:])], axis=0
        )

    def adj(y):
        return np.concatenate(
            [op._rmatvec(y[lo:hi]) for op, lo, hi in zip(ops, r_off[:-1], r_off[1:])], axis=0
        )

    return LinearOperator((int(r_off[-1]), int(c_off[-1])), fwd, adj, name="blkdiag")


def block_diag_example(n: int) -> LinearOperator:
    """The ``n x n`` orthogonal matrix ``diag(1, F_{n-1})``.

    Its first row is a canonical vector, so the matrix is maximally
    coherent even though the remaining rows are perfectly spread out.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    op = block_diag([identity(1), dft_operator(n - 1)])
    op.name = f"1+F{n - 1}"
    return op


def operator_norm(a, tol: float = 1e-8, maxiter: int = 10_000, seed: int = 0, atol: float = 0.0) -> float:
    """Largest singular value of ``a`` by power iteration on ``a^H a``.

    Stops once successive estimates differ by ``0.1 * tol`` relative, or once
    the estimate drops below ``atol`` (useful when the answer is round-off).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = aslinearoperator(a)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.cols) + 1j * rng.standard_normal(a.cols)
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(maxiter):
        z = a._rmatvec(a._matvec(x))
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        new = np.sqrt(nz)
        x = z / nz
        if abs(new - sigma) <= 0.1 * tol * new or new <= atol:
            return float(new)
        sigma = new
    raise ConvergenceError(f"power iteration did not converge in {maxiter} steps", sigma)
