"""Noiseless basis pursuit, ``min ||z||_1 subject to A z = y``, for complex data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import aslinearoperator, operator_norm

__all__ = [
    "SolverOptions",
    "RecoveryResult",
    "SparseSignal",
    "complex_sign",
    "soft_threshold",
    "basis_pursuit",
    "check_recovery",
    "psnr",
]


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-9
    change_tol: float = 1e-9
    max_iter: int = 50_000
    success_tol: float = 1e-5
    check_every: int = 10
    polish: bool = True


@dataclass
class SparseSignal:
    n: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=int)
        self.values = np.asarray(self.values, dtype=complex)
        if self.support.size != self.values.size:
            raise ValueError("support and values differ in length")
        if np.any(self.values == 0):
            raise ValueError("values must be nonzero on the support")

    @property
    def s(self) -> int:
        return self.support.size

    def dense(self) -> np.ndarray:
        x = np.zeros(self.n, dtype=complex)
        x[self.support] = self.values
        return x


@dataclass
class RecoveryResult:
    estimate: np.ndarray
    iterations: int
    residual: float
    objective: float
    converged: bool
    relative_error: float | None = None
    success: bool | None = None
    certified: bool = False


def complex_sign(x):
    """``x/|x|`` elementwise, with ``sign(0) = 0``."""
    x = np.asarray(x, dtype=complex)
    mag = np.abs(x)
    return np.where(mag > 0, x / np.where(mag > 0, mag, 1.0), 0.0)


def soft_threshold(x, tau):
    """Shrink moduli by ``tau``, keep phases."""
    mag = np.abs(x)
    return np.where(mag > tau, (1.0 - tau / np.where(mag > 0, mag, 1.0)) * x, 0.0)


def basis_pursuit(A, y, opts: SolverOptions | None = None, reference=None) -> RecoveryResult:
    """Solve basis pursuit with a primal-dual (Chambolle-Pock) iteration.

    The primal step is complex soft-thresholding, the dual step handles the
    equality constraint.  Step sizes come from ``||A||_2``.  The iteration stops
    once ``||A z - y|| <= feas_tol ||y||`` and the iterate moves by at most
    ``change_tol`` (relative), or at ``max_iter`` with ``converged=False``.

    With ``opts.polish``, whenever the support of the iterate is unchanged
    between two checks, the least-squares point on that support is tried.
    It is accepted only with an optimality certificate: the dual iterate,
    corrected to match the sign pattern on the support, must have modulus at
    most 1 off the support.  Accepted results have ``certified=True``.
    """
    opts = opts or SolverOptions()
    A = aslinearoperator(A)
    y = np.asarray(y, dtype=complex)
    ny = np.linalg.norm(y)
    if ny == 0:
        return _finish(np.zeros(A.cols, dtype=complex), 0, 0.0, True, reference, opts)

    L = operator_norm(A, tol=1e-6)
    if L == 0:
        raise ValueError("zero operator")
    tau = sigma = 0.99 / L

    fwd, adj = A._matvec, A._rmatvec
    z = adj(y) / L**2
    z_bar = z.copy()
    u = np.zeros_like(y)
    residual = np.inf
    last_support = None
    for it in range(1, opts.max_iter + 1):
        u = u + sigma * (fwd(z_bar) - y)
        z_new = soft_threshold(z - tau * adj(u), tau)
        z_bar = 2 * z_new - z
        if it % opts.check_every == 0:
            change = np.linalg.norm(z_new - z) / max(1.0, np.linalg.norm(z_new))
            residual = np.linalg.norm(fwd(z_new) - y)
            if residual <= opts.feas_tol * ny and change <= opts.change_tol:
                return _finish(z_new, it, residual, True, reference, opts)
            if opts.polish:
                support = np.flatnonzero(z_new)
                if last_support is not None and np.array_equal(support, last_support):
                    polished = _polish(A, y, u, support, opts.feas_tol * ny)
                    if polished is not None:
                        res = _finish(polished, it, np.linalg.norm(fwd(polished) - y), True, reference, opts)
                        res.certified = True
                        return res
                last_support = support
        z = z_new
    residual = np.linalg.norm(fwd(z) - y)
    return _finish(z, opts.max_iter, residual, False, reference, opts)


def _polish(A, y, u, support, feas_abs):
    """Least-squares point on ``support`` if it passes the KKT check, else None."""
    if support.size == 0 or support.size > A.rows:
        return None
    cols = A.columns(support)
    sol, _, rank, _ = np.linalg.lstsq(cols, y, rcond=None)
    if rank < support.size or np.any(sol == 0):
        return None
    if np.linalg.norm(cols @ sol - y) > feas_abs:
        return None
    # At a fixed point -A^H u lies in the subdifferential of ||.||_1.
    w = -u
    sign = sol / np.abs(sol)
    gram = cols.conj().T @ cols
    w = w + cols @ np.linalg.solve(gram, sign - cols.conj().T @ w)
    corr = np.abs(A._rmatvec(w))
    corr[support] = 0.0
    if corr.max() > 1.0 + 1e-10:
        return None
    z = np.zeros(A.cols, dtype=complex)
    z[support] = sol
    return z


def _finish(z, it, residual, converged, reference, opts):
    res = RecoveryResult(z, it, float(residual), float(np.sum(np.abs(z))), converged)
    if reference is not None:
        res.success, res.relative_error = check_recovery(reference, res, opts.success_tol)
    return res


def check_recovery(x, result, tol: float = 1e-5):
    """Return ``(success, relative_error)`` of an estimate against ``x``.

    For ``x = 0`` the error is ``||estimate||`` itself.
    """
    if isinstance(x, SparseSignal):
        x = x.dense()
    x = np.asarray(x, dtype=complex)
    est = result.estimate if isinstance(result, RecoveryResult) else np.asarray(result)
    if est.shape != x.shape:
        raise ValueError("estimate and reference differ in length")
    nx = np.linalg.norm(x)
    err = float(np.linalg.norm(est - x) / nx) if nx > 0 else float(np.linalg.norm(est))
    return err <= tol, err


def psnr(reference, estimate, peak: float) -> float:
    """``10 log10(peak^2 n / ||ref - est||^2)`` in dB; ``inf`` when identical."""
    if peak <= 0:
        raise ValueError("peak must be positive")
    ref = np.asarray(reference, dtype=float).ravel()
    est = np.asarray(estimate, dtype=float).ravel()
    if ref.shape != est.shape:
        raise ValueError("images differ in size")
    err = float(np.sum((ref - est) ** 2))
    if err == 0:
        return math.inf
    return 10.0 * math.log10(peak**2 * ref.size / err)
