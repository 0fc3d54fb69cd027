"""Block-coherence quantities of a dictionary under a drawing distribution.

For a support ``S`` and the random block ``B = B_k / sqrt(pi_k)``:

* ``mu1`` bounds ``||B_S^H B_S||``,
* ``mu2`` bounds ``sqrt(s) max_{i not in S} ||B_S^H B e_i||``,
* ``mu3`` bounds ``s max_{i not in S} ||E[B_S^H (B e_i)(B e_i)^H B_S]||``,
* ``mu4`` bounds ``||B^H B||_{1->inf}`` (largest entry modulus),

and ``gamma = max(mu1, mu2, mu3)``.  Deterministic dictionaries give exact
values.  Gaussian generators report Monte-Carlo quantiles for the
almost-sure bounds and the closed form ``s/p`` for ``mu3``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .blocks import BlockDictionary, DrawingDistribution
from .operators import aslinearoperator

__all__ = [
    "THEOREM_CONSTANT",
    "PROOF_CONSTANT",
    "support_set",
    "complement",
    "CoherenceReport",
    "mu1",
    "mu2",
    "mu3",
    "mu3_monte_carlo",
    "mu4",
    "gamma",
    "block_sup_norms",
    "sup_norm_1_to_inf",
    "optimal_pi",
    "required_blocks",
    "required_blocks_proof",
    "Upsilon",
    "upsilon_pdg",
]

THEOREM_CONSTANT = 3 * 534
PROOF_CONSTANT = 534

_CHUNK = 2_000_000


def support_set(indices, n: int) -> np.ndarray:
    """Validate a support: strictly increasing 0-based indices in ``[0, n)``."""
    S = np.asarray(indices, dtype=int).ravel()
    if S.size == 0:
        raise ValueError("support must be nonempty")
    if np.unique(S).size != S.size:
        raise ValueError("support has duplicate indices")
    if S.min() < 0 or S.max() >= n:
        raise ValueError(f"support index out of range 0..{n - 1}")
    return np.sort(S)


def complement(S, n: int) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[S] = False
    return np.flatnonzero(mask)


def _pi(dictionary: BlockDictionary, pi) -> np.ndarray:
    if pi is None:
        return np.full(dictionary.M, 1.0 / dictionary.M)
    probs = pi.probabilities if isinstance(pi, DrawingDistribution) else np.asarray(pi, float)
    if probs.size != dictionary.M:
        raise ValueError(f"distribution has {probs.size} entries, dictionary has {dictionary.M} blocks")
    if np.any(probs <= 0):
        raise ValueError("zero-probability block")
    return probs


def _spectral_sq(mat) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2) ** 2)


@dataclass
class CoherenceReport:
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    gamma: float
    s: int
    mode: str = "exact"
    trials: int | None = None
    quantile: float | None = None
    argmax: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# --- deterministic dictionaries -------------------------------------------


def _mu1_values(dictionary, S):
    return np.array([_spectral_sq(b[:, S]) for b in dictionary.dense_blocks])


def _cross_chunks(dictionary, S, Sc):
    """Yield ``(cols, C)`` with ``C[k] = B_{k,S}^H B_k[:, cols]``, shape ``(M, s, len(cols))``."""
    M, s = dictionary.M, S.size
    step = max(1, _CHUNK // max(1, M * s))
    blocks = dictionary.dense_blocks
    for lo in range(0, Sc.size, step):
        cols = Sc[lo : lo + step]
        C = np.empty((M, s, cols.size), dtype=complex)
        for k, b in enumerate(blocks):
            C[k] = b[:, S].conj().T @ b[:, cols]
        yield cols, C


def _require_deterministic(dictionary):
    if dictionary.is_gaussian:
        raise TypeError("use gamma(...) with trials for Gaussian dictionaries")


def mu1(dictionary: BlockDictionary, pi, S) -> float:
    """``max_k ||B_{k,S}^H B_{k,S}|| / pi_k``."""
    _require_deterministic(dictionary)
    S = support_set(S, dictionary.n)
    return float(np.max(_mu1_values(dictionary, S) / _pi(dictionary, pi)))


def _mu2_mu3(dictionary, pi, S):
    S = support_set(S, dictionary.n)
    Sc = complement(S, dictionary.n)
    if Sc.size == 0:
        raise ValueError("support complement is empty")
    probs = _pi(dictionary, pi)
    s = S.size
    best2, arg2 = -1.0, None
    best3, arg3 = -1.0, None
    for cols, C in _cross_chunks(dictionary, S, Sc):
        norms = np.linalg.norm(C, axis=1) / probs[:, None]  # (M, len(cols))
        k, j = np.unravel_index(np.argmax(norms), norms.shape)
        if norms[k, j] > best2:
            best2, arg2 = float(norms[k, j]), (int(k), int(cols[j]))
        # sum_k c c^H / pi_k = W^H W with W[k] = c^H / sqrt(pi_k)
        W = (C / np.sqrt(probs)[:, None, None]).transpose(2, 0, 1)
        sv = np.linalg.svd(W, compute_uv=False)[:, 0] ** 2
        j = int(np.argmax(sv))
        if sv[j] > best3:
            best3, arg3 = float(sv[j]), int(cols[j])
    return math.sqrt(s) * best2, arg2, s * best3, arg3


def mu2(dictionary: BlockDictionary, pi, S) -> float:
    """``sqrt(s) max_k max_{i not in S} ||B_{k,S}^H B_k e_i|| / pi_k``."""
    _require_deterministic(dictionary)
    return _mu2_mu3(dictionary, pi, S)[0]


def mu3(dictionary: BlockDictionary, pi, S) -> float:
    """``s max_{i not in S} ||sum_k B_{k,S}^H b_{k,i} b_{k,i}^H B_{k,S} / pi_k||``.

    For a Gaussian generator the closed form ``s/p`` is returned.
    """
    if dictionary.is_gaussian:
        S = support_set(S, dictionary.n)
        return S.size / dictionary.p
    return _mu2_mu3(dictionary, pi, S)[2]


def sup_norm_1_to_inf(mat) -> float:
    """``||G||_{1->inf}`` of a matrix: its largest entry modulus."""
    return float(np.max(np.abs(mat)))


def block_sup_norms(dictionary: BlockDictionary) -> np.ndarray:
    """``||B_k^H B_k||_{1->inf}`` for every block.

    The Gram's largest entry sits on its diagonal (Cauchy-Schwarz), so this is
    the largest squared column norm of ``B_k``.
    """
    _require_deterministic(dictionary)
    return np.array([np.max(np.sum(np.abs(b) ** 2, axis=0)) for b in dictionary.dense_blocks])


def mu4(dictionary: BlockDictionary, pi) -> float:
    _require_deterministic(dictionary)
    return float(np.max(block_sup_norms(dictionary) / _pi(dictionary, pi)))


def optimal_pi(dictionary: BlockDictionary) -> DrawingDistribution:
    """Distribution proportional to ``||B_j^H B_j||_{1->inf}``.

    It equalizes ``||B_j^H B_j||_{1->inf} / pi_j`` across blocks, which
    minimizes the worst ratio ``mu4``.
    """
    w = block_sup_norms(dictionary)
    if not np.all(w > 0):
        raise ValueError("a block has an all-zero Gram")
    return DrawingDistribution(w / w.sum())


# --- Gaussian generators ----------------------------------------------------


def _gaussian_samples(dictionary, S, trials, seed):
    S = support_set(S, dictionary.n)
    Sc = complement(S, dictionary.n)
    s = S.size
    out = np.empty((trials, 3))
    for t in range(trials):
        B = dictionary.gaussian_block(seed, t)
        BS = B[:, S]
        out[t, 0] = _spectral_sq(BS)
        out[t, 1] = math.sqrt(s) * np.max(np.linalg.norm(BS.T @ B[:, Sc], axis=0)) if Sc.size else 0.0
        out[t, 2] = np.max(np.sum(B**2, axis=0))
    return out


def mu3_monte_carlo(dictionary: BlockDictionary, S, trials: int = 10_000, seed: int = 0) -> float:
    """Sample-mean estimate of ``mu3`` for a Gaussian generator.

    The expectation is the same for every off-support column (the columns
    are exchangeable), so the estimate pools all of them.
    """
    if not dictionary.is_gaussian:
        raise TypeError("mu3_monte_carlo is the Gaussian cross-check")
    S = support_set(S, dictionary.n)
    Sc = complement(S, dictionary.n)
    acc = np.zeros((S.size, S.size))
    for t in range(trials):
        B = dictionary.gaussian_block(seed, t)
        C = B[:, S].T @ B[:, Sc]
        acc += C @ C.T
    acc /= trials * Sc.size
    return S.size * float(np.linalg.norm(acc, 2))


def gamma(
    dictionary: BlockDictionary,
    pi=None,
    S=None,
    *,
    trials: int = 10_000,
    quantile: float = 0.99,
    seed: int = 0,
) -> CoherenceReport:
    """All coherence quantities for support ``S`` in one report."""
    if dictionary.is_gaussian:
        S = support_set(S, dictionary.n)
        samples = _gaussian_samples(dictionary, S, trials, seed)
        q1, q2, q4 = np.quantile(samples, quantile, axis=0)
        m3 = S.size / dictionary.p
        return CoherenceReport(
            mu1=float(q1),
            mu2=float(q2),
            mu3=m3,
            mu4=float(q4),
            gamma=float(max(q1, q2, m3)),
            s=int(S.size),
            mode="monte-carlo",
            trials=trials,
            quantile=quantile,
        )

    S = support_set(S, dictionary.n)
    probs = _pi(dictionary, pi)
    v1 = _mu1_values(dictionary, S) / probs
    m2, arg2, m3, arg3 = _mu2_mu3(dictionary, probs, S)
    sup = block_sup_norms(dictionary) / probs
    m1 = float(np.max(v1))
    return CoherenceReport(
        mu1=m1,
        mu2=m2,
        mu3=m3,
        mu4=float(np.max(sup)),
        gamma=max(m1, m2, m3),
        s=int(S.size),
        argmax={
            "mu1": int(np.argmax(v1)),
            "mu2": list(arg2),
            "mu3": arg3,
            "mu4": int(np.argmax(sup)),
        },
    )


# --- block-count bounds ------------------------------------------------------


def required_blocks(gamma: float, n: int, eps: float, c: float = THEOREM_CONSTANT) -> float:
    """``c * gamma * log(4n) * log(12/eps)``; callers round up."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return c * gamma * math.log(4 * n) * math.log(12 / eps)


def required_blocks_proof(gamma: float, n: int, s: int, eps: float, c: float = PROOF_CONSTANT) -> float:
    """Two-term bound ``c*gamma*(2 log(4n) log(12/eps) + log(s) log(12 e log(s)/eps))``.

    The second term vanishes for ``s = 1``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    first = 2 * math.log(4 * n) * math.log(12 / eps)
    second = 0.0
    if s > 1:
        second = math.log(s) * math.log(12 * math.e * math.log(s) / eps)
    return c * gamma * (first + second)


# --- comparison quantity ----------------------------------------------------


class Upsilon(NamedTuple):
    value: float
    exact: bool
    upper_bound: float
    method: str


def _sign_patterns(p, chunk=1 << 14):
    # first sign fixed to +1: sigma and -sigma give the same norm
    total = 1 << (p - 1)
    bits = np.arange(p - 1)
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk))
        signs = 1.0 - 2.0 * ((codes[:, None] >> bits) & 1)
        yield np.hstack([np.ones((codes.size, 1)), signs])


def _phase_ascent(mat, sigma, iters=200):
    val = 0.0
    for _ in range(iters):
        x = mat.conj().T @ sigma
        nx = np.linalg.norm(x)
        if nx == 0:
            break
        y = mat @ (x / nx)
        new = float(np.sum(np.abs(y)))
        sigma = np.where(np.abs(y) > 0, y / np.where(np.abs(y) > 0, np.abs(y), 1), 1.0)
        if new <= val * (1 + 1e-15):
            val = max(val, new)
            break
        val = new
    return val


def upsilon_pdg(a0, S, block, max_exact_rows: int = 20, restarts: int = 32, seed: int = 0) -> Upsilon:
    """``||Bbar_S||_{2->1}`` with ``Bbar`` the block with unit-norm rows.

    Real blocks up to ``max_exact_rows`` rows are solved exactly by sign
    enumeration.  Complex blocks start from the best sign patterns and are
    refined by alternating phase ascent; the result is a lower estimate and is
    flagged as inexact.  Larger blocks return the upper bound
    ``sqrt(p) ||Bbar_S||_{2->2}``.
    """
    a0 = aslinearoperator(a0)
    mat = aslinearoperator(block).to_dense()
    if mat.shape[1] != a0.cols:
        raise ValueError("block and A0 must have the same column count")
    S = support_set(S, mat.shape[1])
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0):
        raise ValueError("block has a zero row")
    bar = (mat / norms[:, None])[:, S]
    p = bar.shape[0]
    upper = min(math.sqrt(p) * float(np.linalg.norm(bar, 2)), float(np.sum(np.linalg.norm(bar, axis=1))))
    if p > max_exact_rows:
        return Upsilon(upper, False, upper, "upper-bound")

    is_real = np.allclose(bar.imag, 0.0, atol=1e-14)
    best, best_sigmas = 0.0, []
    for sig in _sign_patterns(p):
        vals = np.linalg.norm(sig @ bar.conj(), axis=1)
        top = np.argsort(vals)[-4:]
        best_sigmas.extend((float(vals[i]), sig[i]) for i in top)
        best = max(best, float(vals.max()))
        best_sigmas = sorted(best_sigmas, key=lambda t: t[0])[-8:]
    if is_real:
        return Upsilon(best, True, upper, "sign-enumeration")

    rng = np.random.default_rng(seed)
    starts = [sig.astype(complex) for _, sig in best_sigmas]
    starts += [np.exp(2j * np.pi * rng.random(p)) for _ in range(restarts)]
    refined = max(_phase_ascent(bar, s0) for s0 in starts)
    return Upsilon(max(best, refined), False, upper, "phase-ascent")
