"""Exact-recovery certificates and identifiability tests.

The inexact-duality conditions for a support ``S`` and sign pattern
``e = sign(x_S)`` are

* ``||(A_S^H A_S)^{-1}|| <= 2`` and ``max_{i not in S} ||A_S^H A e_i|| <= 1``;
* a vector ``v`` in the row space of ``A`` with ``||v_S - e|| <= 1/4`` and
  ``||v_{S^c}||_inf <= 1/4``.

:func:`golfing_certificate` builds ``v`` group by group from disjoint
slices of the drawn blocks.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .coherence import complement, support_set
from .operators import aslinearoperator
from .sampling import SampledOperator
from .solver import SparseSignal

__all__ = [
    "GolfingSchedule",
    "CertificateReport",
    "DualityConditions",
    "duality_conditions",
    "golfing_schedule",
    "golfing_certificate",
    "IdentifiabilityResult",
    "identifiability_rank_test",
    "pathological_signal",
    "reduced_line_matrix",
    "lift_column_signal",
]

INV_NORM_MAX = 2.0
MAX_COL_MAX = 1.0
DUAL_ON_MAX = 0.25
DUAL_OFF_MAX = 0.25


def _dense(A):
    if isinstance(A, SampledOperator):
        return A.matrix
    if isinstance(A, np.ndarray):
        return A.astype(complex, copy=False)
    return aslinearoperator(A).to_dense()


@dataclass
class DualityConditions:
    inv_norm: float
    max_col: float
    inv_ok: bool
    col_ok: bool


def duality_conditions(A, S) -> DualityConditions:
    """``||(A_S^H A_S)^{-1}||`` and ``max_{i not in S} ||A_S^H A e_i||``.

    A singular ``A_S^H A_S`` gives ``inv_norm = inf`` (reported, not raised).
    """
    mat = _dense(A)
    n = mat.shape[1]
    S = support_set(S, n)
    AS = mat[:, S]
    gram = AS.conj().T @ AS
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 1e-12 * max(1.0, eig[-1]):
        inv_norm = math.inf
    else:
        inv_norm = float(1.0 / eig[0])
    Sc = complement(S, n)
    max_col = float(np.max(np.linalg.norm(AS.conj().T @ mat[:, Sc], axis=0))) if Sc.size else 0.0
    return DualityConditions(inv_norm, max_col, inv_norm <= INV_NORM_MAX, max_col <= MAX_COL_MAX)


@dataclass
class GolfingSchedule:
    """Group sizes and per-step targets for the golfing construction.

    ``r[l]`` is the targeted contraction of ``||w||`` at step ``l`` (before
    the ``sqrt((mu1 - 1)/m_l)`` term); ``t[l]`` bounds the off-support
    sup-norm produced at step ``l`` relative to ``||w||``.
    """

    L: int
    sizes: list
    r: list
    t: list
    s: int
    n: int
    eps: float
    note: str = (
        "r1 = r2 = 1/(4 sqrt(log 4n)) as defined; the follow-up bound is "
        "stated with sqrt(log n), which is slightly looser"
    )

    def effective_contractions(self, mu1: float) -> list:
        """``r'_l = sqrt((mu1 - 1)/m_l) + r_l``."""
        return [math.sqrt(max(mu1 - 1.0, 0.0) / m) + r for m, r in zip(self.sizes, self.r)]

    def to_dict(self):
        return asdict(self)


def golfing_schedule(s: int, n: int, m: int, eps: float = 0.01) -> GolfingSchedule:
    """Golfing parameters for sparsity ``s``, dimension ``n`` and ``m`` draws.

    ``L = 2 + ceil(log(s) / (2 log 2))``.  The two first groups get the share
    of ``m`` matching weight ``log(4n) log(2/eps)`` each, the others weight
    ``log(2L/eps)``; leftover draws go to the earliest of groups ``3..L``.
    """
    if s < 1 or n < 1:
        raise ValueError("s and n must be positive")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    L = 2 + math.ceil(math.log(s) / (2 * math.log(2)))
    if m < L:
        raise ValueError(f"need at least L={L} draws, got m={m}")
    w_head = math.log(4 * n) * math.log(2 / eps)
    w_tail = math.log(2 * L / eps)
    if L == 2:
        sizes = [m - m // 2, m // 2]
    else:
        head = int(math.floor(m * w_head / (2 * w_head + (L - 2) * w_tail)))
        head = max(1, min(head, (m - (L - 2)) // 2))
        rest = m - 2 * head
        base, extra = divmod(rest, L - 2)
        sizes = [head, head] + [base + (1 if j < extra else 0) for j in range(L - 2)]
    r_head = 1.0 / (4.0 * math.sqrt(math.log(4 * n)))
    r = [r_head, r_head] + [0.25] * (L - 2)
    t = [1.0 / (8.0 * math.sqrt(s))] * 2 + [math.log(4 * n) / (8.0 * math.sqrt(s))] * (L - 2)
    return GolfingSchedule(L, sizes, r, t, s, n, eps)


@dataclass
class CertificateReport:
    inv_norm: float
    max_col: float
    vS_err: float
    vSc_inf: float
    w_norms: list
    step_contractions: list
    v: np.ndarray = field(repr=False)
    inv_ok: bool = False
    col_ok: bool = False
    vS_ok: bool = False
    vSc_ok: bool = False

    @property
    def all_pass(self) -> bool:
        return self.inv_ok and self.col_ok and self.vS_ok and self.vSc_ok

    def to_dict(self) -> dict:
        out = asdict(self)
        out["v_real"] = self.v.real.tolist()
        out["v_imag"] = self.v.imag.tolist()
        del out["v"]
        out["all_pass"] = self.all_pass
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def golfing_certificate(groups, S, e, m: int | None = None) -> CertificateReport:
    """Run the golfing recursion over ``groups`` and check all four conditions.

    Starting from ``w_0 = e``, step ``l`` adds ``u_l = (m/m_l) A_l^H A_{l,S} w_{l-1}``
    to ``v`` and sets ``w_l = w_{l-1} - (u_l)_S``.  ``w_norms`` lists
    ``||w_0||, ..., ||w_L||``; ``step_contractions`` lists
    ``||Id - (m/m_l) A_{l,S}^H A_{l,S}||`` for every step.
    """
    groups = list(groups)
    mats = [_dense(g) for g in groups]
    n = mats[0].shape[1]
    S = support_set(S, n)
    e = np.asarray(e, dtype=complex)
    if e.size != S.size:
        raise ValueError("sign vector must have one entry per support index")
    if m is None:
        m = groups[0].m_total if isinstance(groups[0], SampledOperator) else len(groups)
    sizes = [g.m if isinstance(g, SampledOperator) else 1 for g in groups]

    v = np.zeros(n, dtype=complex)
    w = e.copy()
    w_norms = [float(np.linalg.norm(w))]
    steps = []
    for mat, m_l in zip(mats, sizes):
        AS = mat[:, S]
        scale = m / m_l
        steps.append(float(np.linalg.norm(np.eye(S.size) - scale * (AS.conj().T @ AS), 2)))
        u = scale * (mat.conj().T @ (AS @ w))
        v += u
        w = w - u[S]
        w_norms.append(float(np.linalg.norm(w)))

    full = np.vstack(mats)
    dc = duality_conditions(full, S)
    Sc = complement(S, n)
    vS_err = float(np.linalg.norm(v[S] - e))
    vSc_inf = float(np.max(np.abs(v[Sc]))) if Sc.size else 0.0
    return CertificateReport(
        inv_norm=dc.inv_norm,
        max_col=dc.max_col,
        vS_err=vS_err,
        vSc_inf=vSc_inf,
        w_norms=w_norms,
        step_contractions=steps,
        v=v,
        inv_ok=dc.inv_ok,
        col_ok=dc.col_ok,
        vS_ok=vS_err <= DUAL_ON_MAX,
        vSc_ok=vSc_inf <= DUAL_OFF_MAX,
    )


# --- identifiability --------------------------------------------------------


@dataclass
class IdentifiabilityResult:
    """Outcome of the rank test on ``2s``-column submatrices.

    ``identifiable=False`` is conclusive and comes with two distinct
    ``s``-sparse vectors ``x1``, ``x2`` such that ``A x1 = A x2``.  In
    randomized mode ``identifiable=True`` is only evidence (``conclusive``
    is then False).
    """

    identifiable: bool
    conclusive: bool
    subsets_checked: int
    witness_columns: np.ndarray | None = None
    x1: np.ndarray | None = None
    x2: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {
            "identifiable": self.identifiable,
            "conclusive": self.conclusive,
            "subsets_checked": self.subsets_checked,
            "witness_columns": None if self.witness_columns is None else self.witness_columns.tolist(),
        }
        for name in ("x1", "x2"):
            x = getattr(self, name)
            out[name] = None if x is None else {"real": x.real.tolist(), "imag": x.imag.tolist()}
        return out


def _witness(mat, T, s):
    _, sv, vh = np.linalg.svd(mat[:, T])
    h_T = vh[-1].conj()
    n = mat.shape[1]
    x1 = np.zeros(n, dtype=complex)
    x2 = np.zeros(n, dtype=complex)
    x1[T[:s]] = h_T[:s]
    x2[T[s:]] = -h_T[s:]
    return x1, x2


def identifiability_rank_test(
    A, s: int, mode: str = "exhaustive", trials: int = 1000, seed: int = 0, rtol: float = 1e-10
) -> IdentifiabilityResult:
    """Check that every ``2s`` columns of ``A`` are linearly independent.

    That is equivalent to the existence of a decoder recovering every
    ``s``-sparse vector from ``A x``.  ``mode`` is ``"exhaustive"`` (all
    subsets, limited to 10**6 of them) or ``"randomized"`` (``trials`` uniform
    subsets).
    """
    mat = _dense(A)
    q, n = mat.shape
    k = 2 * s
    if s < 1 or k > n:
        raise ValueError(f"need 1 <= 2s <= n, got s={s}, n={n}")

    def deficient(T):
        sv = np.linalg.svd(mat[:, T], compute_uv=False)
        return sv.size < k or sv[-1] <= rtol * max(sv[0], 1e-300)

    if q < k:
        T = np.arange(k)
        x1, x2 = _witness(mat, T, s)
        return IdentifiabilityResult(False, True, 0, T, x1, x2)

    if mode == "exhaustive":
        if math.comb(n, k) > 10**6:
            raise ValueError(f"C({n},{k}) subsets is too many for exhaustive mode")
        subsets = (np.array(T) for T in itertools.combinations(range(n), k))
    elif mode == "randomized":
        rng = np.random.default_rng(seed)
        subsets = (np.sort(rng.choice(n, k, replace=False)) for _ in range(trials))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    checked = 0
    for T in subsets:
        checked += 1
        if deficient(T):
            x1, x2 = _witness(mat, T, s)
            return IdentifiabilityResult(False, True, checked, T, x1, x2)
    return IdentifiabilityResult(True, mode == "exhaustive", checked)


# --- separable line blocks --------------------------------------------------


def pathological_signal(sqrt_n: int, s: int, seed: int) -> SparseSignal:
    """An ``s``-sparse image supported on its first column: ``x = alpha (x) e_0``.

    ``alpha`` has a uniformly random support and unit-modulus random-phase values.
    """
    if s < 1 or s > sqrt_n:
        raise ValueError("need 1 <= s <= sqrt_n")
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(sqrt_n, s, replace=False))
    values = np.exp(2j * np.pi * rng.random(s))
    return SparseSignal(sqrt_n * sqrt_n, rows * sqrt_n, values)


def reduced_line_matrix(A: SampledOperator) -> np.ndarray:
    """The ``m x sqrt(n)`` factor ``Psi~_K`` with ``A = Psi~_K (x) Psi`` for line blocks.

    Row ``j`` is ``psi[k_j, :] / sqrt(m pi_{k_j})``.
    """
    d = A.dictionary
    if d.factor is None:
        raise ValueError("A was not drawn from a line-block dictionary")
    probs = A.distribution.probabilities
    scale = 1.0 / np.sqrt(A.m_total * probs[A.indices])
    return scale[:, None] * d.factor[A.indices]


def lift_column_signal(alpha, sqrt_n: int) -> np.ndarray:
    """``alpha (x) e_0``: place ``alpha`` in the first image column."""
    e0 = np.zeros(sqrt_n)
    e0[0] = 1.0
    return np.kron(np.asarray(alpha, dtype=complex), e0)
