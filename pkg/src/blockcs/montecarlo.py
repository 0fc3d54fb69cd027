"""Monte-Carlo checks: deviation-inequality tails, phase transitions, Gaussian scaling.

Every trial is seeded by ``(master seed, cell index, trial index)`` so any
cell can be replayed on its own.  Functions accept an optional ``map_fn``
(e.g. ``executor.map``) for parallel execution; results do not depend on it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binomtest, chi2

from . import coherence as coh
from .blocks import BlockDictionary, DrawingDistribution
from .certificates import identifiability_rank_test, pathological_signal, reduced_line_matrix
from .sampling import draw_blocks, draw_distinct_blocks
from .solver import SolverOptions, SparseSignal, basis_pursuit

__all__ = [
    "EVENTS",
    "TailCheckReport",
    "tail_bound",
    "tail_check",
    "wilson_interval",
    "PhaseCell",
    "PhaseDiagram",
    "random_signal",
    "phase_transition",
    "gaussian_gamma_scaling",
    "chi_square_quantile_check",
]

EVENTS = ("E1", "E2", "E3", "E4")


def wilson_interval(k: int, n: int, confidence: float = 0.95):
    ci = binomtest(int(k), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _seed(*parts) -> np.random.Generator:
    return np.random.default_rng([int(p) for p in parts])


def _unit_vector(rng, s):
    v = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    return v / np.linalg.norm(v)


def tail_bound(event: str, threshold: float, m: int, s: int, n: int, mu1: float, mu2: float, mu3: float) -> float:
    """Right-hand side of the deviation inequality for ``event``.

    ``threshold`` is ``delta`` for E1 and ``t`` for E2-E4.
    """
    x = threshold
    if event == "E1":
        denom = mu1 + max(mu1 - 1.0, 1.0) * x / 3.0
        return 2 * s * math.exp(-(m * x**2 / 2) / denom)
    if event == "E2":
        a = max(mu1 - 1.0, 0.0)
        denom = a + 2 * math.sqrt(a / m) * mu1 + mu1 * x / 3.0
        return math.exp(-(m * x**2 / 2) / denom) if denom > 0 else 0.0
    if event == "E3":
        denom = mu3 / s + mu2 / math.sqrt(s) * x / 3.0
        return 4 * n * math.exp(-(m * x**2 / 4) / denom) if denom > 0 else 0.0
    if event == "E4":
        return n * math.exp(-((math.sqrt(m / mu1) * x - 1.0) ** 2) / 4.0)
    raise ValueError(f"unknown event {event!r}")


def _event_statistic(event, mat, S, Sc, w):
    AS = mat[:, S]
    if event == "E1":
        return float(np.linalg.norm(AS.conj().T @ AS - np.eye(S.size), 2))
    if event == "E2":
        return float(np.linalg.norm(AS.conj().T @ (AS @ w) - w))
    if event == "E3":
        return float(np.max(np.abs(mat[:, Sc].conj().T @ (AS @ w)))) if Sc.size else 0.0
    if event == "E4":
        return float(np.max(np.linalg.norm(AS.conj().T @ mat[:, Sc], axis=0))) if Sc.size else 0.0
    raise ValueError(f"unknown event {event!r}")


@dataclass
class TailCheckReport:
    event: str
    threshold: float
    m: int
    s: int
    trials: int
    hits: int
    frequency: float
    interval: tuple
    bound: float
    passed: bool
    mu1: float
    mu2: float
    mu3: float
    note: str = ""

    def to_dict(self):
        return asdict(self)


def tail_check(
    event: str,
    dictionary: BlockDictionary,
    pi,
    S,
    m: int,
    threshold: float,
    trials: int,
    seed: int,
    report: coh.CoherenceReport | None = None,
) -> TailCheckReport:
    """Empirical frequency of a deviation event against its theoretical bound.

    The event is counted when the statistic reaches the level (``delta`` for
    E1, ``(sqrt((mu1-1)/m) + t)`` for E2, ``t`` for E3/E4 with unit test
    vectors).  A check passes when the Wilson 95% lower edge does not exceed
    the bound.  E4 is only stated for ``0 < t < mu1/mu2``.
    """
    if event not in EVENTS:
        raise ValueError(f"unknown event {event!r}")
    n = dictionary.n
    S = coh.support_set(S, n)
    Sc = coh.complement(S, n)
    s = S.size
    if report is None:
        report = coh.gamma(dictionary, pi, S, seed=seed)
    mu1, mu2, mu3 = report.mu1, report.mu2, report.mu3
    note = ""
    if event == "E4":
        if threshold <= 0 or (mu2 > 0 and threshold >= mu1 / mu2):
            raise ValueError(f"E4 needs 0 < t < mu1/mu2 = {mu1 / mu2 if mu2 else math.inf:.6g}")
        note = "bound does not involve mu2; mu2 only limits the admissible t"

    level = threshold
    if event == "E2":
        level = math.sqrt(max(mu1 - 1.0, 0.0) / m) + threshold
    w = _unit_vector(_seed(seed, 0xE2E3), s)

    hits = 0
    for t in range(trials):
        A = draw_blocks(dictionary, pi, m, _trial_seed(seed, t))
        if _event_statistic(event, A.matrix, S, Sc, w) >= level:
            hits += 1
    lo, hi = wilson_interval(hits, trials)
    bound = tail_bound(event, threshold, m, s, n, mu1, mu2, mu3)
    return TailCheckReport(
        event, float(threshold), m, s, trials, hits, hits / trials, (lo, hi), bound, lo <= bound, mu1, mu2, mu3, note
    )


def _trial_seed(master, *parts):
    return int(np.random.SeedSequence([int(master), *map(int, parts)]).generate_state(1, np.uint64)[0])


# --- phase transitions ------------------------------------------------------


def random_signal(n: int, s: int, rng: np.random.Generator) -> SparseSignal:
    """Uniform random support, unit-modulus values with uniform random phases."""
    support = np.sort(rng.choice(n, s, replace=False))
    return SparseSignal(n, support, np.exp(2j * np.pi * rng.random(s)))


@dataclass
class PhaseCell:
    s: int
    m: int
    trials: int
    successes: int
    nonconverged: int
    identifiable_trials: int | None = None

    @property
    def frequency(self) -> float:
        return self.successes / self.trials


CSV_COLUMNS = ("s", "m", "trials", "successes", "frequency", "nonconverged", "identifiable_trials")


@dataclass
class PhaseDiagram:
    cells: list
    provenance: dict = field(default_factory=dict)

    def frequency(self, s, m) -> float:
        for c in self.cells:
            if c.s == s and c.m == m:
                return c.frequency
        raise KeyError((s, m))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cells:
            ident = "" if c.identifiable_trials is None else c.identifiable_trials
            writer.writerow([c.s, c.m, c.trials, c.successes, f"{c.frequency:.17g}", c.nonconverged, ident])
        return buf.getvalue()

    def to_dict(self):
        return {"provenance": self.provenance, "cells": [asdict(c) | {"frequency": c.frequency} for c in self.cells]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _run_trial(args):
    dictionary, pi, s, m, seed, cell, trial, signal_class, distinct, opts = args
    rng = _seed(seed, cell, trial)
    if signal_class == "pathological":
        root = dictionary.grid[0]
        x = pathological_signal(root, s, int(rng.integers(2**63)))
    else:
        x = random_signal(dictionary.n, s, rng)
    draw_seed = int(rng.integers(2**63))
    if distinct:
        A = draw_distinct_blocks(dictionary, pi, m, draw_seed)
    else:
        A = draw_blocks(dictionary, pi, m, draw_seed)
    xd = x.dense()
    res = basis_pursuit(A.operator, A.matvec(xd), opts, reference=xd)
    ident = None
    if signal_class == "pathological":
        reduced = reduced_line_matrix(A)
        k = min(2 * s, reduced.shape[1])
        if k == 2 * s:
            ident = identifiability_rank_test(reduced, s).identifiable
        else:
            ident = bool(np.linalg.matrix_rank(reduced) == reduced.shape[1])
    return bool(res.success), not res.converged, ident


def phase_transition(
    dictionary: BlockDictionary,
    pi,
    s_values,
    m_values,
    trials: int,
    seed: int,
    signal_class: str = "generic",
    distinct: bool = False,
    opts: SolverOptions | None = None,
    map_fn=map,
) -> PhaseDiagram:
    """Recovery frequency of basis pursuit over a grid of ``(s, m)``.

    ``signal_class="pathological"`` draws ``alpha (x) e_0`` signals and needs
    a line-block dictionary; each trial then also records whether the reduced
    factor ``Psi~_K`` identifies every ``s``-sparse ``alpha``.
    ``distinct=True`` conditions the draw on ``m`` distinct blocks.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s_values, m_values = list(s_values), list(m_values)
    if not s_values or not m_values:
        raise ValueError("empty s or m grid")
    if signal_class not in ("generic", "pathological"):
        raise ValueError(f"unknown signal class {signal_class!r}")
    if signal_class == "pathological" and dictionary.factor is None:
        raise ValueError("pathological signals need a line-block dictionary")
    opts = opts or SolverOptions()
    cells = []
    for ci, (s, m) in enumerate((s, m) for s in s_values for m in m_values):
        args = [(dictionary, pi, s, m, seed, ci, t, signal_class, distinct, opts) for t in range(trials)]
        results = list(map_fn(_run_trial, args))
        ident = [r[2] for r in results]
        cells.append(
            PhaseCell(
                s,
                m,
                trials,
                sum(r[0] for r in results),
                sum(r[1] for r in results),
                None if ident[0] is None else int(sum(ident)),
            )
        )
    prov = {
        "dictionary": dictionary.describe(),
        "probabilities": None if pi is None else np.asarray(getattr(pi, "probabilities", pi)).tolist(),
        "s_values": s_values,
        "m_values": m_values,
        "trials": trials,
        "seed": seed,
        "signal_class": signal_class,
        "distinct": distinct,
        "solver": asdict(opts),
    }
    return PhaseDiagram(cells, prov)


# --- Gaussian blocks --------------------------------------------------------


def gaussian_gamma_scaling(s_values, p_values, n: int, trials: int, seed: int, quantile: float = 0.99) -> dict:
    """Monte-Carlo ``gamma`` of Gaussian blocks over a grid of ``(s, p)``.

    Returns the table rows and the least-squares fit ``gamma ~ a (s/p) log(s)``
    over the rows with ``s > 1``.
    """
    from .blocks import gaussian_dictionary

    rows = []
    for ci, (s, p) in enumerate((s, p) for s in s_values for p in p_values):
        if s >= n:
            raise ValueError("need s < n")
        d = gaussian_dictionary(p, n)
        rep = coh.gamma(d, None, np.arange(s), trials=trials, quantile=quantile, seed=_trial_seed(seed, ci))
        rows.append({"s": s, "p": p, "mu1": rep.mu1, "mu2": rep.mu2, "mu3": rep.mu3, "gamma": rep.gamma})
    model = np.array([r["s"] / r["p"] * math.log(r["s"]) for r in rows])
    g = np.array([r["gamma"] for r in rows])
    keep = model > 0
    if keep.any():
        a = float(model[keep] @ g[keep] / (model[keep] @ model[keep]))
        resid = float(np.linalg.norm(g[keep] - a * model[keep]) / np.linalg.norm(g[keep]))
    else:
        a, resid = math.nan, math.nan
    return {"rows": rows, "fit_coefficient": a, "fit_relative_residual": resid, "n": n, "trials": trials}


def chi_square_quantile_check(p: int, n: int, trials: int, seed: int, quantile: float = 0.99) -> dict:
    """For ``s = 1`` the ``mu1`` sample is ``||B e_0||^2 ~ chi2_p / p``.

    Compares the dictionary-based quantile to a direct chi-square simulation
    and to the exact chi-square quantile.
    """
    from .blocks import gaussian_dictionary

    rep = coh.gamma(gaussian_dictionary(p, n), None, [0], trials=trials, quantile=quantile, seed=seed)
    direct = _seed(seed, 0xC415).chisquare(p, size=trials) / p
    return {
        "dictionary_quantile": rep.mu1,
        "simulated_quantile": float(np.quantile(direct, quantile)),
        "exact_quantile": float(chi2.ppf(quantile, p) / p),
    }
