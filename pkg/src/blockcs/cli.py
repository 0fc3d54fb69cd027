"""Experiment runner: ``blockcs <scenario> CONFIG.yaml [--seed N] [--output DIR]``.

Each scenario reads one YAML file (schema in ``docs/config.md``), runs with
the master seed, and writes ``<output>/<prefix>.json`` and, for tabular
results, ``<output>/<prefix>.csv``.  Every file starts with a provenance
record holding the config hash, the seed and the package version.
``replay`` reruns a config into a scratch directory and compares the data
bodies with the files already on disk.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import blocks as bl
from . import certificates as cert
from . import coherence as coh
from . import images
from . import montecarlo as mc
from . import operators as ops
from . import sampling as smp
from .solver import SolverOptions, basis_pursuit, psnr

SCENARIOS = (
    "coherence",
    "optimal-pi",
    "sample",
    "recover",
    "phase",
    "certify",
    "identify",
    "tailcheck",
    "gaussian-scaling",
)

# Keys that change where or how fast results are produced, not what they are.
NON_SEMANTIC_KEYS = ("output", "workers")


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


# --- config -----------------------------------------------------------------


def load_config(path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"no such file {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a mapping")
    return data


def config_hash(cfg: dict) -> str:
    semantic = {k: v for k, v in cfg.items() if k not in NON_SEMANTIC_KEYS}
    blob = json.dumps(semantic, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _get(cfg, key, kind, default=None, required=False):
    if key not in cfg or cfg[key] is None:
        if required:
            raise ConfigError(key, "missing")
        return default
    val = cfg[key]
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(key, f"expected an integer, got {val!r}")
    elif kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(key, f"expected a number, got {val!r}")
        val = float(val)
    elif kind is list:
        if not isinstance(val, list):
            raise ConfigError(key, f"expected a list, got {val!r}")
    elif kind is dict:
        if not isinstance(val, dict):
            raise ConfigError(key, f"expected a mapping, got {val!r}")
    elif kind is str:
        if not isinstance(val, str):
            raise ConfigError(key, f"expected a string, got {val!r}")
    return val


def _int_list(cfg, key, required=True, minimum=1):
    vals = _get(cfg, key, list, required=required)
    if vals is None:
        return None
    if not vals:
        raise ConfigError(key, "must be a non-empty list")
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            raise ConfigError(key, f"entries must be integers >= {minimum}, got {v!r}")
    return vals


def _positive_int(cfg, key, default=None, required=False):
    val = _get(cfg, key, int, default, required)
    if val is not None and val < 1:
        raise ConfigError(key, "must be >= 1")
    return val


def build_dictionary(cfg: dict) -> bl.BlockDictionary:
    """Dictionary descriptor -> :class:`BlockDictionary`.

    kinds: ``lines`` / ``rows-and-columns`` (``sqrt_n``), ``singletons`` and
    ``partition`` (``transform`` in ``dft``, ``dft2``, ``block-diag``, plus
    ``n`` or ``sqrt_n``; ``partition`` also takes ``index_sets``),
    ``gaussian`` (``p``, ``n``).
    """
    d = _get(cfg, "dictionary", dict, required=True)
    kind = d.get("kind")
    field = "dictionary.kind"
    if kind == "gaussian":
        p, n = d.get("p"), d.get("n")
        for name, v in (("p", p), ("n", n)):
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"dictionary.{name}", "must be a positive integer")
        return bl.gaussian_dictionary(p, n)
    if kind in ("lines", "rows-and-columns"):
        sqrt_n = d.get("sqrt_n")
        if not isinstance(sqrt_n, int) or sqrt_n < 2:
            raise ConfigError("dictionary.sqrt_n", "must be an integer >= 2")
        if kind == "lines":
            return bl.line_blocks(ops.dft_operator(sqrt_n))
        return bl.rows_and_columns_blocks(sqrt_n)
    if kind in ("singletons", "partition"):
        transform = d.get("transform", "dft")
        grid = None
        if transform == "dft2":
            sqrt_n = d.get("sqrt_n")
            if not isinstance(sqrt_n, int) or sqrt_n < 2:
                raise ConfigError("dictionary.sqrt_n", "must be an integer >= 2")
            a0, grid = bl.dft2_operator(sqrt_n), (sqrt_n, sqrt_n)
        elif transform in ("dft", "block-diag"):
            n = d.get("n")
            if not isinstance(n, int) or n < 2:
                raise ConfigError("dictionary.n", "must be an integer >= 2")
            a0 = ops.dft_operator(n) if transform == "dft" else ops.block_diag_example(n)
        else:
            raise ConfigError("dictionary.transform", f"unknown transform {transform!r}")
        if kind == "singletons":
            sets = [[i] for i in range(a0.rows)]
        else:
            sets = d.get("index_sets")
            if not isinstance(sets, list) or not sets:
                raise ConfigError("dictionary.index_sets", "must be a non-empty list of index lists")
        try:
            return bl.partition_blocks(a0, sets, name=f"{kind}-{transform}", grid=grid)
        except ValueError as exc:
            raise ConfigError("dictionary.index_sets", str(exc)) from None
    raise ConfigError(field, f"unknown kind {kind!r}")


def build_distribution(cfg: dict, dictionary: bl.BlockDictionary):
    if dictionary.is_gaussian:
        return None
    spec = cfg.get("distribution", "uniform")
    if spec == "uniform":
        return bl.DrawingDistribution.uniform(dictionary.M)
    if spec == "optimal":
        return coh.optimal_pi(dictionary)
    if isinstance(spec, dict) and set(spec) == {"variable_density"}:
        decay = _get(spec, "variable_density", float, required=True)
        try:
            return bl.variable_density(dictionary, decay)
        except ValueError as exc:
            raise ConfigError("distribution.variable_density", str(exc)) from None
    if isinstance(spec, list):
        if len(spec) != dictionary.M:
            raise ConfigError("distribution", f"has {len(spec)} entries, dictionary has {dictionary.M} blocks")
        try:
            return bl.DrawingDistribution.from_weights(spec)
        except (ValueError, TypeError) as exc:
            raise ConfigError("distribution", str(exc)) from None
    raise ConfigError("distribution", "expected 'uniform', 'optimal', {variable_density: decay} or a list of weights")


def solver_options(cfg: dict) -> SolverOptions:
    s = _get(cfg, "solver", dict, {})
    kw = {}
    for key, kind in (("feas_tol", float), ("change_tol", float), ("success_tol", float), ("max_iter", int)):
        if key in s:
            v = _get(s, key, kind)
            if v <= 0:
                raise ConfigError(f"solver.{key}", "must be positive")
            kw[key] = v
    return SolverOptions(**kw)


def _support(cfg, n, seed):
    sig = _get(cfg, "signal", dict, {})
    if "support" in sig:
        try:
            return coh.support_set(sig["support"], n)
        except ValueError as exc:
            raise ConfigError("signal.support", str(exc)) from None
    s = sig.get("s")
    if not isinstance(s, int) or not 1 <= s <= n:
        raise ConfigError("signal.s", f"must be an integer in 1..{n}")
    return np.sort(np.random.default_rng([seed, 0x5]).choice(n, s, replace=False))


# --- output -----------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if v is None:
        return ""
    return str(v)


class Outputs:
    """Writes provenance-stamped artifacts into one directory."""

    def __init__(self, directory, prefix, provenance):
        self.dir = Path(directory)
        self.prefix = prefix
        self.provenance = provenance
        self.written = []

    def _path(self, suffix):
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / f"{self.prefix}{suffix}"
        self.written.append(p)
        return p

    def csv(self, columns, rows, suffix=".csv"):
        buf = io.StringIO()
        for k in ("config_hash", "seed", "version", "scenario"):
            buf.write(f"# {k}={self.provenance[k]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
        self._path(suffix).write_text(buf.getvalue())

    def json(self, payload, suffix=".json"):
        body = {"provenance": self.provenance, **payload}
        self._path(suffix).write_text(json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n")

    def pgm(self, mask, suffix=".pgm"):
        smp.write_pgm(self._path(suffix), mask)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# --- scenarios --------------------------------------------------------------


def run_coherence(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    S = _support(cfg, d.n, seed)
    trials = _positive_int(cfg, "trials", 10_000)
    rep = coh.gamma(d, pi, S, trials=trials, seed=seed)
    payload = {"report": rep.to_dict(), "support": S}
    eps = _get(cfg, "eps", float, 0.01)
    payload["required_blocks"] = coh.required_blocks(rep.gamma, d.n, eps)
    payload["required_blocks_proof"] = coh.required_blocks_proof(rep.gamma, d.n, S.size, eps)
    if not d.is_gaussian:
        sup = coh.block_sup_norms(d)
        payload["block_sup_norms"] = sup
        payload["s_mu4"] = S.size * rep.mu4
        out.csv(
            ["block", "pi", "sup_norm_1_to_inf"],
            [{"block": k, "pi": pi[k], "sup_norm_1_to_inf": sup[k]} for k in range(d.M)],
        )
    out.json(payload)
    return payload


def run_optimal_pi(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    if d.is_gaussian:
        raise ConfigError("dictionary.kind", "optimal-pi needs a deterministic dictionary")
    pi = coh.optimal_pi(d)
    sup = coh.block_sup_norms(d)
    out.csv(
        ["block", "pi", "sup_norm_1_to_inf"],
        [{"block": k, "pi": pi[k], "sup_norm_1_to_inf": sup[k]} for k in range(d.M)],
    )
    payload = {"dictionary": d.describe(), "pi": pi.probabilities, "mu4": coh.mu4(d, pi)}
    out.json(payload)
    return payload


def _draw(cfg, d, pi, m, seed):
    distinct = cfg.get("distinct", False)
    if not isinstance(distinct, bool):
        raise ConfigError("distinct", "expected true or false")
    if distinct:
        return smp.draw_distinct_blocks(d, pi, m, seed)
    return smp.draw_blocks(d, pi, m, seed)


def run_sample(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    m = _positive_int(cfg, "m", required=True)
    A = _draw(cfg, d, pi, m, seed)
    payload = {"operator": A.to_dict()}
    rows = [{"draw": j, "block": int(k)} for j, k in enumerate(A.indices)]
    out.csv(["draw", "block"], rows)
    if d.grid is not None:
        mask = smp.sampling_mask(A)
        out.pgm(mask)
        payload["sampled_fraction"] = float(mask.mean())
    out.json(payload)
    return payload


def run_recover(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    if d.is_gaussian or d.grid is None:
        raise ConfigError("dictionary.kind", "recover needs a 2-D k-space dictionary (lines, rows-and-columns, dft2)")
    side = d.grid[0]
    if side & (side - 1):
        raise ConfigError("dictionary.sqrt_n", "recover needs a power-of-two image side")
    pi = build_distribution(cfg, d)
    m_values = _int_list(cfg, "m_values")
    pieces = _positive_int(cfg, "pieces", 6)
    opts = solver_options(cfg)
    img = images.piecewise_constant_image(side, pieces, seed)
    synth = images.haar2_matrix(side).T
    coeffs = synth.T @ img.ravel()
    rows = []
    for i, m in enumerate(m_values):
        A = _draw(cfg, d, pi, m, mc._trial_seed(seed, i))
        y = A.matvec(img.ravel())
        res = basis_pursuit(A.matrix @ synth, y, opts, reference=coeffs)
        est = (synth @ res.estimate).real
        rows.append(
            {
                "m": m,
                "q": A.q,
                "sampled_fraction": float(smp.sampling_mask(A).mean()),
                "psnr_db": psnr(img, est, 255.0),
                "relative_error": res.relative_error,
                "iterations": res.iterations,
                "converged": res.converged,
            }
        )
    out.csv(list(rows[0]), rows)
    payload = {"image_side": side, "pieces": pieces, "haar_nonzeros": int(np.sum(np.abs(coeffs) > 1e-9)), "rows": rows}
    out.json(payload)
    return payload


def run_phase(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    sig = _get(cfg, "signal", dict, {})
    s_values = _int_list(sig, "s_values") if "s_values" in sig else [_positive_int(sig, "s", required=True)]
    m_values = _int_list(cfg, "m_values")
    trials = _positive_int(cfg, "trials", required=True)
    signal_class = sig.get("class", "generic")
    if signal_class not in ("generic", "pathological"):
        raise ConfigError("signal.class", f"unknown class {signal_class!r}")
    try:
        diagram = mc.phase_transition(
            d, pi, s_values, m_values, trials, seed, signal_class,
            distinct=bool(cfg.get("distinct", False)), opts=solver_options(cfg), map_fn=pool.map,
        )
    except ValueError as exc:
        raise ConfigError("signal", str(exc)) from None
    rows = [
        {
            "s": c.s, "m": c.m, "trials": c.trials, "successes": c.successes, "frequency": c.frequency,
            "nonconverged": c.nonconverged, "identifiable_trials": c.identifiable_trials,
        }
        for c in diagram.cells
    ]
    out.csv(list(mc.CSV_COLUMNS), rows)
    payload = diagram.to_dict()
    payload["experiment"] = payload.pop("provenance")
    out.json(payload)
    return payload


def _certify_trial(args):
    d, pi, s, m, eps, seed, t, opts = args
    rng = np.random.default_rng([seed, t])
    x = mc.random_signal(d.n, s, rng)
    A = smp.draw_blocks(d, pi, m, int(rng.integers(2**63)))
    sched = cert.golfing_schedule(s, d.n, m, eps)
    rep = cert.golfing_certificate(smp.partition_for_golfing(A, sched.sizes), x.support, np.exp(1j * np.angle(x.values)), m)
    xd = x.dense()
    res = basis_pursuit(A.operator, A.matvec(xd), opts, reference=xd)
    w = rep.w_norms
    monotone = all(
        w[i + 1] <= w[i] * (1 + 1e-12) + 1e-15 for i, c in enumerate(rep.step_contractions) if c <= 1
    )
    return {
        "trial": t, "inv_norm": rep.inv_norm, "max_col": rep.max_col, "vS_err": rep.vS_err,
        "vSc_inf": rep.vSc_inf, "all_pass": rep.all_pass, "success": bool(res.success),
        "relative_error": res.relative_error, "contraction_log_ok": monotone,
    }


def run_certify(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    m = _positive_int(cfg, "m", required=True)
    s = _positive_int(_get(cfg, "signal", dict, {}), "s", required=True)
    trials = _positive_int(cfg, "trials", required=True)
    eps = _get(cfg, "eps", float, 0.01)
    opts = solver_options(cfg)
    rows = list(pool.map(_certify_trial, [(d, pi, s, m, eps, seed, t, opts) for t in range(trials)]))
    out.csv(list(rows[0]), rows)
    payload = {
        "schedule": cert.golfing_schedule(s, d.n, m, eps).to_dict(),
        "trials": trials,
        "certified": sum(r["all_pass"] for r in rows),
        "recovered": sum(r["success"] for r in rows),
        "implication_holds": all(r["success"] for r in rows if r["all_pass"]),
        "contraction_log_ok": all(r["contraction_log_ok"] for r in rows),
    }
    out.json(payload)
    return payload


def run_identify(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    m = _positive_int(cfg, "m", required=True)
    s = _positive_int(_get(cfg, "signal", dict, {}), "s", required=True)
    A = _draw(cfg, d, pi, m, seed)
    reduced = bool(cfg.get("reduced", False))
    if reduced:
        if d.factor is None:
            raise ConfigError("reduced", "only line-block dictionaries have a reduced factor")
        mat = cert.reduced_line_matrix(A)
    else:
        mat = A.matrix
    mode = cfg.get("mode", "exhaustive")
    if mode not in ("exhaustive", "randomized"):
        raise ConfigError("mode", f"unknown mode {mode!r}")
    try:
        res = cert.identifiability_rank_test(mat, s, mode=mode, trials=_positive_int(cfg, "trials", 1000), seed=seed)
    except ValueError as exc:
        raise ConfigError("mode", str(exc)) from None
    payload = {"operator": A.to_dict(), "reduced": reduced, "s": s, "result": res.to_dict()}
    if res.x1 is not None:
        payload["witness_measurement_gap"] = float(np.linalg.norm(mat @ (res.x1 - res.x2)))
        if reduced:
            sqrt_n = d.grid[0]
            X1 = cert.lift_column_signal(res.x1, sqrt_n)
            X2 = cert.lift_column_signal(res.x2, sqrt_n)
            payload["lifted_measurement_gap"] = float(np.linalg.norm(A.matvec(X1) - A.matvec(X2)))
    out.json(payload)
    return payload


def run_tailcheck(cfg, seed, out, pool):
    d = build_dictionary(cfg)
    pi = build_distribution(cfg, d)
    S = _support(cfg, d.n, seed)
    events = _get(cfg, "events", list, required=True)
    if not events or any(e not in mc.EVENTS for e in events):
        raise ConfigError("events", f"must be a non-empty list drawn from {list(mc.EVENTS)}")
    thresholds = _get(cfg, "thresholds", dict, required=True)
    m_values = _int_list(cfg, "m_values")
    trials = _positive_int(cfg, "trials", required=True)
    report = coh.gamma(d, pi, S, seed=seed)
    rows = []
    for ei, event in enumerate(events):
        grid = thresholds.get(event)
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"thresholds.{event}", "must be a non-empty list")
        for mi, m in enumerate(m_values):
            for ti, thr in enumerate(grid):
                try:
                    r = mc.tail_check(event, d, pi, S, m, float(thr), trials, mc._trial_seed(seed, ei, mi, ti), report)
                except ValueError as exc:
                    raise ConfigError(f"thresholds.{event}", str(exc)) from None
                rows.append(
                    {
                        "event": event, "m": m, "threshold": r.threshold, "trials": trials, "hits": r.hits,
                        "frequency": r.frequency, "wilson_low": r.interval[0], "wilson_high": r.interval[1],
                        "bound": r.bound, "passed": r.passed,
                    }
                )
    out.csv(list(rows[0]), rows)
    payload = {"coherence": report.to_dict(), "support": S, "all_passed": all(r["passed"] for r in rows), "rows": rows}
    out.json(payload)
    return payload


def run_gaussian_scaling(cfg, seed, out, pool):
    s_values = _int_list(cfg, "s_values")
    p_values = _int_list(cfg, "p_values")
    n = _positive_int(cfg, "n", required=True)
    trials = _positive_int(cfg, "trials", 10_000)
    try:
        res = mc.gaussian_gamma_scaling(s_values, p_values, n, trials, seed)
    except ValueError as exc:
        raise ConfigError("s_values", str(exc)) from None
    out.csv(["s", "p", "mu1", "mu2", "mu3", "gamma"], res["rows"])
    out.json(res)
    return res


RUNNERS = {
    "coherence": run_coherence,
    "optimal-pi": run_optimal_pi,
    "sample": run_sample,
    "recover": run_recover,
    "phase": run_phase,
    "certify": run_certify,
    "identify": run_identify,
    "tailcheck": run_tailcheck,
    "gaussian-scaling": run_gaussian_scaling,
}


# --- driver -----------------------------------------------------------------


def _apply_overrides(cfg, args):
    cfg = copy.deepcopy(cfg)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.output is not None:
        cfg["output"] = {**(cfg.get("output") or {}), "dir": args.output}
    solver = dict(cfg.get("solver") or {})
    for flag, key in (("feas_tol", "feas_tol"), ("max_iter", "max_iter"), ("success_tol", "success_tol")):
        v = getattr(args, flag, None)
        if v is not None:
            solver[key] = v
    if solver:
        cfg["solver"] = solver
    return cfg


def run(scenario: str, cfg: dict) -> tuple[dict, list]:
    """Run ``scenario`` on a parsed config; return its payload and written paths."""
    if scenario not in RUNNERS:
        raise ConfigError("scenario", f"unknown scenario {scenario!r}")
    declared = cfg.get("scenario")
    if declared is not None and declared != scenario:
        raise ConfigError("scenario", f"config is for {declared!r}, not {scenario!r}")
    seed = _get(cfg, "seed", int, 0)
    output = _get(cfg, "output", dict, {})
    out_dir = output.get("dir", ".")
    prefix = output.get("prefix", scenario)
    workers = _positive_int(cfg, "workers", 1)
    prov = {"config_hash": config_hash(cfg), "seed": seed, "version": __version__, "scenario": scenario}
    out = Outputs(out_dir, prefix, prov)
    if workers == 1:
        payload = RUNNERS[scenario](cfg, seed, out, _SerialPool())
    else:
        with ThreadPoolExecutor(workers) as ex:
            payload = RUNNERS[scenario](cfg, seed, out, ex)
    return payload, out.written


class _SerialPool:
    map = staticmethod(map)


def _data_body(path: Path) -> str:
    text = path.read_text()
    if path.suffix == ".json":
        body = json.loads(text)
        body.pop("provenance", None)
        return json.dumps(body, sort_keys=True)
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def _file_hash(path: Path):
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text).get("provenance", {}).get("config_hash")
    for line in text.splitlines():
        if line.startswith("# config_hash="):
            return line.split("=", 1)[1]
    return None


def replay(cfg: dict) -> list:
    """Rerun ``cfg`` and compare against the files at its output paths.

    Returns a list of ``(path, ok, reason)``.
    """
    scenario = cfg.get("scenario")
    if scenario not in RUNNERS:
        raise ConfigError("scenario", "replay needs the config's 'scenario' field")
    output = _get(cfg, "output", dict, {})
    with tempfile.TemporaryDirectory() as tmp:
        fresh_cfg = {**cfg, "output": {**output, "dir": tmp}}
        _, written = run(scenario, fresh_cfg)
        expected_hash = config_hash(cfg)
        results = []
        for fresh in written:
            if fresh.suffix == ".pgm":
                continue
            target = Path(output.get("dir", ".")) / fresh.name
            if not target.exists():
                results.append((target, False, "missing"))
            elif _file_hash(target) != expected_hash:
                results.append((target, False, "config hash differs"))
            elif _data_body(target) != _data_body(fresh):
                results.append((target, False, "data differs"))
            else:
                results.append((target, True, "ok"))
    return results


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockcs", description="Block compressed sensing experiments.")
    parser.add_argument("--version", action="version", version=f"blockcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*SCENARIOS, "replay"):
        p = sub.add_parser(name)
        p.add_argument("config", help="YAML experiment config")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--output", help="override the output directory")
        if name not in ("replay",):
            p.add_argument("--feas-tol", dest="feas_tol", type=float)
            p.add_argument("--max-iter", dest="max_iter", type=int)
            p.add_argument("--success-tol", dest="success_tol", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "replay":
            results = replay(cfg)
            for path, ok, reason in results:
                print(f"{'OK  ' if ok else 'FAIL'} {path} ({reason})")
            return 0 if results and all(ok for _, ok, _ in results) else 1
        _, written = run(args.command, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
