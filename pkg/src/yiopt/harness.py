"""
Experiment runner: config -> seeded runs -> records, tables and traces.

Config files are YAML mappings with these keys (unknown keys are errors)::

    suite: default            # "default", "smoke" or a manifest path
    algorithms:               # names, or mappings with name/label/params
      - yi
      - name: yi
        label: yi_sigma5
        params: {sigma: 5}
      - dyypo
    reference: yi             # label the others are compared with (default: first)
    dims: [10]                # optional: re-instantiate every suite entry at these dims
    budget_multiplier: 10000  # evaluations per run = multiplier * dim
    repetitions: 51
    root_seed: 0
    output: results           # relative paths resolve against the config file
    workers: 1
    significance: 0.05

Output layout::

    <out>/config.json                         resolved config
    <out>/runs/<problem>/<label>/<rep>.record one JSON RunRecord per run
    <out>/runs/index.json                     seeds and final errors of all runs
    <out>/tables/summary.tsv, summary.json    statistics and w/t/l verdicts
    <out>/traces/<problem>__<label>.csv       convergence curves
    <out>/failures.json                       only when some run failed

Per-run seeds are ``fnv1a_64("<root_seed>|<problem>|<label>|<rep>")``.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .baselines import DeParams, PsoParams, run_de, run_pso
from .benchmarks import (BASE_FUNCTIONS, DEFAULT_SUITE, SMOKE_SUITE, ManifestEntry, make_problem,
                         read_manifest)
from .core import RunRecord, fnv1a_64
from .stats import build_table, classify, WIN, TIE, LOSS
from .yi import YiParams, run_yi
from .yypo import YypoParams, run_yypo

__all__ = ["ALGORITHMS", "AlgorithmSpec", "ConfigError", "ExperimentConfig",
           "ResultSet", "SweepSpec", "export_traces", "load_config",
           "load_results", "parse_config", "run_experiment", "run_seed",
           "run_sweep"]

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _yypo(problem, space, params, *, t_max, seed, algorithm):
    return run_yypo(problem, space, params, t_max=t_max, seed=seed, algorithm=algorithm)


# name -> (runner, params class, fixed params)
ALGORITHMS = {
    "yi": (run_yi, YiParams, {}),
    "yypo": (_yypo, YypoParams, {"variant": "static_random_I"}),
    "dyypo": (_yypo, YypoParams, {"variant": "dynamic_ascending_I"}),
    "de": (run_de, DeParams, {}),
    "pso": (run_pso, PsoParams, {}),
}

SWEEPABLE = ("sigma", "i_min", "i_max", "alpha_stability", "n_offspring")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    label: str
    params: dict = field(default_factory=dict)

    def build_params(self):
        _, cls, fixed = ALGORITHMS[self.name]
        return cls(**{**self.params, **fixed})


@dataclass(frozen=True)
class ExperimentConfig:
    suite: list
    algorithms: list
    reference: str
    budget_multiplier: int = 10000
    repetitions: int = 51
    root_seed: int = 0
    output: Path = Path("results")
    workers: int = 1
    significance: float = 0.05
    suite_name: str = "default"
    dims: Optional[list] = None

    def problems(self) -> dict:
        return {e.problem_id: e for e in self.suite}

    def labels(self) -> list:
        return [a.label for a in self.algorithms]

    def algorithm(self, label: str) -> AlgorithmSpec:
        return next(a for a in self.algorithms if a.label == label)

    def to_json(self) -> str:
        doc = {
            "suite_name": self.suite_name,
            "suite": [[e.problem_id, e.base, e.dim, e.suite_seed, e.bias, e.transform]
                      for e in self.suite],
            "algorithms": [{"name": a.name, "label": a.label, "params": a.params}
                           for a in self.algorithms],
            "reference": self.reference,
            "budget_multiplier": self.budget_multiplier,
            "repetitions": self.repetitions,
            "root_seed": self.root_seed,
            "significance": self.significance,
            "dims": self.dims,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


_KEYS = {"suite", "algorithms", "reference", "dims", "budget_multiplier", "repetitions",
         "root_seed", "output", "workers", "significance"}


def _algorithm_spec(item) -> AlgorithmSpec:
    if isinstance(item, str):
        item = {"name": item}
    if not isinstance(item, dict):
        raise ConfigError(f"algorithm entry must be a name or a mapping, got {item!r}")
    extra = set(item) - {"name", "label", "params"}
    if extra:
        raise ConfigError(f"unknown algorithm keys: {sorted(extra)}")
    name = item.get("name")
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; known: {sorted(ALGORITHMS)}")
    params = dict(item.get("params") or {})
    _, cls, fixed = ALGORITHMS[name]
    allowed = {f.name for f in fields(cls)} - set(fixed)
    bad = set(params) - allowed
    if bad:
        raise ConfigError(f"unknown parameters for {name}: {sorted(bad)}")
    spec = AlgorithmSpec(name, str(item.get("label", name)), params)
    try:
        spec.build_params()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters for {spec.label}: {exc}") from None
    return spec


def _suite(value, base_dir: Path) -> tuple:
    if value == "default":
        return list(DEFAULT_SUITE), "default"
    if value == "smoke":
        return list(SMOKE_SUITE), "smoke"
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute():
            path = base_dir / path
        try:
            return read_manifest(path), str(value)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read suite manifest {path}: {exc}") from None
    raise ConfigError("suite must be 'default', 'smoke' or a manifest path")


def parse_config(doc: dict, base_dir=".") -> ExperimentConfig:
    """Validate a config mapping; raises :class:`ConfigError` on any problem."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    base_dir = Path(base_dir)
    suite, suite_name = _suite(doc.get("suite", "default"), base_dir)
    dims = doc.get("dims")
    if dims is not None:
        if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
            raise ConfigError("dims must be a list of positive integers")
        try:
            suite = [replace(e, dim=d, problem_id=f"{e.problem_id}_{d}d")
                     for e in suite for d in dims]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    algos = [_algorithm_spec(a) for a in doc.get("algorithms") or []]
    if not algos:
        raise ConfigError("at least one algorithm is required")
    labels = [a.label for a in algos]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate algorithm labels: {labels}")
    reference = doc.get("reference", labels[0])
    if reference not in labels:
        raise ConfigError(f"reference {reference!r} is not among {labels}")

    def _int(key, default, low):
        value = doc.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < low:
            raise ConfigError(f"{key} must be an integer >= {low}")
        return value

    significance = doc.get("significance", 0.05)
    if not isinstance(significance, (int, float)) or not 0 < significance < 1:
        raise ConfigError("significance must lie in (0, 1)")
    output = Path(doc.get("output", "results"))
    if not output.is_absolute():
        output = base_dir / output
    for e in suite:
        if e.dim < BASE_FUNCTIONS[e.base].min_dim:
            raise ConfigError(f"problem {e.problem_id}: {e.base} needs dim >= "
                              f"{BASE_FUNCTIONS[e.base].min_dim}")
    return ExperimentConfig(
        suite=suite, algorithms=algos, reference=reference,
        budget_multiplier=_int("budget_multiplier", 10000, 1),
        repetitions=_int("repetitions", 51, 1),
        root_seed=_int("root_seed", 0, 0),
        output=output, workers=_int("workers", 1, 1),
        significance=float(significance), suite_name=suite_name, dims=dims)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc or {}, path.parent)


def run_seed(root_seed: int, problem: str, label: str, rep: int) -> int:
    return fnv1a_64(f"{root_seed}|{problem}|{label}|{rep}")


def _record_path(out: Path, problem: str, label: str, rep: int) -> Path:
    return out / "runs" / problem / label / f"{rep}.record"


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _read_record(path: Path) -> Optional[RunRecord]:
    try:
        return RunRecord.from_dict(json.loads(path.read_text()))
    except (OSError, ValueError, KeyError):
        return None


def _execute(task) -> tuple:
    entry, spec, t_max, seed, path = task
    try:
        problem = make_problem(entry)
        runner = ALGORITHMS[spec.name][0]
        rec = runner(problem, problem.space, spec.build_params(), t_max=t_max, seed=seed,
                     algorithm=spec.label)
        _write_text(Path(path), json.dumps(rec.to_dict(), sort_keys=True) + "\n")
        return path, None
    except Exception as exc:  # reported in the failure manifest
        return path, f"{type(exc).__name__}: {exc}"


@dataclass
class ResultSet:
    config: ExperimentConfig
    records: dict  # (problem, label, rep) -> RunRecord
    failures: list = field(default_factory=list)

    def errors(self) -> dict:
        """``{(label, problem): [final errors by rep]}``."""
        probs = self.config.problems()
        out = {}
        for (p, label, rep) in sorted(self.records):
            rec = self.records[p, label, rep]
            out.setdefault((label, p), []).append(rec.final_best_fitness - probs[p].bias)
        return out

    def table(self):
        return build_table(self.errors(), self.config.reference, self.config.significance)


def _tasks(config: ExperimentConfig):
    for entry in config.suite:
        t_max = config.budget_multiplier * entry.dim
        for spec in config.algorithms:
            for rep in range(config.repetitions):
                seed = run_seed(config.root_seed, entry.problem_id, spec.label, rep)
                path = _record_path(config.output, entry.problem_id, spec.label, rep)
                yield (entry, spec, t_max, seed, str(path))


def _collect(config: ExperimentConfig) -> dict:
    records = {}
    for entry, spec, t_max, seed, path in _tasks(config):
        rec = _read_record(Path(path))
        if rec is not None and rec.seed == seed and rec.max_evals == t_max:
            records[entry.problem_id, spec.label, int(Path(path).stem)] = rec
    return records


def write_summary(results: ResultSet) -> None:
    out = results.config.output
    table = results.table()
    _write_text(out / "tables" / "summary.tsv", table.to_tsv())
    _write_text(out / "tables" / "summary.json", table.to_json())


def run_experiment(config: ExperimentConfig) -> ResultSet:
    """
    Execute every (problem, algorithm, repetition) run that has no valid
    record on disk yet, then write the index and the summary table.

    Runs that raise are listed in ``<out>/failures.json`` and in
    :attr:`ResultSet.failures`; completed records are kept either way.
    """
    out = config.output
    _write_text(out / "config.json", config.to_json())
    done = _collect(config)
    todo = [t for t in _tasks(config)
            if (t[0].problem_id, t[1].label, int(Path(t[4]).stem)) not in done]
    log.info("%d runs cached, %d to execute", len(done), len(todo))
    if config.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_execute, todo, chunksize=1))
    else:
        outcomes = [_execute(t) for t in todo]
    failures = sorted(({"record": p, "error": err} for p, err in outcomes if err),
                      key=lambda d: d["record"])
    results = ResultSet(config, _collect(config), failures)
    index = [{"problem": p, "algorithm": a, "rep": r, "seed": rec.seed,
              "total_evals": rec.total_evals,
              "final_error": rec.final_best_fitness - config.problems()[p].bias}
             for (p, a, r), rec in sorted(results.records.items())]
    _write_text(out / "runs" / "index.json", json.dumps(index, indent=1, sort_keys=True) + "\n")
    fail_path = out / "failures.json"
    if failures:
        _write_text(fail_path, json.dumps(failures, indent=1) + "\n")
    else:
        if fail_path.exists():
            fail_path.unlink()
        write_summary(results)
    return results


def load_results(out_dir) -> ResultSet:
    """Rebuild a result set from a finished output directory."""
    out = Path(out_dir)
    doc = json.loads((out / "config.json").read_text())
    suite = [ManifestEntry(*row) for row in doc["suite"]]
    config = ExperimentConfig(
        suite=suite,
        algorithms=[AlgorithmSpec(a["name"], a["label"], a["params"]) for a in doc["algorithms"]],
        reference=doc["reference"], budget_multiplier=doc["budget_multiplier"],
        repetitions=doc["repetitions"], root_seed=doc["root_seed"], output=out,
        significance=doc["significance"], suite_name=doc["suite_name"], dims=doc["dims"])
    return ResultSet(config, _collect(config))


# --- sensitivity sweeps -----------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.parameter!r}; choose from {SWEEPABLE}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")


@dataclass
class SweepReport:
    parameter: str
    rows: list  # dicts: value, i_min, i_max, sigma, alpha_stability, win, tie, loss

    def to_tsv(self) -> str:
        cols = ["parameter", "value", "i_min", "i_max", "sigma", "alpha_stability",
                "win", "tie", "loss"]
        lines = ["\t".join(cols)]
        for r in self.rows:
            lines.append("\t".join(str(r[c]) if c != "parameter" else self.parameter
                                   for c in cols))
        return "\n".join(lines) + "\n"


def run_sweep(base: ExperimentConfig, sweep: SweepSpec) -> SweepReport:
    """
    Compare YI variants against the base YI configuration.

    Only the config's first ``yi`` algorithm is swept. Each variant runs under
    the same label and therefore the same seeds as the base, in its own
    output directory; verdicts count problems where the variant is better
    (win), indistinguishable (tie) or worse (loss).
    """
    spec = next((a for a in base.algorithms if a.name == "yi"), None)
    if spec is None:
        raise ConfigError("sweeps need a 'yi' algorithm in the config")
    root = base.output / "sweep"
    base_cfg = replace(base, algorithms=[spec], reference=spec.label,
                       output=root / "base")
    base_res = run_experiment(base_cfg)
    base_err = base_res.errors()
    rows = []
    for value in sweep.values:
        params = {**spec.params, sweep.parameter: value}
        variant = AlgorithmSpec("yi", spec.label, params)
        try:
            built = variant.build_params()
        except ValueError as exc:
            raise ConfigError(f"{sweep.parameter}={value}: {exc}") from None
        cfg = replace(base_cfg, algorithms=[variant],
                      output=root / f"{sweep.parameter}-{value}")
        res = run_experiment(cfg)
        err = res.errors()
        verdicts = [classify(err[spec.label, p], base_err[spec.label, p], base.significance)
                    for p in sorted(base_cfg.problems())]
        rows.append({"value": value, "i_min": built.i_min, "i_max": built.i_max,
                     "sigma": built.sigma, "alpha_stability": built.alpha_stability,
                     "win": verdicts.count(WIN), "tie": verdicts.count(TIE),
                     "loss": verdicts.count(LOSS)})
    report = SweepReport(sweep.parameter, rows)
    _write_text(base.output / "tables" / f"sweep_{sweep.parameter}.tsv", report.to_tsv())
    return report


# --- convergence traces -----------------------------------------------------

def _best_at(trace, grid: np.ndarray) -> np.ndarray:
    counts = np.array([c for c, _ in trace])
    values = np.array([f for _, f in trace])
    idx = np.searchsorted(counts, grid, side="right") - 1
    return np.where(idx >= 0, values[np.clip(idx, 0, None)], np.nan)


def export_traces(results: ResultSet, normalization: str = "raw", n_points: int = 201) -> list:
    """
    Write one CSV per (problem, algorithm) with the median and the 25th/75th
    percentiles of best-so-far error across repetitions.

    The abscissa is the evaluation count (``"raw"``) or the fraction of the
    budget (``"fraction-of-budget"``).
    """
    if normalization not in ("raw", "fraction-of-budget"):
        raise ValueError("normalization must be 'raw' or 'fraction-of-budget'")
    if not results.records:
        raise ValueError("no run records to export")
    probs = results.config.problems()
    groups = {}
    for (p, label, rep), rec in sorted(results.records.items()):
        groups.setdefault((p, label), []).append(rec)
    paths = []
    for (p, label), recs in sorted(groups.items()):
        t_max = max(r.max_evals or r.total_evals for r in recs)
        grid = np.unique(np.rint(np.linspace(1, t_max, n_points)).astype(int))
        curves = np.array([_best_at(r.trace, grid) for r in recs]) - probs[p].bias
        ok = ~np.isnan(curves).any(axis=0)
        grid, curves = grid[ok], curves[:, ok]
        q25, med, q75 = np.percentile(curves, [25, 50, 75], axis=0)
        x = grid / t_max if normalization == "fraction-of-budget" else grid
        head = "fraction" if normalization == "fraction-of-budget" else "eval_count"
        lines = [f"{head},median,q25,q75"]
        for xi, m, lo, hi in zip(x, med, q25, q75):
            xs = f"{xi:.6f}" if normalization == "fraction-of-budget" else str(int(xi))
            lines.append(f"{xs},{m:.10e},{lo:.10e},{hi:.10e}")
        path = results.config.output / "traces" / f"{p}__{label}.csv"
        _write_text(path, "\n".join(lines) + "\n")
        paths.append(path)
    return paths
