"""Ensemble sweeps over strategies with deterministic aggregation and CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractError, GreedyQAOAError
from .optimizer import OptimizerOptions, grid_search_p1
from .problem import ENSEMBLES, ProblemGraph, sample_ensemble
from .strategies import DEFAULT_DT_GRID, global_run, greedy_run, interp_run, tqa_run

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
WORKERS_ENV = "GREEDY_QAOA_WORKERS"
STRATEGY_NAMES = {"greedy": "GREEDY", "interp": "INTERP", "tqa": "TQA", "global": "RANDOM_MULTISTART"}
CSV_COLUMNS = ("strategy", "p", "mean_ratio", "std_ratio", "n_instances")


@dataclass
class ExperimentConfig:
    ensemble: str = "RRG3"
    n: int = 10
    count: int = 19
    global_seed: int = 0
    p_E: Optional[float] = None
    strategies: tuple = ("greedy", "interp", "tqa")
    p_max: int = 8
    eps: float = 1e-2
    grid_resolution: int = 32
    dedup_tol: float = 1e-5
    dt_grid: tuple = DEFAULT_DT_GRID
    tqa_swap: bool = False
    multistart_cap: int = 4096
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    out_dir: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.optimizer, dict):
            self.optimizer = OptimizerOptions(**self.optimizer)
        self.strategies = tuple(s.lower() for s in self.strategies)
        self.dt_grid = tuple(float(x) for x in self.dt_grid)
        if self.ensemble not in ENSEMBLES:
            raise ContractError(f"unknown ensemble {self.ensemble!r}")
        bad = [s for s in self.strategies if s not in STRATEGY_NAMES]
        if bad:
            raise ContractError(f"unknown strategies {bad}")
        if self.p_max < 1 or self.count < 1:
            raise ContractError("p_max and count must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strategies"] = list(self.strategies)
        d["dt_grid"] = list(self.dt_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(s))


def run_strategy(g: ProblemGraph, strategy: str, cfg: ExperimentConfig, seed_point=None, seed: int = 0):
    opts = cfg.optimizer
    if strategy == "greedy":
        return greedy_run(g, cfg.p_max, cfg.eps, opts=opts, grid_resolution=cfg.grid_resolution, seed_point=seed_point)
    if strategy == "interp":
        return interp_run(g, cfg.p_max, opts, cfg.grid_resolution, seed_point)
    if strategy == "tqa":
        return tqa_run(g, cfg.p_max, cfg.dt_grid, cfg.tqa_swap, opts)
    if strategy == "global":
        return global_run(g, cfg.p_max, seed, opts, cfg.multistart_cap)
    raise ContractError(f"unknown strategy {strategy!r}")


def run_instance(args) -> dict:
    """All strategies on one graph; GREEDY and INTERP share one grid-search seed."""
    idx, g, cfg = args
    out = {"index": idx, "graph": g.to_dict(), "runs": {}, "errors": {}}
    seed_point = None
    if {"greedy", "interp"} & set(cfg.strategies):
        try:
            seed_point = grid_search_p1(g, cfg.grid_resolution, cfg.optimizer)
        except GreedyQAOAError as exc:
            out["errors"]["grid"] = str(exc)
    for s in cfg.strategies:
        try:
            out["runs"][s] = run_strategy(g, s, cfg, seed_point, g.seed or 0).to_dict()
        except GreedyQAOAError as exc:
            log.warning("instance %d, %s failed: %s", idx, s, exc)
            out["errors"][s] = str(exc)
    return out


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def aggregate(instances: list, strategies, p_max: int) -> list:
    rows = []
    for s in strategies:
        for p in range(1, p_max + 1):
            vals = [r["ratio"] for inst in instances if s in inst["runs"]
                    for r in inst["runs"][s]["per_depth"] if r["p"] == p]
            if not vals:
                continue
            rows.append({"strategy": STRATEGY_NAMES[s], "p": p, "mean_ratio": float(np.mean(vals)),
                         "std_ratio": float(np.std(vals)), "n_instances": len(vals)})
    return rows


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**r, "mean_ratio": f"{r['mean_ratio']:.10f}", "std_ratio": f"{r['std_ratio']:.10f}"})
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig, graphs: Optional[list] = None) -> dict:
    """Per-instance runs plus aggregated ratios; writes results.json/summary.csv if ``out_dir`` is set."""
    graphs = graphs if graphs is not None else sample_ensemble(cfg.ensemble, cfg.n, cfg.count, cfg.global_seed, cfg.p_E)
    jobs = [(i, g, cfg) for i, g in enumerate(graphs)]
    workers = worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            instances = list(pool.map(run_instance, jobs))
    else:
        instances = [run_instance(j) for j in jobs]
    instances.sort(key=lambda r: r["index"])
    n_ok = sum(1 for inst in instances if not inst["errors"])
    status = "ok" if n_ok == len(instances) else ("failed" if all(not inst["runs"] for inst in instances) else "partial")
    rows = aggregate(instances, cfg.strategies, cfg.p_max)
    bundle = {"schema_version": SCHEMA_VERSION, "config": cfg.to_dict(), "status": status,
              "instances": instances, "summary": rows}
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.json").write_text(json.dumps(bundle, indent=1, sort_keys=True))
        (out / "summary.csv").write_text(rows_to_csv(rows))
    return bundle
