"""Depth-by-depth initialization strategies: GREEDY, INTERP, TQA and a multistart baseline."""
from __future__ import annotations

import logging
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ConvergenceError
from .landscape import (
    approx_index1_direction,
    descend_from_ts,
    enumerate_ts,
    index1_direction,
    pad_zeros,
    smoothness_score,
)
from .optimizer import (
    Classification,
    OptimizerOptions,
    Provenance,
    StationaryPoint,
    grid_search_p1,
    local_minimize,
)
from .problem import ProblemGraph, cost_diagonal
from .simulator import AngleVector, _diag, approximation_ratio, as_angles, energy, hessian
from .symmetry import fold_for

log = logging.getLogger(__name__)

STRATEGIES = ("GREEDY", "INTERP", "TQA", "RANDOM_MULTISTART")
DEFAULT_DT_GRID = tuple(np.round(np.arange(0.1, 1.0 + 1e-9, 0.05), 10))


@dataclass
class DepthRecord:
    p: int
    point: StationaryPoint
    ratio: float
    wall_ms: float
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = self.point.to_dict()
        return {
            "p": self.p,
            "energy": d["energy"],
            "ratio": self.ratio,
            "angles": d["angles"],
            "grad_norm": d["grad_norm"],
            "inertia": d["inertia"],
            "classification": d["classification"],
            "converged": d["converged"],
            "wall_ms": self.wall_ms,
            "info": self.info,
        }


@dataclass
class StrategyRun:
    strategy: str
    per_depth: list
    config: dict = field(default_factory=dict)

    def energies(self) -> np.ndarray:
        return np.array([r.point.energy for r in self.per_depth])

    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.per_depth])

    def at(self, p: int) -> DepthRecord:
        for r in self.per_depth:
            if r.p == p:
                return r
        raise KeyError(p)

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "config": self.config,
                "per_depth": [r.to_dict() for r in self.per_depth]}


def _record(g: ProblemGraph, point: StationaryPoint, t0: float, **info) -> DepthRecord:
    ratio = approximation_ratio(point.energy, cost_diagonal(g).c_min)
    return DepthRecord(point.p, point, ratio, 1000.0 * (time.perf_counter() - t0), info)


def _tie_key(g: ProblemGraph, pt: StationaryPoint):
    return (smoothness_score(pt.angles), tuple(fold_for(g, pt.angles).flat))


def select_best(g: ProblemGraph, candidates: Sequence[StationaryPoint], tie_tol: float = 1e-9) -> StationaryPoint:
    """Lowest energy; candidates within ``tie_tol`` of it are ranked by smoothness, then folded angles."""
    e_min = min(c.energy for c in candidates)
    tied = [c for c in candidates if c.energy <= e_min + tie_tol]
    return min(tied, key=lambda c: _tie_key(g, c))


def _seed(g, seed_point, grid_resolution, opts):
    if seed_point is not None:
        return seed_point
    return grid_search_p1(g, grid_resolution, opts)


def greedy_step(g: ProblemGraph, parent: StationaryPoint, eps: float = 1e-2, use_nonsymmetric: bool = False,
                direction: str = "exact", opts: Optional[OptimizerOptions] = None, tie_tol: float = 1e-9):
    """One GREEDY transition p -> p+1. Returns ``(best_child, all_children, stats)``."""
    opts = opts or OptimizerOptions()
    diag = cost_diagonal(g)
    children = []
    stats = {"n_ts": 0, "n_singular": 0, "n_not_index1": 0, "n_descents": 0, "n_failed": 0}
    for ts in enumerate_ts(diag, parent, include_nonsymmetric=use_nonsymmetric):
        stats["n_ts"] += 1
        if direction == "exact":
            hess = hessian(diag, ts.angles, opts.h_fd, opts.tol_eig)
            if hess.singular:
                stats["n_singular"] += 1
                log.info("skipping singular TS (beta@%d, gamma@%d)", ts.insert_beta, ts.insert_gamma)
                continue
            if hess.inertia[0] != 1:
                stats["n_not_index1"] += 1
                log.warning("TS (beta@%d, gamma@%d) has inertia %s", ts.insert_beta, ts.insert_gamma, hess.inertia)
                continue
            v = index1_direction(hess)
        elif direction == "approx":
            v = approx_index1_direction(diag, ts, opts.h_fd)
        else:
            raise ValueError(f"unknown direction mode {direction!r}")
        for child in descend_from_ts(diag, ts, v, eps, opts):
            stats["n_descents"] += 1
            if child.converged:
                children.append((ts, child))
            else:
                stats["n_failed"] += 1
    minima = [c for _, c in children if c.classification in (Classification.MINIMUM, Classification.UNCLASSIFIED)]
    if not minima:
        raise ConvergenceError(f"GREEDY: every branch failed at p={parent.p + 1}")
    return select_best(g, minima, tie_tol), children, stats


def greedy_run(g: ProblemGraph, p_max: int, eps: float = 1e-2, use_nonsymmetric: bool = False,
               direction: str = "exact", opts: Optional[OptimizerOptions] = None, grid_resolution: int = 32,
               seed_point: Optional[StationaryPoint] = None, tie_tol: float = 1e-9) -> StrategyRun:
    """Recursive GREEDY: keep the lowest minimum reached from the TS of the previous best."""
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    opts = opts or OptimizerOptions()
    config = {"p_max": p_max, "eps": eps, "use_nonsymmetric": use_nonsymmetric, "direction": direction,
              "grid_resolution": grid_resolution, "tie_break": "smoothness, then folded angles",
              "tie_tol": tie_tol, "optimizer": asdict(opts)}
    t0 = time.perf_counter()
    current = _seed(g, seed_point, grid_resolution, opts)
    records = [_record(g, current, t0)]
    for _ in range(1, p_max):
        t0 = time.perf_counter()
        current, _, stats = greedy_step(g, current, eps, use_nonsymmetric, direction, opts, tie_tol)
        records.append(_record(g, current, t0, **stats))
    return StrategyRun("GREEDY", records, config)


def interp_init(parent) -> AngleVector:
    """Depth p+1 start as the mean of the p+1 symmetric TS scaled by (p+1)/p.

    Equivalent to the classic linear interpolation of the depth-p schedule.
    """
    a = parent.angles if isinstance(parent, StationaryPoint) else as_angles(parent)
    p = a.p
    if p < 1:
        raise ValueError("interp_init needs p >= 1")
    total = sum(pad_zeros(a, i, i).flat for i in range(1, p + 2))
    return AngleVector.from_flat(total / p)


def interp_run(g: ProblemGraph, p_max: int, opts: Optional[OptimizerOptions] = None, grid_resolution: int = 32,
               seed_point: Optional[StationaryPoint] = None) -> StrategyRun:
    opts = opts or OptimizerOptions()
    config = {"p_max": p_max, "grid_resolution": grid_resolution, "optimizer": asdict(opts)}
    t0 = time.perf_counter()
    current = _seed(g, seed_point, grid_resolution, opts)
    records = [_record(g, current, t0)]
    for _ in range(1, p_max):
        t0 = time.perf_counter()
        current = local_minimize(g, interp_init(current), opts, Provenance.INTERP)
        records.append(_record(g, current, t0))
    return StrategyRun("INTERP", records, config)


def tqa_init(p: int, dt: float, swap: bool = False) -> AngleVector:
    """Linear ramp ``gamma_j = (1 - j/p) dt``, ``beta_j = (j/p) dt``; ``swap`` exchanges the two."""
    if p < 1 or dt <= 0:
        raise ValueError("tqa_init needs p >= 1 and dt > 0")
    j = np.arange(1, p + 1)
    gamma = (1 - j / p) * dt
    beta = (j / p) * dt
    if swap:
        beta, gamma = gamma, beta
    return AngleVector(beta, gamma)


def tqa_best_dt(g: ProblemGraph, p: int, dt_grid: Sequence[float], swap: bool = False) -> tuple[float, float]:
    """Grid element minimizing the un-optimized ansatz energy; the first (smallest) wins ties."""
    diag = _diag(g)
    grid = sorted(float(x) for x in dt_grid)
    if not grid:
        raise ValueError("dt grid is empty")
    energies = [energy(diag, tqa_init(p, dt, swap)) for dt in grid]
    k = int(np.argmin(energies))
    return grid[k], energies[k]


def tqa_run(g: ProblemGraph, p_max: int, dt_grid: Sequence[float] = DEFAULT_DT_GRID, swap: bool = False,
            opts: Optional[OptimizerOptions] = None) -> StrategyRun:
    """For each depth independently: pick dt by a pre-scan, then one local descent."""
    opts = opts or OptimizerOptions()
    config = {"p_max": p_max, "dt_grid": [float(x) for x in dt_grid], "swap": swap, "optimizer": asdict(opts)}
    records = []
    for p in range(1, p_max + 1):
        t0 = time.perf_counter()
        dt, e0 = tqa_best_dt(g, p, dt_grid, swap)
        pt = local_minimize(g, tqa_init(p, dt, swap), opts, Provenance.TQA)
        records.append(_record(g, pt, t0, dt=dt, init_energy=e0))
    return StrategyRun("TQA", records, config)


def quasi_regular_starts(p: int, n_starts: int, seed: int = 0, odd_regular: bool = True) -> np.ndarray:
    """Scrambled Halton points mapped onto the fundamental region of depth p."""
    gmax = np.pi / 4 if odd_regular else np.pi / 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = qmc.Halton(d=2 * p, scramble=True, seed=seed).random(n_starts)
    beta = (u[:, :p] - 0.5) * (np.pi / 2)
    gamma = (u[:, p:] - 0.5) * (2 * gmax)
    gamma[:, 0] = np.clip(u[:, p], 1e-6, 1 - 1e-6) * gmax
    return np.concatenate([beta, gamma], axis=1)


def random_multistart_run(g: ProblemGraph, p: int, n_starts: Optional[int] = None, seed: int = 0,
                          opts: Optional[OptimizerOptions] = None) -> DepthRecord:
    """Best of ``n_starts`` local descents from quasi-regular starts (default ``min(2^p, 4096)``)."""
    opts = opts or OptimizerOptions()
    n_starts = n_starts if n_starts is not None else min(2 ** p, 4096)
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    t0 = time.perf_counter()
    diag = cost_diagonal(g)
    quick = OptimizerOptions(**{**asdict(opts), "classify": False})
    best = None
    for x0 in quasi_regular_starts(p, n_starts, seed, g.odd_regular):
        pt = local_minimize(diag, x0, quick, Provenance.RANDOM)
        if pt.converged and (best is None or pt.energy < best.energy):
            best = pt
    if best is None:
        raise ConvergenceError(f"multistart: none of {n_starts} starts converged")
    if opts.classify:
        from .optimizer import classify
        best = classify(diag, best, opts.h_fd, opts.tol_eig)
    return _record(g, best, t0, n_starts=n_starts, starts="scrambled Halton (quasi-regular)", seed=seed)


def global_run(g: ProblemGraph, p_max: int, seed: int = 0, opts: Optional[OptimizerOptions] = None,
               max_starts: int = 4096) -> StrategyRun:
    records = [random_multistart_run(g, p, min(2 ** p, max_starts), seed, opts) for p in range(1, p_max + 1)]
    return StrategyRun("RANDOM_MULTISTART", records, {"p_max": p_max, "seed": seed, "max_starts": max_starts,
                                           "starts": "scrambled Halton (quasi-regular)"})
