"""Self-check suite: runs the numerical properties of every module on small instances."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .landscape import determinant_identity, enumerate_ts
from .optimizer import OptimizerOptions, grid_search_p1
from .problem import generate_graph
from .simulator import AngleVector, energy, energy_and_gradient, hessian
from .strategies import greedy_run, greedy_step, interp_init
from .symmetry import symmetry_image

log = logging.getLogger(__name__)


@dataclass
class VerifyConfig:
    sizes: tuple = (4, 6, 8)
    depths: tuple = (1, 2, 3, 4)
    n_cases: int = 10
    seed: int = 7
    fd_step: float = 1e-5
    grad_tol: float = 1e-6
    sym_tol: float = 1e-10
    ts_grad_tol: float = 1e-6
    det_rtol: float = 1e-3
    ts_n: int = 8
    ts_p_max: int = 3
    greedy_n: int = 6
    greedy_p_max: int = 4
    grid_resolution: int = 16


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    singular_ts: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "singular_ts": self.singular_ts, "checks": [asdict(c) for c in self.checks]}

    def lines(self) -> list:
        out = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: residual={c.residual:.3e} (threshold {c.threshold:.1e})"
               f"{' ' + c.detail if c.detail else ''}" for c in self.checks]
        out.append(f"SINGULAR TS count: {self.singular_ts}")
        return out


def _random_angles(rng, p):
    return AngleVector(rng.uniform(-np.pi / 2, np.pi / 2, p), rng.uniform(-np.pi / 2, np.pi / 2, p))


def check_gradient(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.n_cases):
        g = generate_graph("RRG3", int(rng.choice(cfg.sizes)), int(rng.integers(2**31)))
        a = _random_angles(rng, int(rng.choice(cfg.depths)))
        _, grad = energy_and_gradient(g, a)
        x = a.flat
        fd = np.empty_like(x)
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = cfg.fd_step
            fd[k] = (energy(g, AngleVector.from_flat(x + e)) - energy(g, AngleVector.from_flat(x - e))) / (2 * cfg.fd_step)
        worst = max(worst, float(np.max(np.abs(fd - grad))))
    return CheckResult("gradient-fd", worst < cfg.grad_tol, worst, cfg.grad_tol)


def check_symmetries(cfg: VerifyConfig) -> list:
    rng = np.random.default_rng(cfg.seed + 1)
    out = []
    for kind in ("i", "ii", "iii", "iv", "iv_prime"):
        worst = 0.0
        for _ in range(cfg.n_cases):
            g = generate_graph("RRG3", int(rng.choice(cfg.sizes)), int(rng.integers(2**31)))
            a = _random_angles(rng, int(rng.choice(cfg.depths)))
            k = int(rng.integers(1, a.p + 1))
            b = symmetry_image(a, kind, k, int(rng.choice([-1, 1])))
            worst = max(worst, abs(energy(g, b) - energy(g, a)))
        out.append(CheckResult(f"symmetry-{kind}", worst < cfg.sym_tol, worst, cfg.sym_tol))
    return out


def check_transition_states(cfg: VerifyConfig, opts: OptimizerOptions):
    """TS stationarity, inertia and the determinant identity along a GREEDY chain."""
    g = generate_graph("RRG3", cfg.ts_n, cfg.seed)
    parent = grid_search_p1(g, cfg.grid_resolution, opts)
    worst_grad = worst_de = worst_det = 0.0
    bad_inertia = singular = 0
    for p in range(1, cfg.ts_p_max + 1):
        for ts in enumerate_ts(g, parent):
            worst_grad = max(worst_grad, float(np.max(np.abs(energy_and_gradient(g, ts.angles)[1]))))
            worst_de = max(worst_de, abs(ts.energy - parent.energy))
            hess = hessian(g, ts.angles, opts.h_fd, opts.tol_eig)
            if hess.singular:
                singular += 1
            elif hess.inertia != (1, 0, 2 * p + 1):
                bad_inertia += 1
        for case in ("first_layer", "last_layer"):
            lhs, rhs = determinant_identity(g, parent, case, opts.h_fd, opts.tol_eig)
            worst_det = max(worst_det, abs(lhs - rhs) / abs(rhs))
        if p < cfg.ts_p_max:
            parent = greedy_step(g, parent, opts=opts)[0]
    checks = [
        CheckResult("ts-stationarity", worst_grad < cfg.ts_grad_tol, worst_grad, cfg.ts_grad_tol),
        CheckResult("ts-energy", worst_de < 1e-12, worst_de, 1e-12),
        CheckResult("ts-inertia", bad_inertia == 0, float(bad_inertia), 0.5, f"singular={singular}"),
        CheckResult("determinant-identity", worst_det < cfg.det_rtol, worst_det, cfg.det_rtol),
    ]
    return checks, singular


def check_monotonicity(cfg: VerifyConfig, opts: OptimizerOptions) -> CheckResult:
    g = generate_graph("RRG3", cfg.greedy_n, cfg.seed + 2)
    run = greedy_run(g, cfg.greedy_p_max, opts=opts, grid_resolution=cfg.grid_resolution)
    rise = float(np.max(np.diff(run.energies()), initial=-np.inf))
    return CheckResult("greedy-monotonicity", rise <= 1e-9, max(rise, 0.0), 1e-9)


def check_interp(cfg: VerifyConfig) -> CheckResult:
    """Center-of-mass form against the classic interpolation formula."""
    rng = np.random.default_rng(cfg.seed + 3)
    worst = 0.0
    for p in range(1, 9):
        a = _random_angles(rng, p)
        got = interp_init(a)
        for arr, name in ((a.beta, "beta"), (a.gamma, "gamma")):
            ext = np.concatenate([[0.0], arr, [0.0]])
            k = np.arange(1, p + 2)
            ref = (k - 1) / p * ext[k - 1] + (p - k + 1) / p * ext[k]
            worst = max(worst, float(np.max(np.abs(getattr(got, name) - ref))))
    return CheckResult("interp-identity", worst < 1e-12, worst, 1e-12)


def verify_suite(cfg: VerifyConfig = VerifyConfig(), opts: OptimizerOptions = None) -> VerifyReport:
    """Run every check; an exception inside a check counts as a failure of that check."""
    opts = opts or OptimizerOptions()
    report = VerifyReport()

    def guarded(name, fn):
        try:
            res = fn()
        except Exception as exc:  # a crashing check is a failing check
            log.warning("check %s raised %r", name, exc)
            return [CheckResult(name, False, float("inf"), 0.0, f"raised {type(exc).__name__}: {exc}")]
        return res if isinstance(res, list) else [res]

    report.checks += guarded("gradient-fd", lambda: check_gradient(cfg))
    report.checks += guarded("symmetries", lambda: check_symmetries(cfg))

    def ts():
        checks, report.singular_ts = check_transition_states(cfg, opts)
        return checks

    report.checks += guarded("transition-states", ts)
    report.checks += guarded("greedy-monotonicity", lambda: check_monotonicity(cfg, opts))
    report.checks += guarded("interp-identity", lambda: check_interp(cfg))
    return report
