"""Quasi-Newton local minimization of the QAOA energy and the p = 1 grid search."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError
from .problem import ProblemGraph, cost_diagonal
from .simulator import (
    DEFAULT_H_FD,
    TOL_EIG,
    AngleVector,
    _diag,
    as_angles,
    energy_and_gradient,
    hessian,
)
from .symmetry import fold_to_fundamental

log = logging.getLogger(__name__)


class Classification(str, enum.Enum):
    MINIMUM = "MINIMUM"
    TRANSITION_STATE = "TRANSITION_STATE"
    SINGULAR = "SINGULAR"
    OTHER = "OTHER"
    UNCLASSIFIED = "UNCLASSIFIED"


class Provenance(str, enum.Enum):
    GRID = "GRID"
    TS_DESCENT_PLUS = "TS_DESCENT_PLUS"
    TS_DESCENT_MINUS = "TS_DESCENT_MINUS"
    INTERP = "INTERP"
    TQA = "TQA"
    RANDOM = "RANDOM"


@dataclass
class OptimizerOptions:
    tol_grad: float = 1e-8
    max_iter: int = 1000
    classify: bool = True
    h_fd: float = DEFAULT_H_FD
    tol_eig: float = TOL_EIG
    max_step: float = 0.5  # cap on the inf-norm of a single line-search step (radians)
    first_step: float = 0.1


@dataclass
class StationaryPoint:
    angles: AngleVector
    energy: float
    grad_norm: float
    inertia: Optional[tuple] = None
    classification: Classification = Classification.UNCLASSIFIED
    iterations: int = 0
    provenance: Provenance = Provenance.RANDOM
    converged: bool = False
    eigenvalues: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.angles.p

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "angles": self.angles.to_list(),
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "inertia": list(self.inertia) if self.inertia is not None else None,
            "classification": self.classification.value,
            "iterations": self.iterations,
            "provenance": self.provenance.value,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StationaryPoint":
        return cls(
            angles=AngleVector.from_flat(d["angles"]),
            energy=float(d["energy"]),
            grad_norm=float(d["grad_norm"]),
            inertia=tuple(d["inertia"]) if d.get("inertia") is not None else None,
            classification=Classification(d["classification"]),
            iterations=int(d.get("iterations", 0)),
            provenance=Provenance(d.get("provenance", "RANDOM")),
            converged=bool(d.get("converged", False)),
        )


def classify_inertia(inertia: tuple) -> Classification:
    n_neg, n_zero, _ = inertia
    if n_zero > 0:
        return Classification.SINGULAR
    if n_neg == 0:
        return Classification.MINIMUM
    if n_neg == 1:
        return Classification.TRANSITION_STATE
    return Classification.OTHER


def classify(problem, point: StationaryPoint, h_fd: float = DEFAULT_H_FD, tol_eig: float = TOL_EIG) -> StationaryPoint:
    """Attach Hessian inertia and a classification to a converged point."""
    if not point.converged:
        return replace(point, classification=Classification.UNCLASSIFIED)
    hess = hessian(problem, point.angles, h_fd=h_fd, tol_eig=tol_eig)
    return replace(point, inertia=hess.inertia, classification=classify_inertia(hess.inertia),
                   eigenvalues=hess.eigenvalues)


# --- line search -------------------------------------------------------------

_C1 = 1e-4
_C2 = 0.9
_DELTA = 0.1  # approximate-Wolfe parameter, used once energy differences hit round-off


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolant on [a, b], or None if it is not well defined."""
    d1 = da + db - 3 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0:
        return None
    d2 = np.copysign(np.sqrt(disc), b - a)
    denom = db - da + 2 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


def _line_search(fg, x, f0, g0, d, alpha, alpha_max, eps_f):
    """Strong-Wolfe bracketing + zoom with an approximate-Wolfe escape hatch.

    Returns ``(alpha, f, g)`` or ``None`` when no acceptable step was found.
    """
    dphi0 = float(g0 @ d)

    def ok_approx(f, dphi):
        return f <= f0 + eps_f and _C2 * dphi0 <= dphi <= (2 * _DELTA - 1) * dphi0

    def evaluate(a):
        f, g = fg(x + a * d)
        return f, g, float(g @ d)

    def zoom(lo, f_lo, d_lo, g_lo, hi, f_hi, d_hi):
        for _ in range(40):
            a = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            span = hi - lo
            if a is None or not (min(lo, hi) + 0.1 * abs(span) <= a <= max(lo, hi) - 0.1 * abs(span)):
                a = lo + 0.5 * span
            f, g, dphi = evaluate(a)
            if ok_approx(f, dphi):
                return a, f, g
            if f > f0 + _C1 * a * dphi0 or f >= f_lo:
                hi, f_hi, d_hi = a, f, dphi
            else:
                if abs(dphi) <= -_C2 * dphi0:
                    return a, f, g
                if dphi * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo, g_lo = a, f, dphi, g
            if abs(hi - lo) < 1e-16 * max(1.0, abs(lo)):
                break
        # sufficient decrease without curvature is still progress
        if lo > 0 and f_lo < f0:
            return lo, f_lo, g_lo
        return None

    a_prev, f_prev, d_prev, g_prev = 0.0, f0, dphi0, g0
    a = min(alpha, alpha_max)
    for i in range(40):
        f, g, dphi = evaluate(a)
        if ok_approx(f, dphi):
            return a, f, g
        if f > f0 + _C1 * a * dphi0 or (i > 0 and f >= f_prev):
            return zoom(a_prev, f_prev, d_prev, g_prev, a, f, dphi)
        if abs(dphi) <= -_C2 * dphi0:
            return a, f, g
        if dphi >= 0:
            return zoom(a, f, dphi, g, a_prev, f_prev, d_prev)
        if a >= alpha_max:
            return a, f, g
        a_prev, f_prev, d_prev, g_prev = a, f, dphi, g
        a = min(2.0 * a, alpha_max)
    return None


def bfgs(fg: Callable, x0: np.ndarray, tol_grad: float = 1e-8, max_iter: int = 1000,
         max_step: float = 0.5, first_step: float = 0.1):
    """Minimize with BFGS on the inverse Hessian.

    ``fg(x) -> (f, grad)``. Returns ``(x, f, g, iterations, converged)``.
    Deterministic: no randomized components.
    """
    x = np.array(x0, dtype=float)
    f, g = fg(x)
    m = x.size
    eye = np.eye(m)
    hinv = eye.copy()
    fresh = True
    it = 0
    while np.max(np.abs(g)) >= tol_grad and it < max_iter:
        d = -hinv @ g
        if g @ d >= 0:
            hinv, fresh = eye.copy(), True
            d = -g
        dmax = np.max(np.abs(d))
        alpha0 = min(1.0, first_step / dmax) if fresh else 1.0
        alpha_max = max_step / dmax
        eps_f = 1e-14 * (1.0 + abs(f))
        res = _line_search(fg, x, f, g, d, alpha0, alpha_max, eps_f)
        it += 1
        if res is None:
            if fresh:
                break
            hinv, fresh = eye.copy(), True
            continue
        alpha, f_new, g_new = res
        s = alpha * d
        y = g_new - g
        x, f, g = x + s, f_new, g_new
        sy = float(s @ y)
        if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            if fresh:
                hinv = (sy / float(y @ y)) * eye
                fresh = False
            rho = 1.0 / sy
            v = eye - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
    return x, f, g, it, bool(np.max(np.abs(g)) < tol_grad)


def local_minimize(problem, init, opts: Optional[OptimizerOptions] = None,
                   provenance: Provenance = Provenance.RANDOM) -> StationaryPoint:
    """Unconstrained quasi-Newton descent from ``init``.

    A run that exhausts ``max_iter`` is returned with ``converged=False`` and
    classification ``UNCLASSIFIED``; it is never silently accepted.
    """
    opts = opts or OptimizerOptions()
    init = as_angles(init)
    diag = _diag(problem)

    def fg(x):
        return energy_and_gradient(diag, AngleVector.from_flat(x))

    x, f, g, it, ok = bfgs(fg, init.flat, opts.tol_grad, opts.max_iter, opts.max_step, opts.first_step)
    point = StationaryPoint(AngleVector.from_flat(x), f, float(np.max(np.abs(g))), iterations=it,
                            provenance=provenance, converged=ok)
    if not ok:
        log.warning("local_minimize did not converge after %d iterations (|g|=%.2e)", it, point.grad_norm)
    if ok and opts.classify:
        point = classify(diag, point, opts.h_fd, opts.tol_eig)
    return point


def fundamental_grid_p1(resolution: int, odd_regular: bool = True) -> np.ndarray:
    """Evenly spaced starts: beta in [-pi/4, pi/4], gamma in the open interval (0, gamma_max)."""
    gmax = np.pi / 4 if odd_regular else np.pi / 2
    betas = np.linspace(-np.pi / 4, np.pi / 4, resolution)
    gammas = (np.arange(resolution) + 0.5) * gmax / resolution
    bb, gg = np.meshgrid(betas, gammas, indexing="ij")
    return np.stack([bb.ravel(), gg.ravel()], axis=1)


def grid_search_p1(problem: ProblemGraph, resolution: int = 32,
                   opts: Optional[OptimizerOptions] = None) -> StationaryPoint:
    """Best p = 1 minimum over local descents started on an even grid of the fundamental region."""
    if resolution < 8:
        raise ValueError("grid resolution must be at least 8")
    opts = opts or OptimizerOptions()
    odd = problem.odd_regular
    quick = replace(opts, classify=False)
    diag = cost_diagonal(problem)
    best = None
    for start in fundamental_grid_p1(resolution, odd):
        pt = local_minimize(diag, start, quick, Provenance.GRID)
        if not pt.converged:
            continue
        if best is None or pt.energy < best.energy:
            best = pt
    if best is None:
        raise ConvergenceError("grid search: no start converged")
    folded = fold_to_fundamental(best.angles, odd_regular=odd, integer_weights=problem.integer_weights)
    e, grad = energy_and_gradient(diag, folded)
    best = replace(best, angles=folded, energy=e, grad_norm=float(np.max(np.abs(grad))))
    if opts.classify:
        best = classify(diag, best, opts.h_fd, opts.tol_eig)
    return best
