"""Energy-preserving angle symmetries and folding into the fundamental region.

Symmetries used (all keep ``E(beta, gamma)`` unchanged):

* beta_l -> beta_l + pi/2 (any graph: the induced global X-flip commutes with H_C)
* gamma_l -> gamma_l + pi (integer edge weights)
* (beta, gamma) -> (-beta, -gamma) (any graph: H_B and H_C are real)
* beta_j -> -beta_j for all j >= k together with gamma_k -> gamma_k +- pi/2
  (unit weights, every vertex of odd degree)
"""
from __future__ import annotations

import numpy as np

from .problem import ProblemGraph
from .simulator import AngleVector, as_angles

QUARTER = np.pi / 4


def _wrap(x: np.ndarray, period: float) -> np.ndarray:
    """Map entries outside ``[-period/2, period/2]`` into ``[-period/2, period/2)``; others untouched."""
    half = period / 2
    out = x.copy()
    mask = np.abs(x) > half
    out[mask] = np.mod(x[mask] + half, period) - half
    return out


def fold_to_fundamental(a, odd_regular: bool = False, integer_weights: bool = True) -> AngleVector:
    """Representative of ``a`` in the reduced parameter region.

    With ``odd_regular`` the result satisfies beta in [-pi/4, pi/4],
    gamma_1 in [0, pi/4], gamma_j in [-pi/4, pi/4]; otherwise gamma stays in
    [-pi/2, pi/2] (or is left unwrapped for non-integer weights). Points already
    inside the region are returned unchanged, so folding is idempotent.
    """
    a = as_angles(a)
    beta = _wrap(a.beta, np.pi / 2)
    gamma = a.gamma.copy()
    if integer_weights or odd_regular:
        gamma = _wrap(gamma, np.pi)
    if odd_regular:
        for k in range(a.p):
            if abs(gamma[k]) > QUARTER:
                gamma[k] -= np.copysign(np.pi / 2, gamma[k])
                beta[k:] = -beta[k:]
    # global sign: first nonzero of (gamma, beta) made positive
    for v in np.concatenate([gamma, beta]):
        if v != 0.0:
            if v < 0:
                beta, gamma = -beta, -gamma
            break
    return AngleVector(beta + 0.0, gamma + 0.0)


def fold_for(g: ProblemGraph, a) -> AngleVector:
    return fold_to_fundamental(a, odd_regular=g.odd_regular, integer_weights=g.integer_weights)


def in_fundamental_region(a, odd_regular: bool = True, atol: float = 1e-12) -> bool:
    a = as_angles(a)
    gmax = QUARTER if odd_regular else np.pi / 2
    ok = np.all(np.abs(a.beta) <= QUARTER + atol) and np.all(np.abs(a.gamma) <= gmax + atol)
    return bool(ok and (a.p == 0 or a.gamma[0] >= -atol))


SYMMETRIES = ("i", "ii", "iii", "iv", "iv_prime")


def symmetry_image(a, kind: str, k: int = 1, sign: int = 1) -> AngleVector:
    """Apply one energy-preserving map; ``k`` is a 1-based layer, ``sign`` picks the +-pi/2 branch.

    ``i``: every angle + pi (integer weights). ``ii``: beta_k + pi/2.
    ``iii``: global sign flip. ``iv``: beta_k -> -beta_k with gamma_k and
    gamma_{k+1} shifted by pi/2. ``iv_prime``: beta_j -> -beta_j for j >= k with
    only gamma_k shifted. ``iv`` and ``iv_prime`` need unit weights and odd degrees.
    """
    a = as_angles(a)
    beta, gamma = a.beta.copy(), a.gamma.copy()
    if not 1 <= k <= a.p:
        raise ValueError(f"layer {k} out of range for p={a.p}")
    shift = np.copysign(np.pi / 2, sign)
    if kind == "i":
        beta, gamma = beta + np.pi, gamma + np.pi
    elif kind == "ii":
        beta[k - 1] += np.pi / 2
    elif kind == "iii":
        beta, gamma = -beta, -gamma
    elif kind == "iv":
        beta[k - 1] = -beta[k - 1]
        gamma[k - 1:k + 1] += shift
    elif kind == "iv_prime":
        beta[k - 1:] = -beta[k - 1:]
        gamma[k - 1] += shift
    else:
        raise ValueError(f"unknown symmetry {kind!r}")
    return AngleVector(beta, gamma)
