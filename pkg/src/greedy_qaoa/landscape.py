"""Transition states of depth p+1 built from depth-p minima, and descent from them.

Padding a depth-p minimum with two zero angles that are adjacent in the gate
sequence ``C_1 B_1 C_2 B_2 ... C_p B_p`` leaves the state unchanged and yields an
index-1 saddle. Two placements exist per position ``l`` (1-based):

* symmetric: ``beta_l = gamma_l = 0`` (an identity layer), ``l = 1..p+1``
* non-symmetric: ``beta_l = 0`` and ``gamma_{l+1} = 0``, ``l = 1..p``
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ClassificationError, ContractError
from .optimizer import (
    Classification,
    OptimizerOptions,
    Provenance,
    StationaryPoint,
    local_minimize,
)
from .simulator import (
    DEFAULT_H_FD,
    TOL_EIG,
    AngleVector,
    HessianMatrix,
    _diag,
    as_angles,
    commutator_expectation_b,
    energy,
    energy_and_gradient,
    hessian,
)

log = logging.getLogger(__name__)

TS_ENERGY_TOL = 1e-12


class TSKind(str, enum.Enum):
    SYMMETRIC = "SYMMETRIC"
    NONSYMMETRIC = "NONSYMMETRIC"


@dataclass
class TransitionStateRecord:
    angles: AngleVector
    parent_id: Optional[str]
    insert_beta: int  # 1-based position of the zero beta
    insert_gamma: int  # 1-based position of the zero gamma
    kind: TSKind
    energy: float

    @property
    def p(self) -> int:
        return self.angles.p

    def parent_angles(self) -> AngleVector:
        """Remove the inserted zeros, recovering the parent angles."""
        return AngleVector(np.delete(self.angles.beta, self.insert_beta - 1),
                           np.delete(self.angles.gamma, self.insert_gamma - 1))

    def zero_gates(self) -> tuple[int, int]:
        """Flat indices (in ``[beta..., gamma...]``) of the two inserted zeros."""
        return self.insert_beta - 1, self.p + self.insert_gamma - 1

    def to_dict(self) -> dict:
        return {
            "angles": self.angles.to_list(),
            "parent_id": self.parent_id,
            "insert_beta": self.insert_beta,
            "insert_gamma": self.insert_gamma,
            "kind": self.kind.value,
            "energy": self.energy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransitionStateRecord":
        return cls(AngleVector.from_flat(d["angles"]), d.get("parent_id"), int(d["insert_beta"]),
                   int(d["insert_gamma"]), TSKind(d["kind"]), float(d["energy"]))


def ts_kind(p: int, insert_beta: int, insert_gamma: int) -> TSKind:
    """Validate a zero placement for a depth-p parent and return its kind."""
    if insert_gamma == insert_beta and 1 <= insert_beta <= p + 1:
        return TSKind.SYMMETRIC
    if insert_gamma == insert_beta + 1 and 1 <= insert_beta <= p:
        return TSKind.NONSYMMETRIC
    raise ContractError(f"inadmissible insertion (beta at {insert_beta}, gamma at {insert_gamma}) for p={p}")


def pad_zeros(a, insert_beta: int, insert_gamma: int) -> AngleVector:
    a = as_angles(a)
    ts_kind(a.p, insert_beta, insert_gamma)
    return AngleVector(np.insert(a.beta, insert_beta - 1, 0.0), np.insert(a.gamma, insert_gamma - 1, 0.0))


def construct_ts(problem, parent: StationaryPoint, insert_beta: int, insert_gamma: int,
                 parent_id: Optional[str] = None) -> TransitionStateRecord:
    if parent.classification != Classification.MINIMUM:
        raise ContractError(f"TS construction needs a MINIMUM parent, got {parent.classification.value}")
    kind = ts_kind(parent.p, insert_beta, insert_gamma)
    angles = pad_zeros(parent.angles, insert_beta, insert_gamma)
    e = energy(problem, angles)
    if abs(e - parent.energy) > TS_ENERGY_TOL * max(1.0, abs(parent.energy)):
        raise ContractError(f"TS energy {e!r} differs from parent energy {parent.energy!r}")
    return TransitionStateRecord(angles, parent_id, insert_beta, insert_gamma, kind, e)


def enumerate_ts(problem, parent: StationaryPoint, parent_id: Optional[str] = None,
                 include_nonsymmetric: bool = True) -> list[TransitionStateRecord]:
    """All ``p+1`` symmetric TS, followed by the ``p`` non-symmetric ones if requested."""
    p = parent.p
    out = [construct_ts(problem, parent, l, l, parent_id) for l in range(1, p + 2)]
    if include_nonsymmetric:
        out += [construct_ts(problem, parent, l, l + 1, parent_id) for l in range(1, p + 1)]
    return out


def index1_direction(hess: HessianMatrix) -> np.ndarray:
    """Unit eigenvector of the single negative Hessian eigenvalue, largest component positive."""
    n_neg, n_zero, _ = hess.inertia
    if n_neg != 1 or n_zero != 0:
        raise ClassificationError(f"not an index-1 saddle: inertia {hess.inertia}")
    v = hess.eigenvectors[:, 0].copy()
    v /= np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def local_support(ts: TransitionStateRecord) -> list[int]:
    """Flat indices of the two zero gates and their immediate neighbours in the gate sequence."""
    p = ts.p
    # gate sequence position s: C_l -> 2(l-1), B_l -> 2(l-1)+1
    def flat(s):
        layer, is_mixer = divmod(s, 2)
        return layer if is_mixer else p + layer

    zb, zg = ts.zero_gates()
    s_first = 2 * (zg - p) if ts.kind == TSKind.SYMMETRIC else 2 * zb + 1
    seq = [s for s in (s_first - 1, s_first, s_first + 1, s_first + 2) if 0 <= s < 2 * p]
    return sorted(flat(s) for s in seq)


def approx_index1_direction(problem, ts: TransitionStateRecord, h_fd: float = DEFAULT_H_FD) -> np.ndarray:
    """Cheap guess of the index-1 direction restricted to the local support of the zeros.

    Only the support columns of the Hessian are probed (at most 4 directional
    differences of the gradient instead of 2(p+1)); the returned vector is the
    lowest eigenvector of that small block, embedded in the full space.
    """
    diag = _diag(problem)
    x = ts.angles.flat
    sup = local_support(ts)
    block = np.empty((len(sup), len(sup)))
    for c, k in enumerate(sup):
        step = np.zeros_like(x)
        step[k] = h_fd
        gp = energy_and_gradient(diag, x + step)[1]
        gm = energy_and_gradient(diag, x - step)[1]
        block[:, c] = ((gp - gm) / (2 * h_fd))[sup]
    w, vecs = np.linalg.eigh(0.5 * (block + block.T))
    v = np.zeros_like(x)
    v[sup] = vecs[:, 0]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v / np.linalg.norm(v)


def support_weight(v: np.ndarray, ts: TransitionStateRecord) -> float:
    """Fraction of ``|v|^2`` carried by the zeros and their neighbours."""
    return float(np.sum(v[local_support(ts)] ** 2) / np.sum(v ** 2))


def descend_from_ts(problem, ts: TransitionStateRecord, v: np.ndarray, eps: float = 1e-2,
                    opts: Optional[OptimizerOptions] = None) -> tuple[StationaryPoint, StationaryPoint]:
    """Minimize from ``ts +- eps * v``; returns ``(plus_branch, minus_branch)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    x = ts.angles.flat
    plus = local_minimize(problem, x + eps * v, opts, Provenance.TS_DESCENT_PLUS)
    minus = local_minimize(problem, x - eps * v, opts, Provenance.TS_DESCENT_MINUS)
    return plus, minus


def smoothness_score(a) -> float:
    """Total variation of the angle schedule across layers; 0 for p < 2."""
    a = as_angles(a)
    return float(np.sum(np.abs(np.diff(a.beta))) + np.sum(np.abs(np.diff(a.gamma))))


def determinant_identity(problem, parent: StationaryPoint, case: str, h_fd: float = DEFAULT_H_FD,
                         tol_eig: float = TOL_EIG) -> tuple[float, float]:
    """Return ``(det H(TS) / det H(parent), -b^2)`` for a boundary symmetric TS.

    ``case="first_layer"`` pads zeros in front, ``case="last_layer"`` appends them.
    """
    p = parent.p
    pos = {"first_layer": 1, "last_layer": p + 1}
    if case not in pos:
        raise ValueError(f"unknown case {case!r}")
    ts = construct_ts(problem, parent, pos[case], pos[case])
    det_ts = hessian(problem, ts.angles, h_fd, tol_eig).determinant
    det_parent = hessian(problem, parent.angles, h_fd, tol_eig).determinant
    b = commutator_expectation_b(problem, parent.angles, case)
    return det_ts / det_parent, -b * b
