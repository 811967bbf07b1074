"""Exact statevector simulation of the QAOA ansatz.

Layer ``l`` applies ``exp(-i gamma_l H_C)`` followed by ``exp(-i beta_l H_B)`` with
``H_B = -sum_k X_k``, so each mixer factor is ``exp(+i beta_l X_k)``.
Angle vectors are flattened as ``[beta_1..beta_p, gamma_1..gamma_p]``, which is
also the row/column order of every gradient and Hessian.
"""
from __future__ import annotations

import contextlib
import functools
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ContractError, DimensionError, InvalidProblemError, NumericalError
from .problem import CostDiagonal, ProblemGraph, cost_diagonal

Problem = Union[ProblemGraph, CostDiagonal]

TOL_EIG = 1e-7
DEFAULT_H_FD = 1e-4

# Mutation hook for the verification suite: -1 flips the mixer rotation sense in
# the propagators only, leaving the H_B generator used by the gradient untouched.
_mixer_sign = 1.0


@contextlib.contextmanager
def mixer_sign_fault():
    """Temporarily inject a sign error into the mixer propagator (testing only)."""
    global _mixer_sign
    _mixer_sign = -1.0
    try:
        yield
    finally:
        _mixer_sign = 1.0


@dataclass
class AngleVector:
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float)).copy()
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float)).copy()
        if self.beta.ndim != 1 or self.beta.shape != self.gamma.shape:
            raise DimensionError(f"beta {self.beta.shape} and gamma {self.gamma.shape} must be equal-length vectors")
        if not (np.all(np.isfinite(self.beta)) and np.all(np.isfinite(self.gamma))):
            raise ValueError("angles must be finite")

    @property
    def p(self) -> int:
        return self.beta.size

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.beta, self.gamma])

    @classmethod
    def from_flat(cls, x) -> "AngleVector":
        x = np.asarray(x, dtype=float)
        if x.size % 2:
            raise DimensionError("flat angle vector must have even length")
        p = x.size // 2
        return cls(x[:p], x[p:])

    @classmethod
    def zeros(cls, p: int) -> "AngleVector":
        return cls(np.zeros(p), np.zeros(p))

    def to_list(self) -> list:
        return self.flat.tolist()

    def __eq__(self, other):
        if not isinstance(other, AngleVector):
            return NotImplemented
        return np.array_equal(self.beta, other.beta) and np.array_equal(self.gamma, other.gamma)

    def __repr__(self):
        return f"AngleVector(beta={self.beta.tolist()}, gamma={self.gamma.tolist()})"


def as_angles(a) -> AngleVector:
    return a if isinstance(a, AngleVector) else AngleVector.from_flat(a)


def _diag(problem: Problem) -> np.ndarray:
    if isinstance(problem, CostDiagonal):
        return problem.values
    if isinstance(problem, ProblemGraph):
        return cost_diagonal(problem).values
    return np.asarray(problem, dtype=float)


def _nqubits(diag: np.ndarray) -> int:
    n = int(diag.size).bit_length() - 1
    if diag.size != 1 << n:
        raise DimensionError(f"diagonal length {diag.size} is not a power of two")
    return n


@functools.lru_cache(maxsize=None)
def _hamming(m: int) -> np.ndarray:
    x = np.arange(1 << m)
    d = x[:, None] ^ x[None, :]
    return np.array([bin(int(v)).count("1") for v in d.ravel()], dtype=np.int64).reshape(d.shape)


@functools.lru_cache(maxsize=None)
def _split(n: int):
    """Qubits 0..a-1 index the fast (column) axis, a..n-1 the slow (row) axis."""
    a = n // 2
    b = n - a
    return a, b, _hamming(a), _hamming(b), (_hamming(a) == 1).astype(float), (_hamming(b) == 1).astype(float)


def _rotation_power(theta: float, dist: np.ndarray, m: int) -> np.ndarray:
    # (cos t I + i sin t X)^{(x) m} has entry cos^{m-d} (i sin)^d, d = Hamming distance
    d = np.arange(m + 1)
    vals = np.cos(theta) ** (m - d) * (1j * np.sin(theta)) ** d
    return vals[dist]


def _mixer_factors(beta: float, n: int):
    a, b, da, db, _, _ = _split(n)
    theta = _mixer_sign * beta
    return _rotation_power(theta, db, b), _rotation_power(theta, da, a)


def apply_mixer(psi: np.ndarray, beta: float, n: int) -> np.ndarray:
    """Return ``exp(-i beta H_B) psi`` for ``H_B = -sum X_k``.

    ``psi`` may carry leading batch axes; the last axis is the 2^n amplitudes.
    """
    a, b = _split(n)[:2]
    left, right = _mixer_factors(beta, n)
    shape = psi.shape
    out = left @ psi.reshape(shape[:-1] + (1 << b, 1 << a)) @ right
    return out.reshape(shape)


def apply_hb(psi: np.ndarray, n: int) -> np.ndarray:
    """Return ``H_B psi = -sum_k X_k psi``."""
    a, b, _, _, sa, sb = _split(n)
    mat = psi.reshape(1 << b, 1 << a)
    return -(sb @ mat + mat @ sa).reshape(-1)


def plus_state(n: int) -> np.ndarray:
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)


def _evolve_from(diag: np.ndarray, beta, gamma, psi: np.ndarray) -> np.ndarray:
    n = _nqubits(diag)
    for b_l, g_l in zip(beta, gamma):
        psi = np.exp(-1j * g_l * diag) * psi
        psi = apply_mixer(psi, b_l, n)
    return psi


def _evolve(diag: np.ndarray, beta, gamma) -> np.ndarray:
    return _evolve_from(diag, beta, gamma, plus_state(_nqubits(diag)))


def _unevolve(diag: np.ndarray, beta, gamma, psi: np.ndarray) -> np.ndarray:
    """Apply the inverse of the full ansatz unitary to ``psi``."""
    n = _nqubits(diag)
    for b_l, g_l in zip(beta[::-1], gamma[::-1]):
        psi = apply_mixer(psi, -b_l, n)
        psi = np.exp(1j * g_l * diag) * psi
    return psi


def evolve(problem: Problem, a) -> np.ndarray:
    """Ansatz state ``prod_l exp(-i beta_l H_B) exp(-i gamma_l H_C) |+>^n``."""
    a = as_angles(a)
    return _evolve(_diag(problem), a.beta, a.gamma)


def _expect_diag(diag, psi) -> float:
    return float(np.dot(diag, (psi.real ** 2 + psi.imag ** 2)))


def energy(problem: Problem, a) -> float:
    a = as_angles(a)
    diag = _diag(problem)
    return _expect_diag(diag, _evolve(diag, a.beta, a.gamma))


def energy_and_gradient(problem: Problem, a) -> tuple[float, np.ndarray]:
    """Energy and its exact gradient from one forward and one reverse (adjoint) sweep."""
    a = as_angles(a)
    diag = _diag(problem)
    n = _nqubits(diag)
    p = a.p
    psi = _evolve(diag, a.beta, a.gamma)
    lam = diag * psi
    e = float(np.vdot(psi, lam).real)
    grad = np.empty(2 * p)
    pair = np.stack([psi, lam])
    for l in range(p - 1, -1, -1):
        # pair = (U_{<=l}|+>, U_{>l}^dag H_C |psi_final>)
        grad[l] = 2.0 * np.vdot(pair[1], apply_hb(pair[0], n)).imag
        pair = apply_mixer(pair, -a.beta[l], n)
        grad[p + l] = 2.0 * np.vdot(pair[1], diag * pair[0]).imag
        pair = np.exp(1j * a.gamma[l] * diag) * pair
    return e, grad


def gradient(problem: Problem, a) -> np.ndarray:
    if as_angles(a).p < 1:
        raise ContractError("gradient requires p >= 1")
    return energy_and_gradient(problem, a)[1]


def approximation_ratio(e: float, c_min: float) -> float:
    if c_min >= 0:
        raise InvalidProblemError(f"approximation ratio undefined for c_min={c_min} >= 0")
    return e / c_min


@dataclass
class HessianMatrix:
    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    inertia: tuple
    tol_eig: float = TOL_EIG

    @property
    def singular(self) -> bool:
        return self.inertia[1] > 0

    @property
    def determinant(self) -> float:
        return float(np.prod(self.eigenvalues))


def inertia_of(eigenvalues: np.ndarray, tol_eig: float = TOL_EIG) -> tuple:
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    cut = tol_eig * scale
    n_zero = int(np.sum(np.abs(eigenvalues) <= cut))
    n_neg = int(np.sum(eigenvalues < -cut))
    return n_neg, n_zero, eigenvalues.size - n_neg - n_zero


def hessian_from_matrix(h: np.ndarray, tol_eig: float = TOL_EIG) -> HessianMatrix:
    h = 0.5 * (h + h.T)
    if not np.all(np.isfinite(h)):
        raise NumericalError("Hessian has non-finite entries")
    w, v = np.linalg.eigh(h)
    return HessianMatrix(h, w, v, inertia_of(w, tol_eig), tol_eig)


def hessian(problem: Problem, a, h_fd: float = DEFAULT_H_FD, tol_eig: float = TOL_EIG) -> HessianMatrix:
    """Central differences of the analytic gradient, symmetrized."""
    if h_fd <= 0:
        raise ValueError("h_fd must be positive")
    x = as_angles(a).flat
    if x.size < 2:
        raise ContractError("hessian requires p >= 1")
    diag = _diag(problem)
    m = x.size
    h = np.empty((m, m))
    for k in range(m):
        step = np.zeros(m)
        step[k] = h_fd
        gp = energy_and_gradient(diag, x + step)[1]
        gm = energy_and_gradient(diag, x - step)[1]
        h[:, k] = (gp - gm) / (2 * h_fd)
    return hessian_from_matrix(h, tol_eig)


def _commutator(op_a, op_b):
    return lambda v: op_a(op_b(v)) - op_b(op_a(v))


def commutator_expectation_b(problem: Problem, a, case: str, stationary_tol: float = 1e-6) -> float:
    """Mixed second derivative ``b`` governing the Hessian determinant at a boundary TS.

    ``case="last_layer"``: ``b = <psi|[[H_B, H_C], H_C]|psi>`` with ``psi`` the
    state at ``a``. ``case="first_layer"``: ``b = <+|[H_C, [U^dag H_C U, H_B]]|+>``
    with ``U`` the ansatz unitary at ``a``. Operators are applied to vectors only.
    """
    a = as_angles(a)
    diag = _diag(problem)
    n = _nqubits(diag)
    if a.p >= 1:
        gnorm = float(np.max(np.abs(energy_and_gradient(diag, a)[1])))
        if gnorm >= stationary_tol:
            raise ContractError(f"commutator b requires a stationary point (|grad|_inf = {gnorm:.2e})")

    def op_c(v):
        return diag * v

    def op_b(v):
        return apply_hb(v, n)

    if case == "last_layer":
        psi = _evolve(diag, a.beta, a.gamma)
        op = _commutator(_commutator(op_b, op_c), op_c)
    elif case == "first_layer":
        psi = plus_state(n)

        def op_k(v):
            return _unevolve(diag, a.beta, a.gamma, diag * _evolve_from(diag, a.beta, a.gamma, v))

        op = _commutator(op_c, _commutator(op_k, op_b))
    else:
        raise ValueError(f"unknown case {case!r}")
    val = np.vdot(psi, op(psi))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalError(f"commutator expectation has imaginary part {val.imag:.3e}")
    return float(val.real)

