"""MaxCut problem instances: random graph ensembles, cost diagonals, brute-force optimum.

Bit ``k`` of a computational-basis index ``z`` encodes qubit ``k`` (qubit 0 is the
least-significant bit); spin ``s_k(z) = +1`` when that bit is 0 and ``-1`` otherwise.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import CapacityError, GraphGenerationError

ENSEMBLES = ("RRG3", "WRRG3", "ER")
MAX_QUBITS = 24
REGULAR_RETRY_BUDGET = 10_000


@dataclass(frozen=True)
class ProblemGraph:
    """Weighted undirected graph defining ``H_C = sum_{(u,v,w)} w Z_u Z_v``."""

    n: int
    edges: tuple  # ((u, v, w), ...) with u < v
    ensemble: str = "CUSTOM"
    seed: Optional[int] = None
    p_E: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = []
        seen = set()
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def unweighted(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    @property
    def integer_weights(self) -> bool:
        return all(float(w).is_integer() for _, _, w in self.edges)

    @property
    def odd_regular(self) -> bool:
        """Unit weights and every vertex of odd degree.

        This is the condition under which ``exp(-i pi/2 H_C)`` acts as a global
        product of ``Z`` operators, which enables the extra gamma-shift symmetry.
        """
        return self.unweighted and len(self.edges) > 0 and bool(np.all(self.degrees % 2 == 1))

    def to_dict(self) -> dict:
        d = {"n": self.n, "ensemble": self.ensemble, "seed": self.seed}
        if self.p_E is not None:
            d["p_E"] = self.p_E
        d["edges"] = [[u, v, w] for u, v, w in self.edges]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemGraph":
        return cls(
            n=int(d["n"]),
            edges=tuple(tuple(e) for e in d["edges"]),
            ensemble=d.get("ensemble", "CUSTOM"),
            seed=d.get("seed"),
            p_E=d.get("p_E"),
        )


def save_graph(g: ProblemGraph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict(), indent=2) + "\n")


def load_graph(path) -> ProblemGraph:
    return ProblemGraph.from_dict(json.loads(Path(path).read_text()))


def _configuration_model(n: int, d: int, rng: np.random.Generator, budget: int):
    stubs = np.repeat(np.arange(n), d)
    for _ in range(budget):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(min(a, b)), int(max(a, b))) for a, b in pairs}
        if len(edges) != len(pairs):
            continue
        return sorted(edges)
    raise GraphGenerationError(f"configuration model failed after {budget} attempts (n={n}, d={d})")


def generate_graph(ensemble: str, n: int, seed: int, p_E: Optional[float] = None,
                   retry_budget: int = REGULAR_RETRY_BUDGET) -> ProblemGraph:
    """Sample one graph from ``RRG3``, ``WRRG3`` (weights in [0, 1)) or ``ER``.

    Output is a deterministic function of ``(ensemble, n, seed, p_E)``.
    """
    ensemble = ensemble.upper()
    if ensemble not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
    if n < 2:
        raise GraphGenerationError("need n >= 2")
    rng = np.random.default_rng(seed)
    if ensemble in ("RRG3", "WRRG3"):
        if (3 * n) % 2 or n < 4:
            raise GraphGenerationError(f"no 3-regular graph exists on n={n} vertices")
        pairs = _configuration_model(n, 3, rng, retry_budget)
        if ensemble == "RRG3":
            edges = tuple((u, v, 1.0) for u, v in pairs)
        else:
            weights = rng.random(len(pairs))
            edges = tuple((u, v, float(w)) for (u, v), w in zip(pairs, weights))
        return ProblemGraph(n, edges, ensemble, seed, None)
    if p_E is None:
        p_E = 0.5
    if not 0.0 < p_E < 1.0:
        raise GraphGenerationError("ER edge probability must lie in (0, 1)")
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p_E
    edges = tuple((int(u), int(v), 1.0) for u, v in zip(iu[keep], iv[keep]))
    return ProblemGraph(n, edges, ensemble, seed, float(p_E))


def spectrum_signature(g: ProblemGraph, decimals: int = 8) -> tuple:
    """Cheap isomorphism invariant: sorted degrees plus sorted weighted-adjacency spectrum."""
    adj = np.zeros((g.n, g.n))
    for u, v, w in g.edges:
        adj[u, v] = adj[v, u] = w
    spec = np.round(np.linalg.eigvalsh(adj), decimals) + 0.0
    return tuple(sorted(g.degrees.tolist())) + tuple(spec.tolist())


def instance_seeds(global_seed: int, count: int) -> list[int]:
    """Deterministic per-instance seeds split from one global seed (counter-mode)."""
    out = []
    for k in range(count):
        ss = np.random.SeedSequence(entropy=global_seed, spawn_key=(k,))
        out.append(int(ss.generate_state(1, dtype=np.uint32)[0]))
    return out


def sample_ensemble(ensemble: str, n: int, count: int, global_seed: int = 0,
                    p_E: Optional[float] = None, max_draws: Optional[int] = None) -> list[ProblemGraph]:
    """Draw ``count`` graphs with pairwise distinct spectrum signatures.

    Seeds are consumed in counter order; a draw whose signature collides with an
    earlier graph is skipped. This is a proxy for non-isomorphism, not a proof.
    """
    max_draws = max_draws or 50 * count
    seeds = instance_seeds(global_seed, max_draws)
    graphs, sigs = [], set()
    for s in seeds:
        g = generate_graph(ensemble, n, s, p_E)
        sig = spectrum_signature(g)
        if sig in sigs:
            continue
        sigs.add(sig)
        graphs.append(g)
        if len(graphs) == count:
            return graphs
    raise GraphGenerationError(f"only {len(graphs)} distinct graphs found in {max_draws} draws")


@dataclass(frozen=True)
class CostDiagonal:
    values: np.ndarray
    c_min: float
    c_max: float

    @property
    def n(self) -> int:
        return int(self.values.size).bit_length() - 1


def spins(n: int) -> np.ndarray:
    """Array ``s[k, z]`` of spin values (+1/-1) for qubit ``k`` in basis state ``z``."""
    z = np.arange(1 << n, dtype=np.int64)
    return 1 - 2 * ((z[None, :] >> np.arange(n)[:, None]) & 1)


@functools.lru_cache(maxsize=128)
def cost_diagonal(g: ProblemGraph) -> CostDiagonal:
    if g.n > MAX_QUBITS:
        raise CapacityError(f"n={g.n} exceeds the supported maximum of {MAX_QUBITS} qubits")
    z = np.arange(1 << g.n, dtype=np.int64)
    vals = np.zeros(z.size)
    for u, v, w in g.edges:
        # s_u s_v = +1 iff the two bits agree
        agree = ((z >> u) ^ (z >> v)) & 1
        vals += w * (1 - 2 * agree)
    vals.setflags(write=False)
    return CostDiagonal(vals, float(vals.min()), float(vals.max()))


def maxcut_optimum(g: ProblemGraph) -> tuple[float, list[str]]:
    """Exact minimum of ``H_C`` and every attaining bitstring.

    Bitstrings are written most-significant qubit first, so the last character
    is qubit 0.
    """
    if g.n > MAX_QUBITS:
        raise CapacityError(f"n={g.n} exceeds the supported maximum of {MAX_QUBITS} qubits")
    diag = cost_diagonal(g)
    idx = np.flatnonzero(diag.values == diag.c_min)
    return diag.c_min, [format(int(z), f"0{g.n}b") for z in idx]
