"""Initialization graph of minima: TS-mediated descents between consecutive depths."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClassificationError, ContractError
from .landscape import descend_from_ts, enumerate_ts, index1_direction, smoothness_score
from .optimizer import Classification, OptimizerOptions, StationaryPoint, grid_search_p1
from .problem import ProblemGraph, cost_diagonal
from .simulator import AngleVector, approximation_ratio, hessian
from .symmetry import fold_for, fold_to_fundamental

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MONOTONE_TOL = 1e-9


@dataclass
class MinimumNode:
    id: str
    p: int
    angles: AngleVector  # folded
    energy: float
    ratio: float
    smoothness: float

    def to_dict(self) -> dict:
        return {"id": self.id, "p": self.p, "angles": self.angles.to_list(), "energy": self.energy,
                "ratio": self.ratio, "smoothness": self.smoothness}

    @classmethod
    def from_dict(cls, d: dict) -> "MinimumNode":
        return cls(d["id"], int(d["p"]), AngleVector.from_flat(d["angles"]), float(d["energy"]),
                   float(d["ratio"]), float(d["smoothness"]))


@dataclass
class InitEdge:
    parent: str
    child: str
    insert_beta: int
    insert_gamma: int
    sign: int  # +1 or -1 branch

    def to_dict(self) -> dict:
        return {"parent": self.parent, "child": self.child, "insert_beta": self.insert_beta,
                "insert_gamma": self.insert_gamma, "sign": self.sign}


@dataclass
class InitGraph:
    nodes: dict = field(default_factory=dict)  # id -> MinimumNode
    edges: list = field(default_factory=list)
    levels: dict = field(default_factory=dict)  # p -> [ids], lowest energy first

    def add_node(self, node: MinimumNode) -> None:
        self.nodes[node.id] = node
        self.levels.setdefault(node.p, []).append(node.id)

    def level_energies(self, p: int) -> np.ndarray:
        return np.array([self.nodes[i].energy for i in self.levels.get(p, [])])

    def unique_counts(self) -> dict:
        return {p: len(ids) for p, ids in sorted(self.levels.items())}

    def best(self, p: int) -> MinimumNode:
        return min((self.nodes[i] for i in self.levels[p]), key=lambda n: n.energy)

    def check(self) -> None:
        """Raise ContractError if a structural invariant is violated."""
        for e in self.edges:
            a, b = self.nodes[e.parent], self.nodes[e.child]
            if b.p != a.p + 1:
                raise ContractError(f"edge {e.parent}->{e.child} skips a level")
            if b.energy > a.energy + MONOTONE_TOL:
                raise ContractError(f"edge {e.parent}->{e.child} raises the energy")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "nodes": [self.nodes[i].to_dict() for p in sorted(self.levels) for i in self.levels[p]],
            "edges": [e.to_dict() for e in self.edges],
            "levels": {str(p): list(ids) for p, ids in sorted(self.levels.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InitGraph":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ContractError(f"unsupported init-graph schema {d.get('schema_version')!r}")
        nodes = {n["id"]: MinimumNode.from_dict(n) for n in d["nodes"]}
        edges = [InitEdge(e["parent"], e["child"], int(e["insert_beta"]), int(e["insert_gamma"]), int(e["sign"]))
                 for e in d["edges"]]
        levels = {int(p): list(ids) for p, ids in d["levels"].items()}
        return cls(nodes, edges, levels)

    def __eq__(self, other) -> bool:
        return isinstance(other, InitGraph) and self.to_dict() == other.to_dict()


def _same(a: StationaryPoint, b: StationaryPoint, tol: float) -> bool:
    return (abs(a.energy - b.energy) < 10 * tol
            and float(np.max(np.abs(a.angles.flat - b.angles.flat))) < tol)


def dedup_minima(points: list, tol: float = 1e-5, odd_regular: bool = True, integer_weights: bool = True):
    """Symmetry-aware deduplication of same-depth points.

    Points are folded, then grouped greedily in energy order; each group is
    represented by its lowest-energy member (returned with folded angles).
    Returns ``(representatives, owner)`` where ``owner[i]`` indexes the
    representative of input ``i``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len({pt.p for pt in points}) > 1:
        raise ContractError("dedup_minima needs points of a single depth")
    folded = [
        StationaryPoint(fold_to_fundamental(pt.angles, odd_regular, integer_weights), pt.energy, pt.grad_norm,
                        pt.inertia, pt.classification, pt.iterations, pt.provenance, pt.converged, pt.eigenvalues)
        for pt in points
    ]
    order = sorted(range(len(folded)), key=lambda i: (folded[i].energy, tuple(folded[i].angles.flat)))
    reps: list = []
    owner = [0] * len(folded)
    for i in order:
        for k, r in enumerate(reps):
            if _same(folded[i], r, tol):
                owner[i] = k
                break
        else:
            owner[i] = len(reps)
            reps.append(folded[i])
    return reps, owner


def _descend_node(diag, parent: StationaryPoint, eps: float, opts: OptimizerOptions):
    """All (ts, sign, child) descents from the symmetric TS of one minimum."""
    out = []
    for ts in enumerate_ts(diag, parent, include_nonsymmetric=False):
        hess = hessian(diag, ts.angles, opts.h_fd, opts.tol_eig)
        try:
            v = index1_direction(hess)
        except ClassificationError:
            log.info("skipping TS (beta@%d) with inertia %s", ts.insert_beta, hess.inertia)
            continue
        for sign, child in zip((1, -1), descend_from_ts(diag, ts, v, eps, opts)):
            if not child.converged or child.classification != Classification.MINIMUM:
                log.info("branch %+d from TS (beta@%d) rejected: %s", sign, ts.insert_beta, child.classification.value)
                continue
            out.append((ts, sign, child))
    return out


def build_init_graph(g: ProblemGraph, p_max: int, dedup_tol: float = 1e-5, expand_cap: Optional[int] = 50,
                     eps: float = 1e-2, opts: Optional[OptimizerOptions] = None, grid_resolution: int = 32,
                     seed_point: Optional[StationaryPoint] = None) -> InitGraph:
    """Expand the lowest ``expand_cap`` nodes per level (all of them if ``None``)."""
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    opts = opts or OptimizerOptions()
    diag = cost_diagonal(g)
    odd, intw = g.odd_regular, g.integer_weights

    def node_of(pt: StationaryPoint, idx: int) -> MinimumNode:
        return MinimumNode(f"p{pt.p}_{idx}", pt.p, pt.angles, pt.energy,
                           approximation_ratio(pt.energy, diag.c_min), smoothness_score(pt.angles))

    root = seed_point or grid_search_p1(g, grid_resolution, opts)
    root = StationaryPoint(fold_for(g, root.angles), root.energy, root.grad_norm, root.inertia,
                           root.classification, root.iterations, root.provenance, root.converged)
    gr = InitGraph()
    gr.add_node(node_of(root, 0))
    frontier = [(gr.levels[1][0], root)]
    for p in range(1, p_max):
        if expand_cap is not None:
            frontier = frontier[:expand_cap]
        raw = []  # (parent_id, ts, sign, child)
        for pid, parent in frontier:
            raw += [(pid, ts, s, c) for ts, s, c in _descend_node(diag, parent, eps, opts)]
        if not raw:
            log.warning("no minima reached at depth %d", p + 1)
            break
        reps, owner = dedup_minima([c for *_, c in raw], dedup_tol, odd, intw)
        ids = []
        for k, rep in enumerate(reps):
            node = node_of(rep, k)
            gr.add_node(node)
            ids.append(node.id)
        seen = set()
        for (pid, ts, sign, _), k in zip(raw, owner):
            key = (pid, ids[k], ts.insert_beta, ts.insert_gamma, sign)
            if key not in seen:
                seen.add(key)
                gr.edges.append(InitEdge(pid, ids[k], ts.insert_beta, ts.insert_gamma, sign))
        frontier = list(zip(ids, reps))
    gr.check()
    return gr


def export_graph(gr: InitGraph, fmt: str = "JSON") -> bytes:
    fmt = fmt.upper()
    if fmt == "JSON":
        return json.dumps(gr.to_dict(), indent=1, sort_keys=True).encode()
    if fmt == "DOT":
        lines = ["digraph init {", "  rankdir=TB;"]
        for p, ids in sorted(gr.levels.items()):
            lines.append(f"  {{ rank=same; // p={p}")
            for i in ids:
                lines.append(f'    "{i}" [label="p={p}\\nr={gr.nodes[i].ratio:.4f}"];')
            lines.append("  }")
        for e in gr.edges:
            lines.append(f'  "{e.parent}" -> "{e.child}" [label="{e.insert_beta}{"+" if e.sign > 0 else "-"}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown export format {fmt!r}")


def import_graph(data) -> InitGraph:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    return InitGraph.from_dict(json.loads(data))


def naive_minima_bound(p: int) -> int:
    """Upper bound 2^(p-1) p! on distinct minima reached by full expansion to depth p."""
    return 2 ** (p - 1) * int(np.prod(np.arange(1, p + 1)))


def fit_exponential(counts: dict) -> tuple[float, float]:
    """Least-squares fit ``N(p) = A exp(k p)`` in log space; returns ``(A, k)``."""
    ps = np.array(sorted(counts), dtype=float)
    ns = np.array([counts[int(p)] for p in ps], dtype=float)
    if len(ps) < 2 or np.any(ns <= 0):
        raise ValueError("need at least two positive counts")
    k, log_a = np.polyfit(ps, np.log(ns), 1)
    return float(np.exp(log_a)), float(k)
