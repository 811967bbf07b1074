import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from greedy_qaoa.errors import ContractError
from greedy_qaoa.initgraph import (
    InitGraph,
    build_init_graph,
    dedup_minima,
    export_graph,
    fit_exponential,
    import_graph,
    naive_minima_bound,
)
from greedy_qaoa.optimizer import StationaryPoint
from greedy_qaoa.simulator import AngleVector, energy
from greedy_qaoa.symmetry import symmetry_image


@pytest.fixture(scope="module")
def graph(rrg8, rrg8_min):
    return build_init_graph(rrg8, 4, expand_cap=None, seed_point=rrg8_min)


def test_structure(graph):
    graph.check()
    counts = graph.unique_counts()
    assert counts[1] == 1 and counts[2] <= 4
    for p, c in counts.items():
        assert c <= naive_minima_bound(p)
    for p in range(1, 4):
        n_edges = sum(1 for e in graph.edges if graph.nodes[e.parent].p == p)
        assert n_edges <= 2 * (p + 1) * counts[p]
    best = [graph.best(p).energy for p in sorted(graph.levels)]
    assert np.all(np.diff(best) <= 1e-9)


def test_nodes_folded(graph, rrg8):
    from greedy_qaoa.symmetry import fold_for
    for node in graph.nodes.values():
        assert fold_for(rrg8, node.angles) == node.angles
        assert energy(rrg8, node.angles) == pytest.approx(node.energy, abs=1e-10)


def test_json_roundtrip(graph):
    data = export_graph(graph, "JSON")
    back = import_graph(data)
    assert back == graph
    d = json.loads(data)
    assert len(d["nodes"]) == len(graph.nodes) and len(d["edges"]) == len(graph.edges)


def test_dot_export(graph, rrg8, rrg8_min):
    dot = export_graph(graph, "dot").decode()
    assert dot.count("->") == len(graph.edges)
    assert dot.count("[label=\"p=") == len(graph.nodes)
    single = InitGraph()
    root = build_init_graph(rrg8, 2, seed_point=rrg8_min)
    single.add_node(root.nodes["p1_0"])
    assert export_graph(single, "DOT").decode().count("[label=\"p=") == 1
    with pytest.raises(ValueError):
        export_graph(graph, "XML")


def test_bad_schema():
    with pytest.raises(ContractError):
        import_graph(b'{"schema_version": 99, "nodes": [], "edges": [], "levels": {}}')


def test_build_requires_depth(rrg8):
    with pytest.raises(ValueError):
        build_init_graph(rrg8, 1)


def _pt(a, e):
    return StationaryPoint(a, e, 0.0)


def test_dedup_examples(rrg8_min):
    m = rrg8_min
    reps, owner = dedup_minima([m, m])
    assert len(reps) == 1 and owner == [0, 0]
    img = symmetry_image(m.angles, "iv", 1, 1)
    reps, _ = dedup_minima([m, _pt(img, m.energy)])
    assert len(reps) == 1
    with pytest.raises(ContractError):
        dedup_minima([m, _pt(AngleVector.zeros(2), 0.0)])
    with pytest.raises(ValueError):
        dedup_minima([m], tol=0)


@given(seed=st.integers(0, 2**31))
def test_dedup_properties(seed, rrg8):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 4))
    bases = [AngleVector(rng.uniform(-0.7, 0.7, p), rng.uniform(0.05, 0.7, p)) for _ in range(3)]
    pts = []
    for b in bases:
        for _ in range(4):
            kind = str(rng.choice(["i", "ii", "iii", "iv", "iv_prime"]))
            a = symmetry_image(b, kind, int(rng.integers(1, p + 1)), int(rng.choice([-1, 1])))
            a = AngleVector.from_flat(a.flat + rng.uniform(-1e-8, 1e-8, 2 * p))
            pts.append(_pt(a, energy(rrg8, a)))
    reps, _ = dedup_minima(pts)
    again, _ = dedup_minima(reps)
    assert [r.angles for r in again] == [r.angles for r in reps]
    assert min(r.energy for r in reps) == min(x.energy for x in pts)
    assert len(reps) == len(bases)  # perturbations are far below the tolerance


def test_fit_exponential():
    a, k = fit_exponential({p: 0.19 * np.exp(0.98 * p) for p in range(1, 7)})
    assert a == pytest.approx(0.19) and k == pytest.approx(0.98)
    with pytest.raises(ValueError):
        fit_exponential({1: 1})
