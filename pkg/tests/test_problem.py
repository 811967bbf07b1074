import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from greedy_qaoa.errors import CapacityError, GraphGenerationError
from greedy_qaoa.problem import (
    ProblemGraph,
    cost_diagonal,
    generate_graph,
    instance_seeds,
    load_graph,
    maxcut_optimum,
    sample_ensemble,
    save_graph,
    spectrum_signature,
)

from oracles import brute_force_maxcut


def test_rrg3_n4_is_k4():
    for seed in range(5):
        g = generate_graph("RRG3", 4, seed)
        assert {(u, v) for u, v, _ in g.edges} == {(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}


@given(st.sampled_from([4, 6, 8, 10, 12]), st.integers(0, 2**32 - 1))
def test_rrg3_is_simple_and_cubic(n, seed):
    g = generate_graph("RRG3", n, seed)
    assert len(g.edges) == 3 * n // 2
    assert np.all(g.degrees == 3)
    assert g.odd_regular and g.unweighted


def test_wrrg3_weights():
    g = generate_graph("WRRG3", 10, 3)
    w = np.array([e[2] for e in g.edges])
    assert len(g.edges) == 15 and np.all(g.degrees == 3)
    assert np.all((w >= 0) & (w < 1))
    assert not g.odd_regular and not g.integer_weights


def test_er_edge_density():
    counts = [len(generate_graph("ER", 10, s, 0.5).edges) for s in range(400)]
    assert abs(np.mean(counts) - 22.5) < 0.6  # 45 * 0.5, sd of mean ~0.17
    assert generate_graph("ER", 10, 7, 0.5) == generate_graph("ER", 10, 7, 0.5)


def test_generation_is_deterministic():
    assert generate_graph("RRG3", 10, 11) == generate_graph("RRG3", 10, 11)
    assert generate_graph("RRG3", 10, 11) != generate_graph("RRG3", 10, 12)


@pytest.mark.parametrize("n", [5, 7, 2])
def test_infeasible_regular(n):
    with pytest.raises(GraphGenerationError):
        generate_graph("RRG3", n, 0)


def test_retry_budget_exhausted():
    with pytest.raises(GraphGenerationError):
        generate_graph("RRG3", 12, 0, retry_budget=0)


@pytest.mark.parametrize("edges", [((0, 0, 1.0),), ((0, 1, 1.0), (1, 0, 1.0)), ((0, 5, 1.0),)])
def test_invalid_graphs(edges):
    with pytest.raises(ValueError):
        ProblemGraph(3, edges)


def test_single_edge_diagonal(edge):
    d = cost_diagonal(edge)
    np.testing.assert_array_equal(d.values, [1, -1, -1, 1])
    assert d.c_min == -1
    c, arg = maxcut_optimum(edge)
    assert c == -1 and sorted(arg) == ["01", "10"]


def test_triangle_and_k4():
    tri = ProblemGraph(3, ((0, 1, 1), (1, 2, 1), (0, 2, 1)))
    assert cost_diagonal(tri).c_min == -1
    k4 = generate_graph("RRG3", 4, 0)
    assert maxcut_optimum(k4)[0] == -2


@pytest.mark.parametrize("ens,seed", [("RRG3", 1), ("ER", 2), ("WRRG3", 3)])
def test_cmin_matches_brute_force(ens, seed):
    g = generate_graph(ens, 10, seed)
    c, arg = maxcut_optimum(g)
    c_ref, arg_ref = brute_force_maxcut(g.n, g.edges)
    assert c == pytest.approx(c_ref, abs=1e-12)
    assert len(arg) == len(arg_ref)
    # bitstrings are MSB first: last character is qubit 0
    ref = {"".join("0" if s == 1 else "1" for s in reversed(col)) for col in arg_ref}
    assert set(arg) == ref


@given(st.integers(0, 2**32 - 1))
def test_diagonal_invariants(seed):
    g = generate_graph("RRG3", 8, seed)
    v = cost_diagonal(g).values
    assert v.size == 256
    assert np.all(v == np.round(v)) and np.all(np.abs(v) <= len(g.edges))
    np.testing.assert_array_equal(v, v[::-1])  # global bit flip z -> ~z


def test_capacity():
    with pytest.raises(CapacityError):
        cost_diagonal(ProblemGraph(30, ((0, 1, 1.0),)))


def test_save_load_roundtrip(tmp_path):
    g = generate_graph("WRRG3", 8, 4)
    save_graph(g, tmp_path / "g.json")
    assert load_graph(tmp_path / "g.json") == g
    assert json.loads((tmp_path / "g.json").read_text())["n"] == 8


def test_seed_split_and_ensemble():
    assert instance_seeds(0, 5) == instance_seeds(0, 5)
    assert len(set(instance_seeds(0, 50))) == 50
    gs = sample_ensemble("RRG3", 10, 19, global_seed=0)
    assert len({spectrum_signature(g) for g in gs}) == 19
    assert [g.seed for g in gs] == [g.seed for g in sample_ensemble("RRG3", 10, 19, global_seed=0)]


def test_ensemble_exhaustion():
    # only two non-isomorphic cubic graphs exist on 6 vertices
    with pytest.raises(GraphGenerationError):
        sample_ensemble("RRG3", 6, 3, max_draws=200)
