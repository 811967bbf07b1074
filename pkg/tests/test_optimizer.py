import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize, rosen, rosen_der

from greedy_qaoa.errors import ConvergenceError
from greedy_qaoa.optimizer import (
    Classification,
    OptimizerOptions,
    Provenance,
    StationaryPoint,
    bfgs,
    classify_inertia,
    fundamental_grid_p1,
    grid_search_p1,
    local_minimize,
)
from greedy_qaoa.problem import generate_graph
from greedy_qaoa.simulator import AngleVector, energy
from greedy_qaoa.symmetry import in_fundamental_region

from oracles import dense_energy


def test_bfgs_rosenbrock():
    x, f, g, it, ok = bfgs(lambda x: (rosen(x), rosen_der(x)), np.array([-1.2, 1.0, 0.5]), max_step=10.0)
    assert ok and np.max(np.abs(g)) < 1e-8
    np.testing.assert_allclose(x, 1.0, atol=1e-6)


def test_bfgs_quadratic_exact():
    a = np.diag([1.0, 10.0, 100.0])
    x, f, g, it, ok = bfgs(lambda x: (0.5 * x @ a @ x, a @ x), np.ones(3), max_step=10.0)
    assert ok and f < 1e-15


def test_single_edge_optimum(edge):
    pt = local_minimize(edge, AngleVector([0.1], [0.1]))
    # fine grid on the dense oracle locates the same optimum
    bs = np.linspace(-np.pi / 4, np.pi / 4, 181)
    gs = np.linspace(0, np.pi / 2, 181)
    grid = min((dense_energy(2, edge.edges, [b], [g]), b, g) for b in bs[::6] for g in gs[::6])
    ref = minimize(lambda x: dense_energy(2, edge.edges, x[:1], x[1:]), [grid[1], grid[2]], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14})
    assert pt.converged and pt.classification == Classification.MINIMUM
    assert pt.energy == pytest.approx(ref.fun, abs=1e-9) and pt.energy == pytest.approx(-1.0, abs=1e-12)
    np.testing.assert_allclose(pt.angles.flat, [np.pi / 8, np.pi / 4], atol=1e-7)


def test_fixed_point(rrg8, rrg8_min):
    again = local_minimize(rrg8, rrg8_min.angles)
    assert again.iterations <= 2
    assert again.energy == pytest.approx(rrg8_min.energy, abs=1e-12)


@settings(max_examples=15)
@given(st.integers(0, 2**31), st.integers(1, 3))
def test_descent_never_increases(seed, p):
    g = generate_graph("RRG3", 6, seed)
    x0 = np.random.default_rng(seed).uniform(-1, 1, 2 * p)
    pt = local_minimize(g, x0)
    assert pt.energy <= energy(g, AngleVector.from_flat(x0)) + 1e-12
    assert pt.converged and pt.grad_norm < 1e-8
    assert pt.classification in (Classification.MINIMUM, Classification.SINGULAR)


def test_non_convergence_flagged(rrg8):
    pt = local_minimize(rrg8, [0.3, 0.2, -0.1, 0.5], OptimizerOptions(max_iter=2))
    assert not pt.converged and pt.classification == Classification.UNCLASSIFIED


def test_grid_search_single_edge(edge):
    best = grid_search_p1(edge, 12)
    rng = np.random.default_rng(0)
    starts = rng.uniform(-np.pi / 2, np.pi / 2, size=(200, 2))
    ref = min(minimize(lambda x: dense_energy(2, edge.edges, x[:1], x[1:]), s, method="BFGS").fun for s in starts)
    assert best.energy == pytest.approx(ref, abs=1e-9)
    assert best.grad_norm < 1e-8 and best.provenance == Provenance.GRID


def test_grid_search_resolution_invariant():
    k4 = generate_graph("RRG3", 4, 0)
    a, b = grid_search_p1(k4, 32), grid_search_p1(k4, 64)
    assert a.energy == pytest.approx(b.energy, abs=1e-9)
    assert a.grad_norm < 1e-8 and in_fundamental_region(a.angles)


def test_grid_points_in_region():
    pts = fundamental_grid_p1(16)
    assert pts.shape == (256, 2)
    assert np.all(np.abs(pts[:, 0]) <= np.pi / 4) and np.all((pts[:, 1] > 0) & (pts[:, 1] < np.pi / 4))


def test_grid_search_all_fail(rrg8):
    with pytest.raises(ConvergenceError):
        grid_search_p1(rrg8, 8, OptimizerOptions(max_iter=1))
    with pytest.raises(ValueError):
        grid_search_p1(rrg8, 4)


def test_classification_and_roundtrip(rrg8_min):
    assert classify_inertia((0, 0, 4)) == Classification.MINIMUM
    assert classify_inertia((1, 0, 3)) == Classification.TRANSITION_STATE
    assert classify_inertia((0, 1, 3)) == Classification.SINGULAR
    assert classify_inertia((2, 0, 2)) == Classification.OTHER
    back = StationaryPoint.from_dict(rrg8_min.to_dict())
    assert back.to_dict() == rrg8_min.to_dict()
