"""Transition-state based initialization of QAOA for MaxCut."""
from .landscape import construct_ts, descend_from_ts, enumerate_ts, index1_direction
from .optimizer import OptimizerOptions, StationaryPoint, grid_search_p1, local_minimize
from .problem import ProblemGraph, cost_diagonal, generate_graph, load_graph, sample_ensemble, save_graph
from .simulator import AngleVector, energy, energy_and_gradient, hessian
from .strategies import greedy_run, interp_init, interp_run, random_multistart_run, tqa_init, tqa_run

__version__ = "0.1.0"

__all__ = [
    "AngleVector", "OptimizerOptions", "ProblemGraph", "StationaryPoint", "construct_ts", "cost_diagonal",
    "descend_from_ts", "energy", "energy_and_gradient", "enumerate_ts", "generate_graph", "greedy_run",
    "grid_search_p1", "hessian", "index1_direction", "interp_init", "interp_run", "load_graph", "local_minimize",
    "random_multistart_run", "sample_ensemble", "save_graph", "tqa_init", "tqa_run",
]
