"""Multi-level Steiner trees: heuristics, ratio LP, ILP emitters, generators."""
from .graph import (InvalidInstanceError, MlstInstance, MlstSolution, WeightedGraph, check_solution,
                    edge_level_map, solution_cost, validate_instance, weighted_level_cost)
from .heuristics import (LevelSubset, bottom_up, composite_full, composite_on_q, guaranteed_composite,
                         level_minimums, top_down)
from .ratio import build_matrix, compute_ratio, pricing_best_q, select_q_star, t_of_q
from .steiner import APPROX2, EXACT, steiner_2approx, steiner_exact, steiner_tree

__all__ = [
    "InvalidInstanceError", "MlstInstance", "MlstSolution", "WeightedGraph", "check_solution",
    "edge_level_map", "solution_cost", "validate_instance", "weighted_level_cost",
    "LevelSubset", "bottom_up", "composite_full", "composite_on_q", "guaranteed_composite",
    "level_minimums", "top_down",
    "build_matrix", "compute_ratio", "pricing_best_q", "select_q_star", "t_of_q",
    "APPROX2", "EXACT", "steiner_2approx", "steiner_exact", "steiner_tree",
]
__version__ = "0.1.0"
