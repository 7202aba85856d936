from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import bot_family, micro_grid, path_graph, top_family
from mlst.graph import MlstInstance, WeightedGraph, check_solution
from mlst.heuristics import (LevelLimitError, LevelSubset, bottom_up, composite_full,
                             composite_on_q, guaranteed_composite, level_minimums, top_down)
from mlst.netgen import micro_instance
from mlst.oracle import oracle_mlst, oracle_steiner
from mlst.steiner import EXACT, is_tree, steiner_exact


def test_bottom_up_bot_figure():
    run = bottom_up(bot_family(4), EXACT)
    assert run.cost == 8 and run.stp_calls == 1


def test_top_down_top_figure():
    inst = top_family(4)
    run = top_down(inst, EXACT)
    g = inst.graph
    heavy = g.edge_id(0, 4)
    assert run.solution.level_edges(2) == {heavy}
    assert g.edge_set_cost(run.solution.level_edges(1)) == Fraction(13, 2)
    assert run.cost == 10 and run.stp_calls == 2


def test_composite_full_top_figure():
    run = composite_full(top_family(4), EXACT)
    assert run.cost == 8 == oracle_mlst(top_family(4)).cost
    assert run.subset_used.levels == (1,)


def test_single_level_is_one_steiner_tree():
    inst = micro_instance(3, 7, 1)
    st_cost = steiner_exact(inst.graph, inst.terminals[0]).cost
    for algo in (bottom_up, top_down, composite_full, guaranteed_composite):
        assert algo(inst, EXACT).cost == st_cost


def test_equal_levels_top_down():
    g = path_graph([2, 3, 4])
    inst = MlstInstance.create(g, [{0, 2, 3}] * 3)
    run = top_down(inst, EXACT)
    assert run.cost == 3 * 9
    assert all(run.solution.level_edges(i) == {0, 1, 2} for i in (1, 2, 3))


def test_bottom_up_on_path_is_sum_of_prunes():
    # T1 spans a path; every level is the subpath between its extreme terminals
    g = path_graph([1, 2, 3, 4, 5])
    inst = MlstInstance.create(g, [range(6), {1, 2, 4}, {2, 4}])
    run = bottom_up(inst, EXACT)
    assert run.cost == 15 + (2 + 3 + 4) + (3 + 4)
    assert run.cost == oracle_mlst(inst).cost


@pytest.mark.parametrize("seed", range(6))
def test_composite_degenerate_subsets(seed):
    inst = micro_instance(seed, 7, 3)
    ell = inst.levels
    bu = bottom_up(inst, EXACT)
    td = top_down(inst, EXACT)
    q1 = composite_on_q(inst, LevelSubset.of([1], ell), EXACT)
    qa = composite_on_q(inst, LevelSubset.of(range(1, ell + 1), ell), EXACT)
    assert (q1.solution, q1.cost) == (bu.solution, bu.cost)
    assert (qa.solution, qa.cost) == (td.solution, td.cost)


def test_composite_ell5_bound():
    inst = micro_instance(11, 8, 5, "linear", 10)
    mins = [oracle_steiner(inst.graph, t).cost for t in inst.terminals]
    run = composite_on_q(inst, LevelSubset.of([1, 3, 4], 5), EXACT)
    assert run.stp_calls == 3
    assert run.cost <= 2 * mins[0] + 3 * mins[2] + 5 * mins[3]


def test_composite_full_ell2_is_min_of_two():
    for inst in micro_grid(20, ells=(2,)):
        runs = [top_down(inst, EXACT), bottom_up(inst, EXACT)]
        full = composite_full(inst, EXACT)
        assert full.cost == min(r.cost for r in runs)
        assert full.stp_calls == 3


def test_composite_full_call_count():
    inst = micro_instance(4, 7, 3)
    assert composite_full(inst, EXACT).stp_calls == 2 ** 1 * 4
    inst4 = micro_instance(4, 8, 4)
    assert composite_full(inst4, EXACT).stp_calls == 2 ** 2 * 5


def test_composite_level_limit():
    g = path_graph([1])
    inst = MlstInstance.create(g, [{0, 1}] * 4)
    with pytest.raises(LevelLimitError):
        composite_full(inst, EXACT, level_limit=3)


def test_guaranteed_equal_minimums():
    g = WeightedGraph.from_edges(2, [(0, 1, 3)])
    inst = MlstInstance.create(g, [{0, 1}, {0, 1}])
    run = guaranteed_composite(inst, EXACT)
    assert run.subset_used.levels == (1,) and run.stp_calls == 3


def test_guaranteed_small_top_level():
    # MIN_2 much smaller than MIN_1: the top tree is worth computing separately
    g = path_graph([1] * 8)
    inst = MlstInstance.create(g, [range(9), {0, 1}])
    assert level_minimums(inst, EXACT) == [8, 1]
    run = guaranteed_composite(inst, EXACT)
    assert run.subset_used.levels == (1, 2) and run.stp_calls == 4


def test_guaranteed_single_level():
    inst = micro_instance(2, 5, 1)
    run = guaranteed_composite(inst, EXACT)
    assert run.subset_used.levels == (1,) and run.stp_calls == 2


def test_level_subset_validation():
    with pytest.raises(ValueError):
        LevelSubset((2, 3), 3)
    with pytest.raises(ValueError):
        LevelSubset((1, 4), 3)
    with pytest.raises(ValueError):
        LevelSubset((1, 3, 2), 3)
    assert [s.levels for s in LevelSubset.all_for(3)] == [(1,), (1, 2), (1, 3), (1, 2, 3)]
    assert LevelSubset.of([1, 3, 4], 5).coefficients() == [2, 0, 3, 5, 0]


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 2 ** 32), ell=st.integers(2, 3), tsm=st.sampled_from(["linear", "exponential"]),
       mode=st.sampled_from(["approx2", "exact"]))
def test_solutions_are_valid_nested_trees(seed, ell, tsm, mode):
    inst = micro_instance(seed, 8, ell, tsm)
    runs = [bottom_up(inst, mode), top_down(inst, mode), composite_full(inst, mode),
            guaranteed_composite(inst, mode)]
    for run in runs:
        assert check_solution(inst, run.solution) == []
        for i in range(1, ell + 1):
            assert is_tree(inst.graph, run.solution.level_edges(i))
    bu, td, cmp_, cmps = runs
    assert cmp_.cost <= min(bu.cost, td.cost)
    assert cmps.stp_calls == ell + len(cmps.subset_used) <= 2 * ell


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), ell=st.integers(2, 3))
def test_top_level_of_top_down_is_minimum(seed, ell):
    inst = micro_instance(seed, 8, ell)
    td = top_down(inst, EXACT)
    top = td.solution.level_edges(ell)
    assert inst.graph.edge_set_cost(top) <= level_minimums(inst, EXACT)[-1]
