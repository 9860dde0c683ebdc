from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusteredit import (
    Clustering,
    GuardError,
    Instance,
    Mode,
    branch_opt,
    brute_force_opt,
    clustering_to_edits,
    connected_components,
    is_cluster_graph,
)
from clusteredit.generate import gen_random
from clusteredit.solver import _rgs_table, solve

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


def test_rgs_counts_and_order():
    for n, b in enumerate(BELL):
        table = _rgs_table(n)[0]
        assert len(table) == b
    rows = [tuple(r) for r in _rgs_table(4)[0].tolist()]
    assert rows == sorted(rows) and len(set(rows)) == len(rows)


def test_p3_optima(p3):
    res = brute_force_opt(p3, enumerate_all=True)
    assert res.opt_weight == 1
    assert set(res.all_optima) == {
        Clustering([{0, 1, 2}]),
        Clustering([{0, 1}, {2}]),
        Clustering([{1, 2}, {0}]),
    }


def test_cluster_graph_witness_is_components():
    g = Instance.from_edges(5, [(0, 1), (2, 3), (3, 4), (2, 4)])
    res = brute_force_opt(g)
    assert res.opt_weight == 0
    assert res.witness == Clustering(connected_components(g))


def test_k4x_witness(k4x):
    res = brute_force_opt(k4x, enumerate_all=True)
    assert res.opt_weight == 1 and res.witness == Clustering([range(5)])
    assert res.all_optima == [Clustering([range(5)])]


def test_guard():
    with pytest.raises(GuardError):
        brute_force_opt(Instance.empty(14))


def test_thirteen_vertices_streams_blocks():
    g = gen_random(12, 0.5, 2, Mode.INTEGER, 1)
    assert brute_force_opt(g).opt_weight == branch_opt(g).opt_weight


def test_infinite_pairs_are_respected(p3):
    g = p3.copy()
    g.weight[0, 2] = g.weight[2, 0] = math.inf
    g.weight[0, 1] = g.weight[1, 0] = math.inf
    for res in (brute_force_opt(g), branch_opt(g)):
        assert res.opt_weight == 1
        assert res.witness == Clustering([{0, 1}, {2}])


def test_all_infeasible():
    g = Instance.from_edges(3, [(0, 1, math.inf), (1, 2, math.inf)], Mode.REAL,
                            anti_weights={(0, 2): math.inf})
    for res in (brute_force_opt(g), branch_opt(g)):
        assert math.isinf(res.opt_weight) and res.witness is None


def test_branch_upper_bound(p3):
    assert branch_opt(p3, upper_bound=1).opt_weight == 1
    res = branch_opt(p3, upper_bound=0.5)
    assert math.isinf(res.opt_weight) and res.witness is None


def test_branch_on_cluster_graph_does_not_branch():
    g = Instance.from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (3, 5)])
    res = branch_opt(g)
    assert res.opt_weight == 0 and res.nodes <= 2


def test_solve_dispatch(p3):
    assert solve(p3, "brute").opt_weight == solve(p3, "branch").opt_weight == 1
    with pytest.raises(ValueError):
        solve(p3, "magic")


def test_record_shape(p3):
    rec = brute_force_opt(p3).to_record()
    assert set(rec) == {"opt_weight", "clusters", "node_count_explored"}


graphs = st.builds(
    gen_random,
    n=st.integers(0, 8),
    p=st.floats(0, 1),
    weight_max=st.integers(1, 4),
    mode=st.sampled_from(list(Mode)),
    seed=st.integers(0, 2**32),
)


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_witness_weight_matches(g):
    res = brute_force_opt(g, enumerate_all=True)
    assert clustering_to_edits(g, res.witness).weight == pytest.approx(res.opt_weight)
    for c in res.all_optima:
        assert clustering_to_edits(g, c).weight == pytest.approx(res.opt_weight)
    assert res.witness in res.all_optima


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_zero_iff_cluster_graph(g):
    assert (brute_force_opt(g).opt_weight == 0) == is_cluster_graph(g)


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_optimum_is_additive_over_components(g):
    whole = brute_force_opt(g).opt_weight
    parts = sum(brute_force_opt(g.induced(c)).opt_weight for c in connected_components(g))
    assert whole == pytest.approx(parts)


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_branch_agrees_with_brute(g):
    b = branch_opt(g)
    assert b.opt_weight == pytest.approx(brute_force_opt(g).opt_weight)
    assert clustering_to_edits(g, b.witness).weight == pytest.approx(b.opt_weight)
