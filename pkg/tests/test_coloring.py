from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from twincut.coloring import (
    Budget,
    BudgetExceeded,
    Coloring,
    ColoringError,
    chromatic_number,
    constructive_coloring,
    edge_deleted_coloring,
    export_kcolor_cnf,
    is_proper,
    q_coloring,
    rainbow_branch,
    run_sat_solver,
    unique_top_coloring,
)
from twincut.construction import twincut_graph
from twincut.graph import Graph, GraphError, complete_graph, cycle_graph, disjoint_union

CORPUS = oracles.corpus(seed=1, size=150, max_n=9)


def test_is_proper_examples(c5):
    assert not is_proper(complete_graph(2), [1, 1])
    assert is_proper(c5, [1, 2, 1, 2, 3])
    assert is_proper(twincut_graph(4), constructive_coloring(4))


@pytest.mark.parametrize("bad", [[1, 2], [1, 2, 1, 2, 0], [1, 2, 1, 2, None]])
def test_is_proper_rejects_partial(c5, bad):
    with pytest.raises(ColoringError):
        is_proper(c5, bad)


def test_coloring_json_round_trip(g4):
    c = constructive_coloring(4)
    d = c.to_dict(g4)
    assert d["palette"] == 4 and d["assignment"]["T:"] == 1
    assert Coloring.from_dict(g4, d) == c
    del d["assignment"]["T:"]
    with pytest.raises(ColoringError):
        Coloring.from_dict(g4, d)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_chi_of_twincut_graphs(k):
    res = chromatic_number(twincut_graph(k))
    assert res.exact and res.chi == k
    assert res.witness.palette == k and is_proper(twincut_graph(k), res.witness)


def test_chi_small_cases():
    assert chromatic_number(Graph(1)).chi == 1
    assert chromatic_number(Graph(0)).chi == 0
    assert chromatic_number(Graph(4)).chi == 1
    assert chromatic_number(complete_graph(5)).chi == 5
    assert chromatic_number(disjoint_union(cycle_graph(5), complete_graph(4))).chi == 4


@pytest.mark.parametrize("g", CORPUS[:80], ids=lambda g: f"n{g.n}m{g.m}")
def test_chi_matches_brute_force(g):
    res = chromatic_number(g)
    assert res.chi == oracles.chromatic_number(g)
    assert is_proper(g, res.witness) and res.witness.palette == res.chi


def test_budget_gives_unknown_never_wrong(g5):
    res = chromatic_number(g5, Budget(max_nodes=2000))
    assert not res.exact and res.chi is None
    assert res.lower <= 5 <= res.upper
    assert is_proper(g5, res.witness) and res.witness.palette == res.upper


def test_q_coloring_budget(g5):
    with pytest.raises(BudgetExceeded):
        q_coloring(g5, 4, Budget(max_nodes=100))


def test_cnf_k2_one_colour():
    assert export_kcolor_cnf(complete_graph(2), 1) == "p cnf 2 3\n1 0\n2 0\n-1 -2 0\n"
    assert not oracles.cnf_satisfiable(export_kcolor_cnf(complete_graph(2), 1))


def test_cnf_clause_order_and_symmetry_units():
    text = export_kcolor_cnf(complete_graph(2), 2)
    assert text == "p cnf 4 6\n1 2 0\n3 4 0\n-1 -3 0\n-2 -4 0\n1 0\n4 0\n"


def test_cnf_five_cycle(c5):
    assert not oracles.cnf_satisfiable(export_kcolor_cnf(c5, 2))
    assert oracles.cnf_satisfiable(export_kcolor_cnf(c5, 3))


def test_cnf_g5_header(g5):
    m5 = 1 + 2 * 5 + 10 * 41 + 230 * 4  # internal copies of G2, G3, G4 plus branch incidences
    nv, clauses = oracles.parse_cnf(export_kcolor_cnf(g5, 4))
    assert nv == 473 * 4 == 1892
    assert len(clauses) == 473 + 4 * m5 + 2


@pytest.mark.parametrize("g", [g for g in CORPUS if g.n <= 8][:60], ids=lambda g: f"n{g.n}m{g.m}")
def test_cnf_satisfiable_iff_colourable(g):
    chi = oracles.chromatic_number(g)
    for q in range(max(1, chi - 1), chi + 2):
        assert oracles.cnf_satisfiable(export_kcolor_cnf(g, q)) == (chi <= q)


def test_external_solver_hook_without_solver(monkeypatch):
    monkeypatch.setenv("PATH", "")
    assert run_sat_solver("p cnf 1 1\n1 0\n") is None


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_constructive_coloring(k):
    g = twincut_graph(k)
    c = constructive_coloring(k)
    assert is_proper(g, c) and c.palette == k
    if k >= 2:
        assert all(g.labels[v].is_branch for v in g.vertices if c[v] == k)
        assert all(c[v] == k for v in g.vertices if g.labels[v].is_branch)


def test_rainbow_k2():
    b = rainbow_branch(2, [2, 1])
    assert b.nodes == ((),)


def test_rainbow_on_every_proper_3_colouring_of_c5():
    g = twincut_graph(3)
    colourings = [c for c in itertools.product(range(1, 4), repeat=5) if is_proper(g, c)]
    assert len(colourings) == 30
    for c in colourings:
        b = rainbow_branch(3, c)
        tree_colours = [c[g.index_of(_t(p))] for p in b.nodes]
        assert len(set(tree_colours)) == 2
        assert c[g.index_of(_b(b.leaf))] not in tree_colours


def test_rainbow_rejects_improper(g4):
    with pytest.raises(ColoringError):
        rainbow_branch(4, [1] * g4.n)


def _t(p):
    from twincut.tree import Address

    return Address("T", p)


def _b(p):
    from twincut.tree import Address

    return Address("B", p)


def _check_rainbow(k, g, c):
    b = rainbow_branch(k, c)
    tree_colours = [c[g.index_of(_t(p))] for p in b.nodes]
    assert len(b.nodes) == k - 1 and len(set(tree_colours)) == k - 1
    assert c[g.index_of(_b(b.leaf))] not in tree_colours


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(1, 9)), st.integers(0, 22))
def test_rainbow_on_recoloured_unique_top(perm, v):
    g = twincut_graph(4)
    base = unique_top_coloring(4, v)
    _check_rainbow(4, g, base.permuted_colors(dict(zip(range(1, 9), perm))))


def test_rainbow_on_g5_colourings(g5):
    rng = random.Random(5)
    for v in rng.sample(range(g5.n), 20):
        c = unique_top_coloring(5, v)
        perm = list(range(1, 6))
        rng.shuffle(perm)
        _check_rainbow(5, g5, c.permuted_colors(dict(zip(range(1, 6), perm))))


def test_unique_top_small_cases():
    assert unique_top_coloring(1, 0).assignment == (1,)
    g = twincut_graph(3)
    for v in g.vertices:
        c = unique_top_coloring(3, v)
        assert is_proper(g, c) and c.palette == 3 and c.assignment.count(3) == 1 and c[v] == 3
        if g.labels[v].is_branch:
            assert sorted(c[u] for u in g.adj(v)) == [1, 2]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_unique_top_everywhere(k):
    g = twincut_graph(k)
    for v in g.vertices:
        c = unique_top_coloring(k, v)
        assert is_proper(g, c)
        assert [u for u in g.vertices if c[u] == k] == [v]
        if g.labels[v].is_branch:
            for u in g.adj(v):
                assert c[u] == len(g.labels[u].path) + 1


def test_unique_top_foreign_vertex():
    with pytest.raises(GraphError):
        unique_top_coloring(3, 5)


def test_edge_deleted_k2():
    res = edge_deleted_coloring(2, (0, 1))
    assert res.coloring.assignment == (1, 1)


@pytest.mark.parametrize("k", [3, 4])
def test_edge_deleted_all_edges(k):
    g = twincut_graph(k)
    for e in g.edges:
        res = edge_deleted_coloring(k, e)
        assert res.path == "constructive"
        assert res.coloring.palette <= k - 1
        assert is_proper(g.delete_edge(*e), res.coloring)


def test_edge_deleted_solver_fallback(g4):
    e = g4.edges[3]
    res = edge_deleted_coloring(4, e, constructive=False)
    assert res.path == "solver-fallback"
    assert is_proper(g4.delete_edge(*e), res.coloring) and res.coloring.palette <= 3


def test_edge_deleted_rejects_non_edge(g4):
    with pytest.raises(GraphError):
        edge_deleted_coloring(4, (0, 1))
