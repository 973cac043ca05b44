import json
import itertools

import numpy as np
import pytest

from sephard.errors import BudgetExceeded, GraphParseError, ValidationError
from sephard.graphs import (
    CliqueInstance,
    Graph,
    Verdict,
    canonical_corpus,
    format_dimacs,
    max_clique_bruteforce,
    maximum_clique,
    parse_graph,
    random_graph,
    solve_clique,
)


def path3():
    return Graph.from_edges(3, [(1, 2), (2, 3)], one_indexed=True)


def test_parse_dimacs_triangle():
    g = parse_graph("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    assert g.n == 3
    assert g.edge_count == 3
    np.testing.assert_array_equal(g.adj, np.ones((3, 3)) - np.eye(3))


def test_parse_edgeless():
    g = parse_graph("p edge 2 0\n")
    assert (g.n, g.edge_count) == (2, 0)


def test_parse_comments_and_json():
    text = "c a comment\np edge 3 1\ne 1 3\n"
    assert parse_graph(text).edges() == [(0, 2)]
    doc = json.dumps({"n": 3, "edges": [[1, 3]]})
    assert parse_graph(doc) == parse_graph(text)
    adj = json.dumps({"adj": [[0, 0, 1], [0, 0, 0], [1, 0, 0]]})
    assert parse_graph(adj) == parse_graph(text)


def test_self_loop_rejected():
    with pytest.raises(ValidationError, match="self-loop"):
        parse_graph("e 1 1\n")


def test_malformed_line_reports_line_number():
    with pytest.raises(GraphParseError) as info:
        parse_graph("p edge 3 1\ne 1 x\n")
    assert info.value.line == 2


def test_dimacs_roundtrip(rng):
    for _ in range(20):
        g = random_graph(int(rng.integers(1, 9)), 0.5, rng)
        assert parse_graph(format_dimacs(g)) == g


def test_graph_invariants():
    with pytest.raises(ValidationError):
        Graph(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        Graph(np.array([[1, 0], [0, 0]]))
    g = Graph.complete(4)
    assert g.edge_count == g.adj.sum() // 2 == 6


def test_clique_number_examples():
    assert maximum_clique(Graph.complete(3))[0] == 3
    for n in range(1, 6):
        assert max_clique_bruteforce(Graph.empty(n)) == 1
    assert max_clique_bruteforce(path3()) == 2


def test_solve_clique_examples():
    k3 = Graph.complete(3)
    assert solve_clique(CliqueInstance(k3, 3)) is Verdict.YES
    with pytest.raises(ValidationError):
        CliqueInstance(k3, 4)
    k3_plus = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2)])
    assert solve_clique(CliqueInstance(k3_plus, 4)) is Verdict.NO
    assert solve_clique(CliqueInstance(path3(), 2)) is Verdict.YES


def _is_clique(g, verts):
    return all(g.adj[a, b] for a, b in itertools.combinations(verts, 2))


def test_witness_is_certified_on_small_graphs(rng):
    # Independent check: the witness is a clique and no larger subset is one.
    for _ in range(60):
        g = random_graph(int(rng.integers(1, 9)), float(rng.uniform(0.2, 0.9)), rng)
        omega, witness = maximum_clique(g)
        assert len(witness) == omega and _is_clique(g, witness)
        assert not any(_is_clique(g, s) for s in itertools.combinations(range(g.n), omega + 1))


def test_solve_matches_bruteforce(rng):
    for _ in range(40):
        g = random_graph(int(rng.integers(2, 8)), 0.5, rng)
        omega = max_clique_bruteforce(g)
        for c in range(1, g.n + 1):
            assert (solve_clique(CliqueInstance(g, c)) is Verdict.YES) == (omega >= c)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        max_clique_bruteforce(Graph.empty(40))


def test_canonical_corpus_counts():
    # Number of non-isomorphic simple graphs on n = 1..6 vertices.
    counts = [1, 2, 4, 11, 34, 156]
    corpus = canonical_corpus(6)
    for n, expected in enumerate(counts, start=1):
        assert sum(g.n == n for g in corpus) == expected
