import json
import math

import numpy as np
import pytest

from tailwalk import (Graph, RootedPiece, TAIL, Tail, TailedGraph,
                      attach_tail, cartesian, complete, cone, empty_graph,
                      graph_from_json, graph_to_json, hypercube, join,
                      krawtchouk_chain, mcone, one_sum, oriented_clique3,
                      path, rooted_product, rooted_product_vertex_maps,
                      series_graph)


def test_complete_adjacency():
    a = complete(4).adjacency()
    assert np.array_equal(a.real, np.ones((4, 4)) - np.eye(4))
    assert np.all(a.imag == 0)


def test_path_adjacency():
    a = path(4).adjacency().real
    expected = np.zeros((4, 4))
    for i in range(3):
        expected[i, i + 1] = expected[i + 1, i] = 1.0
    assert np.array_equal(a, expected)


def test_empty_graph_has_no_edges():
    g = empty_graph(3)
    assert g.n == 3 and g.edges == ()


def test_hypercube_matches_bit_flip_construction():
    for n in (1, 2, 3, 4):
        a = hypercube(n).adjacency().real
        size = 1 << n
        expected = np.zeros((size, size))
        for u in range(size):
            for b in range(n):
                expected[u, u ^ (1 << b)] = 1.0
        assert np.array_equal(a, expected)


def test_hypercube_equals_iterated_cartesian_product_of_edges():
    k2 = path(2)
    g = k2
    for _ in range(2):
        g = cartesian(g, k2)
    assert np.array_equal(g.adjacency(), hypercube(3).adjacency())


def test_krawtchouk_chain_weights():
    n = 4
    a = krawtchouk_chain(n).adjacency().real
    for k in range(n):
        assert a[k, k + 1] == pytest.approx(math.sqrt((k + 1) * (n - k)))
    assert np.count_nonzero(a) == 2 * n


def test_oriented_clique3_is_hermitian_with_unit_entries():
    a = oriented_clique3().adjacency()
    assert np.allclose(a, a.conj().T)
    assert np.all(np.abs(a[~np.eye(3, dtype=bool)]) == 1.0)
    assert np.all(a.real == 0)


def test_edge_canonicalization_conjugates_descending_pairs():
    g = Graph.from_edges(2, {(1, 0): 1j})
    assert g.edges == ((0, 1, -1j),)
    assert g.weight(0, 1) == -1j
    assert g.weight(1, 0) == 1j


def test_zero_weight_edges_dropped():
    g = Graph.from_edges(3, {(0, 1): 0.0, (1, 2): 2.0})
    assert len(g.edges) == 1
    assert g.weight(0, 1) == 0


def test_self_loops_rejected():
    with pytest.raises(ValueError):
        Graph.from_edges(2, {(0, 0): 1.0})


def test_adjacency_is_hermitian_for_complex_weights():
    g = Graph.from_edges(3, {(0, 1): 1 + 2j, (1, 2): -1j})
    a = g.adjacency()
    assert np.array_equal(a, a.conj().T)


def test_degree_and_neighbors():
    g = Graph.from_edges(4, {(0, 1): 1.0, (0, 2): 2.0})
    assert g.degree(0) == 3.0
    assert g.neighbors(0) == [1, 2]
    assert g.neighbors(3) == []


def test_join_blocks():
    g = join(empty_graph(2), complete(2))
    a = g.adjacency().real
    assert np.array_equal(a, np.array([[0, 0, 1, 1],
                                       [0, 0, 1, 1],
                                       [1, 1, 0, 1],
                                       [1, 1, 1, 0]], dtype=float))


def test_cone_and_mcone_are_joins():
    g = complete(3)
    assert np.array_equal(cone(g).adjacency(),
                          join(empty_graph(1), g).adjacency())
    assert np.array_equal(mcone(2, g).adjacency(),
                          join(empty_graph(2), g).adjacency())
    with pytest.raises(ValueError):
        mcone(0, g)


def test_cartesian_matches_kronecker_oracle():
    g = path(3)
    h = complete(3)
    a = cartesian(g, h).adjacency()
    oracle = (np.kron(g.adjacency(), np.eye(3))
              + np.kron(np.eye(3), h.adjacency()))
    assert np.allclose(a, oracle)


def test_one_sum_vertex_mapping():
    g = one_sum(complete(3), 0, path(3), 1)
    # path vertices 0 and 2 hang off the merged vertex 0; they get ids 3, 4
    assert g.n == 5
    assert g.weight(0, 3) == 1.0
    assert g.weight(0, 4) == 1.0
    assert g.weight(3, 4) == 0
    with pytest.raises(ValueError):
        one_sum(complete(3), 5, path(3), 0)


def test_one_sum_with_path_builds_finite_lollipop():
    g = one_sum(complete(4), 0, path(3), 0)
    a = g.adjacency().real
    expected = np.zeros((6, 6))
    expected[:4, :4] = np.ones((4, 4)) - np.eye(4)
    expected[0, 4] = expected[4, 0] = 1.0
    expected[4, 5] = expected[5, 4] = 1.0
    assert np.array_equal(a, expected)


def test_series_graph_against_block_oracle():
    g = series_graph([empty_graph(1), complete(3), complete(3)])
    a = g.adjacency().real
    expected = np.zeros((7, 7))
    k3 = np.ones((3, 3)) - np.eye(3)
    expected[1:4, 1:4] = k3
    expected[4:7, 4:7] = k3
    expected[0, 1:4] = 1.0
    expected[1:4, 0] = 1.0
    expected[1:4, 4:7] = 1.0
    expected[4:7, 1:4] = 1.0
    assert np.array_equal(a, expected)


def test_rooted_product_vertex_maps_and_tails():
    piece = RootedPiece(krawtchouk_chain(4), 0)
    maps = rooted_product_vertex_maps(path(3), [piece, TAIL, piece])
    assert maps[0] == {0: 0, 1: 3, 2: 4, 3: 5, 4: 6}
    assert maps[1] is None
    assert maps[2] == {0: 2, 1: 7, 2: 8, 3: 9, 4: 10}
    t = rooted_product(path(3), [piece, TAIL, piece])
    assert isinstance(t, TailedGraph)
    assert t.base.n == 11
    assert t.tails == (Tail(1, 1.0),)
    # chain couplings present along both copies
    w = math.sqrt(1 * 4)
    assert t.base.weight(0, 3) == pytest.approx(w)
    assert t.base.weight(2, 7) == pytest.approx(w)


def test_rooted_product_needs_piece_per_vertex():
    piece = RootedPiece(path(2), 0)
    with pytest.raises(ValueError):
        rooted_product(path(3), [piece, piece])
    with pytest.raises(TypeError):
        rooted_product(path(2), [piece, path(2)])


def test_attach_tail_validation():
    t = attach_tail(complete(3), 0)
    assert t.tails == (Tail(0, 1.0),)
    t2 = attach_tail(t, 1, 2.0)
    assert t2.tails == (Tail(0, 1.0), Tail(1, 2.0))
    with pytest.raises(ValueError):
        attach_tail(complete(3), 5)
    with pytest.raises(ValueError):
        Tail(0, 0.0)
    with pytest.raises(ValueError):
        Tail(0, -1.0)


def test_labels_length_checked():
    with pytest.raises(ValueError):
        Graph.from_edges(2, {}, labels=("a",))
    g = Graph.from_edges(2, {(0, 1): 1.0}, labels=("a", "b"))
    assert g.labels == ("a", "b")


def test_json_round_trip_plain_graph():
    g = Graph.from_edges(3, {(0, 1): 1.5, (1, 2): -2.0},
                         labels=("x", "y", "z"))
    g2 = graph_from_json(graph_to_json(g))
    assert isinstance(g2, Graph)
    assert g2.n == g.n and g2.edges == g.edges and g2.labels == g.labels


def test_json_round_trip_complex_and_tails():
    base = Graph.from_edges(3, {(0, 1): 1j, (0, 2): 2 - 1j})
    t = TailedGraph(base, (Tail(0, 1.0), Tail(2, 0.5)))
    t2 = graph_from_json(graph_to_json(t))
    assert isinstance(t2, TailedGraph)
    assert t2.base.edges == base.edges
    assert t2.tails == t.tails


def test_json_accepts_short_edge_forms():
    doc = {"n": 3, "edges": [[0, 1], [1, 2, 2.0]]}
    g = graph_from_json(json.dumps(doc))
    assert g.weight(0, 1) == 1.0
    assert g.weight(1, 2) == 2.0


def test_json_rejects_bad_documents():
    with pytest.raises((ValueError, KeyError)):
        graph_from_json(json.dumps({"edges": []}))
    with pytest.raises(ValueError):
        graph_from_json(json.dumps({"n": 2, "edges": [[0, 5, 1.0]]}))
