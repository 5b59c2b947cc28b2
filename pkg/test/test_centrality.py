from __future__ import annotations

from collections import deque
from fractions import Fraction

import networkx as nx

from hashnet import (
    WeightedGraph,
    betweenness,
    centrality_report,
    edge_betweenness,
    eigenvector_centrality,
    vertex_betweenness,
)
from hashnet.centrality import DEFAULT_TOLERANCE, eigen_residual
from hashnet.exceptions import ConvergenceError

import pytest

from test.util import (
    brute_betweenness,
    connected_graph,
    eigh_centrality,
    graph,
    random_graph,
    random_tree,
)

# Every connected graph on at most 6 vertices
SMALL_CONNECTED = [
    G for G in nx.graph_atlas_g() if 0 < len(G) <= 6 and nx.is_connected(G)
]


def scaled(g: WeightedGraph, factor: int) -> WeightedGraph:
    return graph(len(g), [(u, v, factor * w) for u, v, w in g.edges()])


def side_of(g: WeightedGraph, start: int, cut: tuple[int, int]) -> int:
    """Vertices reachable from `start` without crossing the edge `cut`"""
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if (min(u, v), max(u, v)) != cut and v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen)


@pytest.mark.parametrize("G", SMALL_CONNECTED)
def test_unweighted_matches_enumerated_paths(G: nx.Graph) -> None:
    """
    Expects
    -------
    * On every connected graph up to 6 vertices, exact unweighted betweenness
      equals the count over every enumerated shortest path, for vertices and edges
    """
    g = graph(len(G), [(u, v, 1) for u, v in G.edges])
    vertex, edge = betweenness(g, use_weights=False, exact=True)
    expected_vertex, expected_edge = brute_betweenness(g, use_weights=False)

    assert vertex == expected_vertex
    assert edge == expected_edge


@pytest.mark.parametrize("seed", list(range(200)))
def test_weighted_matches_enumerated_paths(seed: int) -> None:
    """
    Expects
    -------
    * Weighted betweenness with length 1/w equals the enumeration oracle, exactly
      in rationals and within 1e-9 in floats
    """
    n = 2 + seed % 6
    g = random_graph(n, 0.6, seed, max_weight=5)
    expected_vertex, expected_edge = brute_betweenness(g, use_weights=True)

    exact_vertex, exact_edge = betweenness(g, use_weights=True, exact=True)
    assert exact_vertex == expected_vertex
    assert exact_edge == expected_edge

    vertex, edge = betweenness(g, use_weights=True)
    for v in range(n):
        assert vertex[v] == pytest.approx(float(expected_vertex[v]), abs=1e-9)
    for key, x in edge.items():
        assert x == pytest.approx(float(expected_edge[key]), abs=1e-9)


def test_weighted_ties_split_paths() -> None:
    """
    Expects
    -------
    * Tied weighted paths share the pair, in a square of weight 2 edges the paths
      0-1-2 and 0-3-2 both have length 1
    """
    g = graph(4, [(0, 1, 2), (1, 2, 2), (0, 3, 2), (3, 2, 2)])
    vertex = vertex_betweenness(g, exact=True)
    assert vertex == [Fraction(1, 2)] * 4


def test_heavy_edge_is_shorter() -> None:
    """
    Expects
    -------
    * A direct edge of weight 1 has length 1 and loses to two weight 4 edges of
      total length 1/2, so the middle vertex carries the pair
    """
    g = graph(3, [(0, 2, 1), (0, 1, 4), (1, 2, 4)])
    assert vertex_betweenness(g, use_weights=True, exact=True)[1] == 1
    assert vertex_betweenness(g, use_weights=False, exact=True)[1] == 0


@pytest.mark.parametrize("n", [3, 5, 8])
def test_star_closed_form(n: int) -> None:
    """
    Expects
    -------
    * The center of a star with n leaves lies on all C(n, 2) leaf pairs
    * Each spoke carries the pair of its leaf with the center and n - 1 leaf pairs
    """
    g = graph(n + 1, [(0, leaf, 1) for leaf in range(1, n + 1)])
    vertex, edge = betweenness(g, exact=True)
    assert vertex[0] == n * (n - 1) // 2
    assert all(x == 0 for x in vertex[1:])
    assert all(x == n for x in edge.values())


@pytest.mark.parametrize("n", [3, 4, 6])
@pytest.mark.parametrize("use_weights", [True, False])
def test_complete_graph_closed_form(n: int, use_weights: bool) -> None:
    """
    Expects
    -------
    * No vertex of a uniformly weighted complete graph is between any pair
    * Every edge only carries the pair of its own endpoints
    """
    g = graph(n, [(u, v, 3) for u in range(n) for v in range(u + 1, n)])
    vertex, edge = betweenness(g, use_weights=use_weights, exact=True)
    assert all(x == 0 for x in vertex)
    assert all(x == 1 for x in edge.values())


def test_path_graph() -> None:
    """
    Expects
    -------
    * On the path 0-1-2-3, vertex 1 and 2 each lie on 2 pairs
    * The middle edge carries 2 * 2 = 4 pairs
    """
    g = graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    vertex = vertex_betweenness(g, use_weights=False, exact=True)
    edge = edge_betweenness(g, use_weights=False, exact=True)
    assert vertex == [0, 2, 2, 0]
    assert edge == {(0, 1): 3, (1, 2): 4, (2, 3): 3}


def test_disconnected_pairs_contribute_nothing() -> None:
    """
    Expects
    -------
    * Pairs in different components are not counted
    """
    g = graph(6, [(0, 1, 1), (1, 2, 1), (3, 4, 1)])
    vertex = vertex_betweenness(g, exact=True)
    assert vertex == [0, 1, 0, 0, 0, 0]


@pytest.mark.parametrize("seed", [0, 1])
def test_n_jobs_invariance(seed: int) -> None:
    """
    Expects
    -------
    * Spreading the sources over processes gives bitwise identical results
    """
    g = random_graph(25, 0.2, seed, max_weight=6)
    single = betweenness(g, use_weights=True, n_jobs=1)
    several = betweenness(g, use_weights=True, n_jobs=3)
    assert single == several


def test_n_jobs_invalid() -> None:
    """
    Expects
    -------
    * n_jobs below 1 is rejected
    """
    with pytest.raises(ValueError):
        betweenness(graph(2, [(0, 1, 1)]), n_jobs=0)


@pytest.mark.parametrize("seed", list(range(100)))
def test_eigenvector_matches_eigh(seed: int) -> None:
    """
    Expects
    -------
    * On connected weighted graphs up to 50 vertices, power iteration agrees with
      numpy's symmetric eigensolver within 1e-8
    * Scores lie in [0, 1] with a maximum of exactly 1
    * The relative residual is below 10 times the tolerance
    """
    n = 8 + (seed * 7) % 43
    g = connected_graph(n, 0.4, seed, max_weight=3)
    scores = eigenvector_centrality(g)

    assert scores == pytest.approx(eigh_centrality(g), abs=1e-8)
    assert max(scores) == 1.0
    assert all(0 <= x <= 1 for x in scores)
    assert eigen_residual(g, scores) < 10 * DEFAULT_TOLERANCE


def test_eigenvector_star_does_not_oscillate() -> None:
    """
    Expects
    -------
    * A star, bipartite, converges with the center at 1 and leaves at 1/sqrt(n)
    """
    n = 4
    g = graph(n + 1, [(0, leaf, 1) for leaf in range(1, n + 1)])
    scores = eigenvector_centrality(g)
    assert scores[0] == 1.0
    assert scores[1:] == pytest.approx([0.5] * n, abs=1e-8)


def test_eigenvector_outside_largest_component() -> None:
    """
    Expects
    -------
    * Vertices outside the largest component score 0
    * A graph without edges scores 0 everywhere
    """
    g = graph(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1)])
    scores = eigenvector_centrality(g)
    assert scores[:3] == pytest.approx([1.0, 1.0, 1.0])
    assert scores[3:] == [0.0, 0.0, 0.0]

    assert eigenvector_centrality(graph(3, [])) == [0.0, 0.0, 0.0]


def test_eigenvector_convergence_error() -> None:
    """
    Expects
    -------
    * Running out of iterations raises ConvergenceError with the residual
    """
    g = random_graph(20, 0.3, 0, max_weight=3)
    with pytest.raises(ConvergenceError) as e:
        eigenvector_centrality(g, tolerance=1e-300, max_iterations=2)

    assert e.value.iterations == 2
    assert e.value.residual > 0
    assert e.value.exit_code == 2


def test_report_top() -> None:
    """
    Expects
    -------
    * The report holds floats and ranks vertices by score, ties by id
    """
    g = graph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])
    report = centrality_report(g, use_weights=False)
    assert report.top("betweenness", 1) == [(2, 4.0)]
    assert [v for v, _ in report.top("betweenness", 3)] == [2, 1, 3]
    assert isinstance(report.edge_betweenness[(0, 1)], float)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("use_weights", [True, False])
def test_tree_edge_splits_pairs(seed: int, use_weights: bool) -> None:
    """
    Expects
    -------
    * Each tree edge carries every pair it separates, |A| * |B|
    """
    n = 12
    g = random_tree(n, seed, max_weight=4)
    edge = edge_betweenness(g, use_weights=use_weights, exact=True)
    for (u, v), x in edge.items():
        a = side_of(g, u, (u, v))
        assert x == a * (n - a)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_twins_score_equally(seed: int) -> None:
    """
    Expects
    -------
    * A vertex copied with the same weighted neighbours, not linked to its copy,
      gets the same betweenness and eigenvector score
    """
    base = connected_graph(8, 0.4, seed, max_weight=4)
    twin = len(base)
    edges = list(base.edges())
    edges += [(v, twin, w) for v, w in sorted(base.neighbors(0).items())]
    g = graph(twin + 1, edges)

    for use_weights in (True, False):
        vertex = vertex_betweenness(g, use_weights=use_weights, exact=True)
        assert vertex[0] == vertex[twin]

    scores = eigenvector_centrality(g)
    assert scores[0] == pytest.approx(scores[twin], abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_weight_scaling_invariance(seed: int) -> None:
    """
    Expects
    -------
    * Multiplying every weight by a constant leaves betweenness unchanged
    * It leaves the normalized eigenvector unchanged too
    """
    g = connected_graph(12, 0.3, seed, max_weight=4)
    tripled = scaled(g, 3)

    assert betweenness(tripled, exact=True) == betweenness(g, exact=True)
    assert eigenvector_centrality(tripled) == pytest.approx(
        eigenvector_centrality(g), abs=1e-8
    )


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_equal_weights_match_unweighted(seed: int) -> None:
    """
    Expects
    -------
    * With every weight equal, weighted and unweighted betweenness agree
    """
    g = scaled(connected_graph(10, 0.3, seed), 4)
    weighted = betweenness(g, use_weights=True, exact=True)
    unweighted = betweenness(g, use_weights=False, exact=True)
    assert weighted == unweighted
