from __future__ import annotations

import csv
from pathlib import Path

import networkx as nx
import numpy as np

from hashnet import (
    CentralityReport,
    Dendrogram,
    Partition,
    WeightedGraph,
    centrality_report,
    communities,
)
from hashnet.export import (
    EXTENSIONS,
    export_graph,
    layout,
    to_networkx,
    write_dendrogram,
    write_partition_table,
)

import pytest

from test.util import random_graph, read_edge_table


def triangle() -> WeightedGraph:
    return WeightedGraph.from_edges(
        [("puffins", 5), ("skomer", 3), ("birds", 2)],
        [("puffins", "skomer", 2), ("skomer", "birds", 1), ("puffins", "birds", 1)],
    )


def analysed(g: WeightedGraph) -> tuple[CentralityReport, Dendrogram, Partition]:
    scores = centrality_report(g)
    dendrogram, partition = communities(g)
    return scores, dendrogram, partition


def test_graphml_readable_by_networkx(tmp_path: Path) -> None:
    """
    Expects
    -------
    * networkx reads back 3 vertices and 3 edges with every attribute
    """
    g = triangle()
    scores, _, partition = analysed(g)
    path = export_graph(g, scores, partition, "graphml", tmp_path / "t.graphml")

    G = nx.read_graphml(path)
    assert G.number_of_nodes() == 3
    assert G.number_of_edges() == 3

    node = G.nodes["n0"]
    assert node["label"] == "puffins"
    assert node["frequency"] == 5
    assert node["eigenvector"] == pytest.approx(scores.eigenvector[0])
    assert node["betweenness"] == pytest.approx(scores.betweenness[0])
    assert node["community"] == partition.assignment[0]

    edge = G.edges["n0", "n1"]
    assert edge["weight"] == 2
    assert edge["edge_betweenness"] == pytest.approx(scores.edge_betweenness[(0, 1)])


@pytest.mark.parametrize("fmt", list(EXTENSIONS))
def test_exports_are_byte_identical(tmp_path: Path, fmt: str) -> None:
    """
    Expects
    -------
    * Writing the same analysis twice gives identical files
    """
    g = random_graph(12, 0.4, 0, max_weight=3)
    scores, _, partition = analysed(g)
    first = export_graph(g, scores, partition, fmt, tmp_path / f"a{EXTENSIONS[fmt]}")
    second = export_graph(g, scores, partition, fmt, tmp_path / f"b{EXTENSIONS[fmt]}")
    assert first.read_bytes() == second.read_bytes()


def labelled_network(seed: int) -> WeightedGraph:
    """Random network with hashtag labels and drawn frequencies"""
    rng = np.random.default_rng(seed)
    shape = random_graph(5 + seed % 20, 0.3, seed, max_weight=6)
    return WeightedGraph.from_edges(
        [(f"#tag{v}", int(rng.integers(1, 500))) for v in range(len(shape))],
        [(f"#tag{u}", f"#tag{v}", w) for u, v, w in shape.edges()],
    )


def same(a: dict, b: dict) -> bool:
    return a == b


@pytest.mark.parametrize("seed", list(range(50)))
def test_round_trip_through_exports(tmp_path: Path, seed: int) -> None:
    """
    Expects
    -------
    * Reimporting the GraphML export gives an isomorphic graph with identical
      weights and vertex and edge attributes
    * Reimporting the edge-csv export gives the non isolated part of the graph
      with identical labels and weights
    """
    g = labelled_network(seed)
    scores, _, partition = analysed(g)

    expected = to_networkx(g)
    for v in expected:
        expected.nodes[v].update(
            eigenvector=scores.eigenvector[v],
            betweenness=scores.betweenness[v],
            community=partition.assignment[v],
        )
    for u, v in expected.edges:
        key = (min(u, v), max(u, v))
        expected.edges[u, v]["edge_betweenness"] = scores.edge_betweenness[key]

    path = export_graph(g, scores, partition, "graphml", tmp_path / "g.graphml")
    back = nx.read_graphml(path)
    assert nx.is_isomorphic(expected, back, node_match=same, edge_match=same)

    path = export_graph(g, scores, partition, "edge-csv", tmp_path / "edges.csv")
    table = to_networkx(read_edge_table(path))
    linked = to_networkx(g).subgraph(v for v in range(len(g)) if g.degree(v) > 0)
    assert nx.is_isomorphic(
        linked,
        table,
        node_match=lambda a, b: a["label"] == b["label"],
        edge_match=same,
    )


def test_dot_export(tmp_path: Path) -> None:
    """
    Expects
    -------
    * An undirected DOT graph with one statement per vertex and per edge
    * Quotes in labels are escaped
    """
    g = WeightedGraph.from_edges(['say"hi', "b"], [('say"hi', "b", 1)])
    scores, _, partition = analysed(g)
    text = export_graph(g, scores, partition, "dot", tmp_path / "g.dot").read_text()

    lines = text.splitlines()
    assert lines[0] == "graph hashtags {"
    assert lines[-1] == "}"
    assert 'label="say\\"hi"' in lines[1]
    assert lines[3].startswith("  n0 -- n1 [weight=1,")


def test_area_and_positions(tmp_path: Path) -> None:
    """
    Expects
    -------
    * Merged exports carry the area of each vertex and layouts add x, y
    * The layout is reproducible for a seed
    """
    g = triangle()
    scores, _, partition = analysed(g)
    positions = layout(g, seed=5)
    assert positions == layout(g, seed=5)

    path = export_graph(
        g,
        scores,
        partition,
        "graphml",
        tmp_path / "m.graphml",
        area_of=["Skomer", "Skomer", "Galapagos"],
        positions=positions,
    )
    G = nx.read_graphml(path)
    assert G.nodes["n2"]["area"] == "Galapagos"
    assert G.nodes["n1"]["x"] == pytest.approx(positions[1][0])


def test_invalid_arguments(tmp_path: Path) -> None:
    """
    Expects
    -------
    * Unknown formats and attribute lists of the wrong length are rejected
    """
    g = triangle()
    scores, _, partition = analysed(g)
    with pytest.raises(ValueError):
        export_graph(g, scores, partition, "gexf", tmp_path / "g.gexf")

    with pytest.raises(ValueError):
        export_graph(g, scores, partition, "dot", tmp_path / "g.dot", area_of=["a"])


def test_unwritable_destination(tmp_path: Path) -> None:
    """
    Expects
    -------
    * Writing below a regular file raises OSError naming the destination
    """
    blocker = tmp_path / "file"
    blocker.write_text("")
    g = triangle()
    scores, _, partition = analysed(g)
    destination = blocker / "g.graphml"
    with pytest.raises(OSError) as e:
        export_graph(g, scores, partition, "graphml", destination)

    assert str(destination) in str(e.value)


def test_tables(tmp_path: Path) -> None:
    """
    Expects
    -------
    * The partition table joins CES classes with ';'
    * The dendrogram table starts with the initial Q then one row per merge
    """
    g = triangle()
    _, dendrogram, partition = analysed(g)
    write_partition_table(
        g, partition, {0: ["wildlife (birds)", "aesthetic"]}, tmp_path / "p.csv"
    )
    with (tmp_path / "p.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0] == {
        "label": "puffins",
        "community": "0",
        "ces_classes": "wildlife (birds);aesthetic",
    }

    write_dendrogram(dendrogram, tmp_path / "d.csv")
    with (tmp_path / "d.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["step"] == "-1"
    assert float(rows[0]["modularity"]) == dendrogram.initial_modularity
    assert len(rows) == len(dendrogram.merges) + 1
