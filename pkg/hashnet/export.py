"""Write analysed networks and their tables to disk.

Every writer orders its rows by vertex id, then by edge ``(u, v)``, and formats
floats with their shortest round-tripping repr, so writing the same analysis twice
gives identical bytes. Failures to write raise `OSError` naming the destination.
"""
from __future__ import annotations

from typing import Any, Iterator, Mapping, Sequence, Tuple

import csv
import json
import logging
from contextlib import contextmanager
from pathlib import Path

import networkx as nx

from hashnet.centrality import CentralityReport
from hashnet.community import Dendrogram, Partition
from hashnet.graph import VertexId, WeightedGraph

logger = logging.getLogger(__name__)

Position = Tuple[float, float]

EXTENSIONS = {
    "graphml": ".graphml",
    "dot": ".dot",
    "edge-csv": ".csv",
    "report-json": ".json",
}


def export_graph(
    g: WeightedGraph,
    scores: CentralityReport,
    partition: Partition,
    fmt: str,
    path: Path | str,
    *,
    area_of: Sequence[str] | None = None,
    positions: Mapping[VertexId, Position] | None = None,
) -> Path:
    """Write `g` with all its vertex and edge attributes

    Vertices carry label, frequency, eigenvector, betweenness and community, plus
    area for merged networks and x, y when `positions` are given. Edges carry weight
    and edge betweenness.

    Parameters
    ----------
    g : WeightedGraph
        The graph

    scores : CentralityReport
        Centralities of `g`

    partition : Partition
        Communities of `g`

    fmt : "graphml" | "dot" | "edge-csv" | "report-json"
        The format to write

    path : Path | str
        The destination file

    area_of : Sequence[str] | None = None
        Area attribution per vertex id

    positions : Mapping[VertexId, tuple[float, float]] | None = None
        Layout coordinates per vertex id

    Returns
    -------
    Path
        The written file
    """
    if fmt not in EXTENSIONS:
        raise ValueError(f"`fmt` {fmt} must be in {list(EXTENSIONS)}")

    n = len(g)
    for name, values in (
        ("eigenvector", scores.eigenvector),
        ("betweenness", scores.betweenness),
        ("assignment", partition.assignment),
        ("area_of", area_of),
    ):
        if values is not None and len(values) != n:
            raise ValueError(f"`{name}` has {len(values)} entries for {n} vertices")

    vertices = _vertex_rows(g, scores, partition, area_of, positions)
    edges = _edge_rows(g, scores)
    path = Path(path)
    if fmt == "graphml":
        _write_graphml(vertices, edges, path)
    elif fmt == "dot":
        _write_dot(vertices, edges, path)
    elif fmt == "edge-csv":
        write_edge_table(g, scores, path)
    else:
        write_json({"vertices": vertices, "edges": edges}, path)

    logger.debug(f"Wrote {fmt} export {path}")
    return path


def layout(g: WeightedGraph, seed: int = 0) -> dict[VertexId, Position]:
    """Force-directed coordinates, reproducible for a given `seed`"""
    G = to_networkx(g)
    pos = nx.spring_layout(G, weight="weight", seed=seed % 2**32)
    return {v: (float(pos[v][0]), float(pos[v][1])) for v in range(len(g))}


def to_networkx(g: WeightedGraph) -> nx.Graph:
    """Copy into a `networkx.Graph` keyed by vertex id"""
    G = nx.Graph()
    for v, vertex in enumerate(g.vertices):
        G.add_node(v, label=vertex.label, frequency=vertex.frequency)
    for u, v, w in g.edges():
        G.add_edge(u, v, weight=w)
    return G


def write_centrality_table(
    g: WeightedGraph,
    scores: CentralityReport,
    path: Path | str,
    *,
    area_of: Sequence[str] | None = None,
) -> Path:
    header = ["label", "frequency", "eigenvector", "betweenness"]
    if area_of is not None:
        header.append("area")

    rows = []
    for v, vertex in enumerate(g.vertices):
        row: list[Any] = [
            vertex.label,
            vertex.frequency,
            scores.eigenvector[v],
            scores.betweenness[v],
        ]
        if area_of is not None:
            row.append(area_of[v])
        rows.append(row)

    return write_csv(header, rows, path)


def write_edge_table(
    g: WeightedGraph,
    scores: CentralityReport,
    path: Path | str,
) -> Path:
    header = ["u", "v", "weight", "edge_betweenness"]
    rows = [
        [g.label(u), g.label(v), w, scores.edge_betweenness[(u, v)]]
        for u, v, w in g.edges()
    ]
    return write_csv(header, rows, path)


def write_partition_table(
    g: WeightedGraph,
    partition: Partition,
    classes: Mapping[int, Sequence[str]],
    path: Path | str,
    *,
    area_of: Sequence[str] | None = None,
) -> Path:
    """One row per hashtag, CES classes of its community joined by ';'"""
    header = ["label", "community", "ces_classes"]
    if area_of is not None:
        header.append("area")

    rows = []
    for v, c in enumerate(partition.assignment):
        row: list[Any] = [g.label(v), c, ";".join(classes.get(c, ()))]
        if area_of is not None:
            row.append(area_of[v])
        rows.append(row)

    return write_csv(header, rows, path)


def write_dendrogram(d: Dendrogram, path: Path | str) -> Path:
    """Merge list with Q after each merge, step -1 holds the initial Q"""
    rows: list[list[Any]] = [[-1, "", "", "", d.initial_modularity]]
    for m in d.merges:
        rows.append([m.step, m.merged[0], m.merged[1], m.result, m.modularity_after])

    return write_csv(["step", "a", "b", "result", "modularity"], rows, path)


def write_csv(
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    path: Path | str,
) -> Path:
    path = Path(path)
    with _opened(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)

    return path


def write_json(data: Any, path: Path | str) -> Path:
    path = Path(path)
    with _opened(path) as fh:
        json.dump(data, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    return path


@contextmanager
def _opened(path: Path) -> Iterator[Any]:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = path.open("w", encoding="utf-8", newline="")
    except OSError as e:
        message = f"Can't write to {path}: {e.strerror}"
        raise OSError(e.errno, message, str(path)) from e

    with fh:
        yield fh


def _vertex_rows(
    g: WeightedGraph,
    scores: CentralityReport,
    partition: Partition,
    area_of: Sequence[str] | None,
    positions: Mapping[VertexId, Position] | None,
) -> list[dict[str, Any]]:
    rows = []
    for v, vertex in enumerate(g.vertices):
        row: dict[str, Any] = {
            "id": v,
            "label": vertex.label,
            "frequency": vertex.frequency,
            "eigenvector": scores.eigenvector[v],
            "betweenness": scores.betweenness[v],
            "community": partition.assignment[v],
        }
        if area_of is not None:
            row["area"] = area_of[v]
        if positions is not None:
            row["x"], row["y"] = positions[v]
        rows.append(row)

    return rows


def _edge_rows(g: WeightedGraph, scores: CentralityReport) -> list[dict[str, Any]]:
    return [
        {
            "u": u,
            "v": v,
            "weight": w,
            "edge_betweenness": scores.edge_betweenness[(u, v)],
        }
        for u, v, w in g.edges()
    ]


def _write_graphml(
    vertices: list[dict[str, Any]],
    edges: list[dict[str, Any]],
    path: Path,
) -> None:
    G = nx.Graph()
    for row in vertices:
        attrs = {k: x for k, x in row.items() if k != "id"}
        G.add_node(f"n{row['id']}", **attrs)
    for row in edges:
        G.add_edge(
            f"n{row['u']}",
            f"n{row['v']}",
            weight=row["weight"],
            edge_betweenness=row["edge_betweenness"],
        )

    with _opened(path) as fh:
        fh.write("\n".join(nx.generate_graphml(G)))
        fh.write("\n")


def _write_dot(
    vertices: list[dict[str, Any]],
    edges: list[dict[str, Any]],
    path: Path,
) -> None:
    with _opened(path) as fh:
        fh.write("graph hashtags {\n")
        for row in vertices:
            attrs = ", ".join(
                f"{k}={_dot_value(x)}" for k, x in row.items() if k != "id"
            )
            fh.write(f"  n{row['id']} [{attrs}];\n")
        for row in edges:
            fh.write(
                f"  n{row['u']} -- n{row['v']}"
                f" [weight={row['weight']},"
                f" edge_betweenness={_dot_value(row['edge_betweenness'])}];\n"
            )
        fh.write("}\n")


def _dot_value(x: Any) -> str:
    if isinstance(x, float):
        return f'"{x!r}"'
    if isinstance(x, int):
        return str(x)
    text = str(x).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'
