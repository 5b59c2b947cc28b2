"""Undirected weighted simple graph over hashtags.

Vertices get dense integer ids in insertion order and every downstream analysis
indexes plain lists by those ids. The graph is built once, by a single writer, and
treated as immutable afterwards so that analyses can share it freely.
"""
from __future__ import annotations

from typing import Iterable, Iterator

from collections import deque
from numbers import Integral
from dataclasses import dataclass

from hashnet.exceptions import (
    DuplicateLabelError,
    MissingVertexError,
    SelfLoopError,
)

VertexId = int


@dataclass(frozen=True)
class Vertex:
    label: str
    frequency: int


class WeightedGraph:
    """Undirected simple graph with positive integer edge weights"""

    def __init__(self) -> None:
        self._vertices: list[Vertex] = []
        self._index: dict[str, VertexId] = {}
        self._adjacency: list[dict[VertexId, int]] = []
        self._edge_count = 0
        self._total_weight = 0

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __repr__(self) -> str:
        return (
            f"WeightedGraph(|V|={len(self)}, |E|={self._edge_count},"
            f" W={self._total_weight})"
        )

    @property
    def vertices(self) -> list[Vertex]:
        return list(self._vertices)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def total_weight(self) -> int:
        """Sum of all edge weights"""
        return self._total_weight

    def add_vertex(self, label: str, frequency: int = 1) -> VertexId:
        """Insert a new vertex and return its id

        Parameters
        ----------
        label : str
            The normalized hashtag, must not already be present

        frequency : int = 1
            Number of posts carrying the hashtag

        Returns
        -------
        VertexId
            The next dense id, equal to the vertex count before insertion
        """
        if not label:
            raise ValueError("`label` must be a non-empty string")

        if frequency < 0:
            raise ValueError(f"`frequency` {frequency} must be >= 0")

        if label in self._index:
            raise DuplicateLabelError(label)

        vid = len(self._vertices)
        self._vertices.append(Vertex(label=label, frequency=frequency))
        self._index[label] = vid
        self._adjacency.append({})
        return vid

    def upsert_edge(self, u: VertexId, v: VertexId, delta: int = 1) -> int:
        """Create edge (u, v) with weight `delta` or add `delta` to its weight

        Returns
        -------
        int
            The resulting weight of the edge
        """
        self._check(u)
        self._check(v)
        if u == v:
            raise SelfLoopError(u)

        if delta < 1:
            raise ValueError(f"`delta` {delta} must be >= 1")

        row = self._adjacency[u]
        if v not in row:
            self._edge_count += 1
            weight = delta
        else:
            weight = row[v] + delta

        row[v] = weight
        self._adjacency[v][u] = weight
        self._total_weight += delta
        return weight

    def vertex(self, v: VertexId) -> Vertex:
        self._check(v)
        return self._vertices[v]

    def label(self, v: VertexId) -> str:
        return self.vertex(v).label

    def id_of(self, label: str) -> VertexId:
        try:
            return self._index[label]
        except KeyError:
            raise MissingVertexError(label) from None

    def neighbors(self, v: VertexId) -> dict[VertexId, int]:
        """Mapping of neighbor id to edge weight, a copy"""
        self._check(v)
        return dict(self._adjacency[v])

    def weight(self, u: VertexId, v: VertexId) -> int:
        """Weight of edge (u, v), 0 if absent"""
        self._check(u)
        self._check(v)
        return self._adjacency[u].get(v, 0)

    def degree(self, v: VertexId) -> int:
        self._check(v)
        return len(self._adjacency[v])

    def strength(self, v: VertexId) -> int:
        """Sum of the weights of the edges incident to `v`"""
        self._check(v)
        return sum(self._adjacency[v].values())

    def edges(self) -> Iterator[tuple[VertexId, VertexId, int]]:
        """Edges as (u, v, weight) with u < v, ordered by (u, v)"""
        for u, row in enumerate(self._adjacency):
            for v in sorted(row):
                if u < v:
                    yield u, v, row[v]

    def adjacency(self) -> list[list[tuple[VertexId, int]]]:
        """Read-only snapshot of the adjacency, neighbors sorted by id"""
        return [sorted(row.items()) for row in self._adjacency]

    def connected_components(self) -> list[set[VertexId]]:
        """Connected components, ordered by their smallest vertex id"""
        seen = [False] * len(self._vertices)
        components: list[set[VertexId]] = []
        for root in range(len(self._vertices)):
            if seen[root]:
                continue

            seen[root] = True
            component = {root}
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in self._adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        component.add(w)
                        queue.append(w)

            components.append(component)

        return components

    def largest_component(self) -> set[VertexId]:
        """The largest component, ties broken by smallest contained vertex id"""
        components = self.connected_components()
        if not components:
            return set()

        # components are already ordered by min id so max() keeps the first tie
        return max(components, key=len)

    @classmethod
    def from_edges(
        cls,
        labels: Iterable[str | tuple[str, int]],
        edges: Iterable[tuple[str, str, int]],
    ) -> WeightedGraph:
        """Build a graph from labels (optionally with frequencies) and labelled edges"""
        g = cls()
        for item in labels:
            if isinstance(item, tuple):
                g.add_vertex(item[0], item[1])
            else:
                g.add_vertex(item)

        for a, b, w in edges:
            g.upsert_edge(g.id_of(a), g.id_of(b), w)

        return g

    def _check(self, v: VertexId) -> None:
        if not isinstance(v, Integral) or not 0 <= v < len(self._vertices):
            raise MissingVertexError(v)


def add_vertex(g: WeightedGraph, label: str, frequency: int = 1) -> VertexId:
    return g.add_vertex(label, frequency)


def upsert_edge(g: WeightedGraph, u: VertexId, v: VertexId, delta: int = 1) -> int:
    return g.upsert_edge(u, v, delta)


def strength(g: WeightedGraph, v: VertexId) -> int:
    return g.strength(v)


def connected_components(g: WeightedGraph) -> list[set[VertexId]]:
    return g.connected_components()
