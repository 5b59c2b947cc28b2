"""Fast-Greedy agglomerative modularity maximization.

Starting from singletons, the pair of connected communities with the largest
modularity gain is merged, even when the gain is negative, until no two communities
share an edge. The full merge history is kept so it can be cut at its best step.

Singleton community ids are the vertex ids ``0..n-1`` and the community created at
merge step ``s`` gets id ``n + s``.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import heapq
import logging
from dataclasses import dataclass, field

from hashnet.exceptions import DendrogramMismatchError, UnassignedVertexError
from hashnet.graph import VertexId, WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Merge:
    step: int
    merged: tuple[int, int]
    result: int
    modularity_after: float


@dataclass(frozen=True)
class Dendrogram:
    vertex_count: int
    initial_modularity: float
    merges: tuple[Merge, ...] = field(default_factory=tuple)

    @property
    def trace(self) -> list[float]:
        """Modularity before any merge followed by the value after each merge"""
        return [self.initial_modularity] + [m.modularity_after for m in self.merges]

    def best_step(self) -> int:
        """Number of merges giving the maximal Q, earliest on ties"""
        trace = self.trace
        best = max(trace)
        return trace.index(best)

    def assignment_at(self, steps: int) -> list[int]:
        """Community per vertex after applying the first `steps` merges

        Communities are renumbered ``0..C-1`` in order of their smallest vertex.
        """
        if not 0 <= steps <= len(self.merges):
            raise ValueError(f"`steps` {steps} must be in [0, {len(self.merges)}]")

        n = self.vertex_count
        parent = list(range(n + steps))
        for merge in self.merges[:steps]:
            a, b = merge.merged
            parent[a] = merge.result
            parent[b] = merge.result

        def root(c: int) -> int:
            while parent[c] != c:
                c = parent[c]
            return c

        renumber: dict[int, int] = {}
        assignment = []
        for v in range(n):
            r = root(v)
            assignment.append(renumber.setdefault(r, len(renumber)))

        return assignment


@dataclass(frozen=True)
class Partition:
    assignment: list[int]
    q: float

    @property
    def community_count(self) -> int:
        return len(set(self.assignment))

    def communities(self) -> dict[int, list[VertexId]]:
        """Members per community id, both in ascending order"""
        members: dict[int, list[VertexId]] = {}
        for v, c in enumerate(self.assignment):
            members.setdefault(c, []).append(v)

        return dict(sorted(members.items()))


def modularity(
    g: WeightedGraph,
    assignment: Sequence[int] | Mapping[VertexId, int],
) -> float:
    """Weighted modularity ``Q = sum_c [W_c / W - (S_c / 2W)^2]``

    Parameters
    ----------
    g : WeightedGraph
        The graph

    assignment : Sequence[int] | Mapping[VertexId, int]
        Community label per vertex id, must cover every vertex

    Returns
    -------
    float
        Q, defined as 0 for a graph without edges
    """
    labels = _labels(g, assignment)
    total = g.total_weight
    if total == 0:
        return 0.0

    internal: dict[int, int] = {}
    strength: dict[int, int] = {}
    for u, v, w in g.edges():
        cu, cv = labels[u], labels[v]
        strength[cu] = strength.get(cu, 0) + w
        strength[cv] = strength.get(cv, 0) + w
        if cu == cv:
            internal[cu] = internal.get(cu, 0) + w

    q = 0.0
    for c in sorted(strength):
        q += internal.get(c, 0) / total - (strength[c] / (2 * total)) ** 2

    return q


def fast_greedy(g: WeightedGraph) -> Dendrogram:
    """Greedy agglomeration recording Q after every merge

    Gains live in one sparse row per community plus a heap of
    ``(-gain, min_id, max_id)`` entries. Stale heap entries are skipped when popped,
    which gives the smallest community pair on equal gains.
    """
    n = len(g)
    if n < 1:
        raise ValueError("`g` must have at least one vertex")

    total = g.total_weight
    if total == 0:
        return Dendrogram(vertex_count=n, initial_modularity=0.0)

    two_w = 2.0 * total
    a = {v: g.strength(v) / two_w for v in range(n)}
    dq: dict[int, dict[int, float]] = {v: {} for v in range(n)}
    heap: list[tuple[float, int, int]] = []
    for u, v, w in g.edges():
        gain = 2.0 * (w / two_w - a[u] * a[v])
        dq[u][v] = gain
        dq[v][u] = gain
        heap.append((-gain, u, v))

    heapq.heapify(heap)

    q = -sum(x * x for x in a.values())
    initial = q
    merges: list[Merge] = []
    next_id = n
    while heap:
        neg_gain, i, j = heapq.heappop(heap)
        if i not in dq or j not in dq[i] or dq[i][j] != -neg_gain:
            continue

        gain = dq[i][j]
        k = next_id
        next_id += 1

        row_i = dq.pop(i)
        row_j = dq.pop(j)
        del row_i[j]
        del row_j[i]

        row_k: dict[int, float] = {}
        for l in row_i.keys() | row_j.keys():
            if l in row_i and l in row_j:
                value = row_i[l] + row_j[l]
            elif l in row_i:
                value = row_i[l] - 2.0 * a[j] * a[l]
            else:
                value = row_j[l] - 2.0 * a[i] * a[l]

            row_k[l] = value
            row_l = dq[l]
            row_l.pop(i, None)
            row_l.pop(j, None)
            row_l[k] = value
            heapq.heappush(heap, (-value, l, k) if l < k else (-value, k, l))

        dq[k] = row_k
        a[k] = a.pop(i) + a.pop(j)
        q += gain
        merges.append(
            Merge(step=len(merges), merged=(i, j), result=k, modularity_after=q)
        )

    logger.debug(f"Fast-Greedy made {len(merges)} merges over {n} vertices")
    return Dendrogram(vertex_count=n, initial_modularity=initial, merges=tuple(merges))


def cut_at_max_modularity(d: Dendrogram, g: WeightedGraph) -> Partition:
    """Partition at the merge step with maximal recorded Q, earliest on ties"""
    if d.vertex_count != len(g):
        raise DendrogramMismatchError(
            f"Dendrogram over {d.vertex_count} vertices can't be cut against a graph"
            f" with {len(g)} vertices"
        )

    limit = len(g) - len(g.connected_components())
    if len(d.merges) > limit:
        raise DendrogramMismatchError(
            f"Dendrogram has {len(d.merges)} merges, more than the {limit} possible"
            " for this graph"
        )

    assignment = d.assignment_at(d.best_step())
    return Partition(assignment=assignment, q=modularity(g, assignment))


def communities(g: WeightedGraph) -> tuple[Dendrogram, Partition]:
    """Run `fast_greedy` and cut it at its maximum"""
    dendrogram = fast_greedy(g)
    return dendrogram, cut_at_max_modularity(dendrogram, g)


def _labels(
    g: WeightedGraph,
    assignment: Sequence[int] | Mapping[VertexId, int],
) -> list[int]:
    if isinstance(assignment, Mapping):
        labels = []
        for v in range(len(g)):
            if v not in assignment:
                raise UnassignedVertexError(g.label(v))
            labels.append(assignment[v])

        return labels

    labels = list(assignment)
    if len(labels) < len(g):
        raise UnassignedVertexError(g.label(len(labels)))

    if len(labels) > len(g):
        raise ValueError(
            f"`assignment` has {len(labels)} entries for a graph of {len(g)} vertices"
        )

    return labels
