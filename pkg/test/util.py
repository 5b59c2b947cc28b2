from __future__ import annotations

from typing import Iterator, Sequence, Type

import csv
import math
import os
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

from hashnet import WeightedGraph
from hashnet.ingest import Corpus, RawPost, clean
from hashnet.util import memconvert


def return_none() -> None:
    """Just returns None"""
    return None


def raises_error(exception: Type[Exception] | Exception | None = None) -> None:
    """Raise `exception` or RuntimeError if None provided"""
    exception = exception if exception is not None else RuntimeError
    if isinstance(exception, Exception):
        raise exception
    else:
        raise exception("RAISED")


def get_process_id() -> int:
    """Get the id of the process running this functions"""
    return os.getpid()


def walltime_sleep(sleep: float) -> float:
    """Sleeps for `sleep` seconds"""
    time.sleep(sleep)
    return sleep


def usememory(x: int | tuple[int, str]) -> int:
    """Use a certain amount of memory in B"""
    if isinstance(x, tuple):
        amount, unit = x
        x = round(memconvert(amount, frm=unit))

    bytearray(int(x))
    return x


def busy_wait(timeout: int) -> None:
    """A function that consumes cpu and runs until wall time timeout is reached"""
    x = 0
    start = time.perf_counter()
    while True:
        x = x + 1
        duration = time.perf_counter() - start
        if duration >= timeout:
            break

    return


def posts(*tag_lists: Sequence[str], query: str = "q") -> list[RawPost]:
    """One post per list of tags, ids in order"""
    return [
        RawPost(post_id=str(i), user_id=f"u{i}", hashtags=tuple(tags), query=query)
        for i, tags in enumerate(tag_lists)
    ]


def corpus(*tag_lists: Sequence[str], name: str = "area") -> Corpus:
    """A cleaned corpus with normalization only, the query `q` is not a tag"""
    return clean(posts(*tag_lists), area_name=name)


def graph(n: int, edges: Sequence[tuple[int, int, int]]) -> WeightedGraph:
    """Graph over vertices "v0".."v{n-1}" with (u, v, weight) edges"""
    g = WeightedGraph()
    for v in range(n):
        g.add_vertex(f"v{v}")
    for u, v, w in edges:
        g.upsert_edge(u, v, w)
    return g


def random_graph(
    n: int,
    p: float,
    seed: int,
    max_weight: int = 1,
) -> WeightedGraph:
    """Erdos-Renyi graph with uniform integer weights in [1, max_weight]"""
    rng = np.random.default_rng(seed)
    edges = []
    for u, v in combinations(range(n), 2):
        if rng.random() < p:
            edges.append((u, v, int(rng.integers(1, max_weight + 1))))
    return graph(n, edges)


def planted_partition(
    sizes: Sequence[int],
    p_in: float,
    p_out: float,
    seed: int,
) -> tuple[WeightedGraph, list[int]]:
    """Random graph with dense blocks of the given `sizes` and sparse links between"""
    rng = np.random.default_rng(seed)
    truth = [block for block, size in enumerate(sizes) for _ in range(size)]
    n = len(truth)
    edges = []
    for u, v in combinations(range(n), 2):
        p = p_in if truth[u] == truth[v] else p_out
        if rng.random() < p:
            edges.append((u, v, 1))
    return graph(n, edges), truth


def all_shortest_paths(
    g: WeightedGraph,
    use_weights: bool,
) -> dict[tuple[int, int], list[list[int]]]:
    """Every shortest path between every ordered pair, by exhaustive search

    Lengths are `Fraction(1, w)` or 1, so ties are exact. Only for tiny graphs.
    """
    n = len(g)
    length = {
        (u, v): (Fraction(1, w) if use_weights else Fraction(1))
        for u, v, w in g.edges()
    }
    length.update({(v, u): x for (u, v), x in list(length.items())})

    paths: dict[tuple[int, int], list[list[int]]] = {}
    for s in range(n):
        found: dict[int, list[tuple[Fraction, list[int]]]] = {}
        stack = [[s]]
        while stack:
            path = stack.pop()
            tail = path[-1]
            if tail != s:
                d = sum(length[(a, b)] for a, b in zip(path, path[1:]))
                found.setdefault(tail, []).append((d, path))
            for w in g.neighbors(tail):
                if w not in path:
                    stack.append(path + [w])

        for t, candidates in found.items():
            best = min(d for d, _ in candidates)
            paths[(s, t)] = sorted(p for d, p in candidates if d == best)

    return paths


def brute_betweenness(
    g: WeightedGraph,
    use_weights: bool,
) -> tuple[list[Fraction], dict[tuple[int, int], Fraction]]:
    """Vertex and edge betweenness over unordered pairs from enumerated paths"""
    n = len(g)
    vertex = [Fraction(0)] * n
    edge = {(u, v): Fraction(0) for u, v, _ in g.edges()}
    for (s, t), paths in all_shortest_paths(g, use_weights).items():
        if s > t:
            continue
        share = Fraction(1, len(paths))
        for path in paths:
            for v in path[1:-1]:
                vertex[v] += share
            for a, b in zip(path, path[1:]):
                edge[(min(a, b), max(a, b))] += share

    return vertex, edge


def eigh_centrality(g: WeightedGraph) -> list[float]:
    """Leading eigenvector of the largest component's adjacency via `numpy.linalg`"""
    scores = [0.0] * len(g)
    component = sorted(g.largest_component())
    if len(component) < 2:
        return scores

    index = {v: i for i, v in enumerate(component)}
    A = np.zeros((len(component), len(component)))
    for u, v, w in g.edges():
        if u in index and v in index:
            A[index[u], index[v]] = A[index[v], index[u]] = w

    _, vectors = np.linalg.eigh(A)
    x = np.abs(vectors[:, -1])
    x /= x.max()
    for v, i in index.items():
        scores[v] = float(x[i])
    return scores


def connected_graph(
    n: int,
    p: float,
    seed: int,
    max_weight: int = 1,
) -> WeightedGraph:
    """Random path through every vertex plus Erdos-Renyi edges, weights uniform"""
    rng = np.random.default_rng(seed)
    order = [int(v) for v in rng.permutation(n)]
    edges: dict[tuple[int, int], int] = {}
    for a, b in zip(order, order[1:]):
        edges[(min(a, b), max(a, b))] = int(rng.integers(1, max_weight + 1))
    for u, v in combinations(range(n), 2):
        if (u, v) not in edges and rng.random() < p:
            edges[(u, v)] = int(rng.integers(1, max_weight + 1))
    return graph(n, [(u, v, w) for (u, v), w in sorted(edges.items())])


def random_tree(n: int, seed: int, max_weight: int = 1) -> WeightedGraph:
    """Each vertex hangs off a uniformly drawn earlier one"""
    rng = np.random.default_rng(seed)
    edges = [
        (int(rng.integers(v)), v, int(rng.integers(1, max_weight + 1)))
        for v in range(1, n)
    ]
    return graph(n, edges)


def set_partitions(n: int) -> Iterator[list[int]]:
    """Every partition of range(n) once, as restricted growth strings"""

    def grow(prefix: list[int], top: int) -> Iterator[list[int]]:
        if len(prefix) == n:
            yield list(prefix)
            return
        for label in range(top + 2):
            prefix.append(label)
            yield from grow(prefix, max(top, label))
            prefix.pop()

    yield from grow([], -1)


def best_modularity(g: WeightedGraph) -> float:
    """Maximal Q over every partition of `g`, from the modularity matrix"""
    n = len(g)
    A = np.zeros((n, n))
    for u, v, w in g.edges():
        A[u, v] = A[v, u] = w

    two_m = A.sum()
    if two_m == 0:
        return 0.0

    k = A.sum(axis=1)
    B = A - np.outer(k, k) / two_m
    best = -math.inf
    for labels in set_partitions(n):
        x = np.asarray(labels)
        best = max(best, float(B[x[:, None] == x[None, :]].sum() / two_m))
    return best


def read_edge_table(path: Path | str) -> WeightedGraph:
    """Rebuild a graph from an edge-csv export, vertices in order of appearance"""
    g = WeightedGraph()
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            ids = []
            for label in (row["u"], row["v"]):
                ids.append(g.id_of(label) if label in g else g.add_vertex(label))
            g.upsert_edge(ids[0], ids[1], int(row["weight"]))

    return g
