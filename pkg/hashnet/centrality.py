"""Exact eigenvector, betweenness and edge betweenness centrality.

Betweenness follows Brandes' accumulation, one shortest path DAG per source. In
weighted mode the length of an edge is ``1 / weight`` so that frequent co-occurrence
means a short distance. Lengths are scaled by the least common multiple of all
weights, which keeps distances exact integers: distance ties are detected exactly and
all tied shortest paths are counted through the path multiplicities ``sigma``.

Per source contributions are reduced in source id order, whatever the number of
workers, so results are bit-stable regardless of `n_jobs`.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple, Union

import heapq
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial, reduce
from itertools import count
from math import gcd

import numpy as np

from hashnet.exceptions import ConvergenceError, NonPositiveWeightError
from hashnet.graph import VertexId, WeightedGraph

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 10_000

Score = Union[float, Fraction]
EdgeKey = Tuple[VertexId, VertexId]
Adjacency = List[List[Tuple[VertexId, int]]]


@dataclass(frozen=True)
class CentralityReport:
    eigenvector: list[float]
    betweenness: list[float]
    edge_betweenness: dict[EdgeKey, float]

    def top(self, measure: str, n: int = 10) -> list[tuple[VertexId, float]]:
        """The `n` highest scoring vertices for "eigenvector" or "betweenness"

        Ties are broken by vertex id.
        """
        scores = getattr(self, measure)
        ranked = sorted(enumerate(scores), key=lambda item: (-item[1], item[0]))
        return ranked[:n]


def eigenvector_centrality(
    g: WeightedGraph,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> list[float]:
    """Leading eigenvector of the weighted adjacency by power iteration

    Only the largest connected component is iterated on, every other vertex scores
    0. Scores are rescaled so the maximum is 1. The iteration uses ``A + I``, which
    has the same leading eigenvector as ``A`` but does not oscillate on bipartite
    components such as stars.

    Parameters
    ----------
    g : WeightedGraph
        The graph

    tolerance : float = 1e-10
        Converged once successive iterates differ by less than this in max-norm

    max_iterations : int = 10_000
        Iterations before giving up with a `ConvergenceError`

    Returns
    -------
    list[float]
        Score per vertex id, in [0, 1]
    """
    if not tolerance > 0:
        raise ValueError(f"`tolerance` {tolerance} must be > 0")

    if not max_iterations >= 1:
        raise ValueError(f"`max_iterations` {max_iterations} must be >= 1")

    scores = [0.0] * len(g)
    component = sorted(g.largest_component())
    if len(component) < 2:
        return scores

    position = {v: i for i, v in enumerate(component)}
    m = len(component)
    A = np.zeros((m, m), dtype=float)
    for u, v, w in g.edges():
        if u in position and v in position:
            A[position[u], position[v]] = w
            A[position[v], position[u]] = w

    M = A + np.eye(m)
    x = np.full(m, 1.0)
    residual = float("inf")
    for iteration in range(1, max_iterations + 1):
        y = M @ x
        y /= y.max()
        residual = float(np.abs(y - x).max())
        x = y
        if residual < tolerance:
            logger.debug(f"Power iteration converged after {iteration} iterations")
            break
    else:
        raise ConvergenceError(max_iterations, residual)

    for v, i in position.items():
        scores[v] = float(x[i])

    return scores


def eigen_residual(g: WeightedGraph, scores: Sequence[float]) -> float:
    """Relative residual ``|A x - lambda x|_inf / lambda`` of a score vector

    ``lambda`` is the Rayleigh quotient of `scores`.
    """
    n = len(g)
    A = np.zeros((n, n), dtype=float)
    for u, v, w in g.edges():
        A[u, v] = A[v, u] = w

    x = np.asarray(scores, dtype=float)
    Ax = A @ x
    lam = float(x @ Ax) / float(x @ x)
    return float(np.abs(Ax - lam * x).max()) / lam


def vertex_betweenness(
    g: WeightedGraph,
    use_weights: bool = True,
    *,
    exact: bool = False,
    n_jobs: int = 1,
) -> list[Score]:
    """Unnormalized vertex betweenness, each unordered pair {s, t} counted once

    Parameters
    ----------
    g : WeightedGraph
        The graph

    use_weights : bool = True
        Use ``1 / weight`` as edge length, otherwise every edge has length 1

    exact : bool = False
        Accumulate in `fractions.Fraction` and return rationals

    n_jobs : int = 1
        Processes to spread the sources over

    Returns
    -------
    list[float | Fraction]
        Score per vertex id
    """
    vertex, _ = betweenness(g, use_weights, exact=exact, n_jobs=n_jobs)
    return vertex


def edge_betweenness(
    g: WeightedGraph,
    use_weights: bool = True,
    *,
    exact: bool = False,
    n_jobs: int = 1,
) -> dict[EdgeKey, Score]:
    """Unnormalized edge betweenness keyed by (u, v) with u < v

    Endpoint pairs count, an edge is on the shortest path between its own endpoints
    whenever it is a shortest path. See `vertex_betweenness` for the parameters.
    """
    _, edge = betweenness(g, use_weights, exact=exact, n_jobs=n_jobs)
    return edge


def betweenness(
    g: WeightedGraph,
    use_weights: bool = True,
    *,
    exact: bool = False,
    n_jobs: int = 1,
) -> tuple[list[Score], dict[EdgeKey, Score]]:
    """Vertex and edge betweenness from a single Brandes pass"""
    if n_jobs < 1:
        raise ValueError(f"`n_jobs` {n_jobs} must be >= 1")

    if use_weights:
        for u, v, w in g.edges():
            if not w > 0:
                raise NonPositiveWeightError(g.label(u), g.label(v), w)

    adjacency = g.adjacency()
    if use_weights:
        adjacency = _integer_lengths(adjacency)
    n = len(adjacency)
    zero: Score = Fraction(0) if exact else 0.0

    vertex: list[Score] = [zero] * n
    edge: dict[EdgeKey, Score] = {(u, v): zero for u, v, _ in g.edges()}

    job = partial(_source_contributions, adjacency, use_weights, exact)
    sources = range(n)
    if n_jobs == 1 or n < 2:
        contributions = map(job, sources)
        _reduce(contributions, vertex, edge)
    else:
        chunksize = max(1, n // (4 * n_jobs))
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            _reduce(pool.map(job, sources, chunksize=chunksize), vertex, edge)

    # Every unordered pair was seen once from each of its ends
    half: Score = Fraction(1, 2) if exact else 0.5
    vertex = [score * half for score in vertex]
    edge = {key: score * half for key, score in edge.items()}
    return vertex, edge


def centrality_report(
    g: WeightedGraph,
    use_weights: bool = True,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    n_jobs: int = 1,
) -> CentralityReport:
    """All three measures for one graph"""
    eigen = eigenvector_centrality(g, tolerance, max_iterations)
    vertex, edge = betweenness(g, use_weights, n_jobs=n_jobs)
    return CentralityReport(
        eigenvector=eigen,
        betweenness=[float(x) for x in vertex],
        edge_betweenness={key: float(x) for key, x in edge.items()},
    )


def _integer_lengths(adjacency: Adjacency) -> Adjacency:
    """Replace weights by ``L // weight`` with L the lcm of all weights"""
    weights = {w for row in adjacency for _, w in row}
    scale = reduce(lambda a, b: a * b // gcd(a, b), weights, 1)
    return [[(v, scale // w) for v, w in row] for row in adjacency]


def _reduce(
    contributions: Iterable[tuple[Dict[VertexId, Score], Dict[EdgeKey, Score]]],
    vertex: list[Score],
    edge: dict[EdgeKey, Score],
) -> None:
    for vertex_delta, edge_delta in contributions:
        for v, x in vertex_delta.items():
            vertex[v] += x
        for key in sorted(edge_delta):
            edge[key] += edge_delta[key]


def _source_contributions(
    adjacency: Adjacency,
    use_weights: bool,
    exact: bool,
    source: VertexId,
) -> tuple[Dict[VertexId, Score], Dict[EdgeKey, Score]]:
    if use_weights:
        stack, sigma, preds = _dijkstra_dag(adjacency, source)
    else:
        stack, sigma, preds = _bfs_dag(adjacency, source)

    one: Score = Fraction(1) if exact else 1.0
    delta: dict[VertexId, Score] = {v: 0 * one for v in stack}
    vertex_delta: dict[VertexId, Score] = {}
    edge_delta: dict[EdgeKey, Score] = {}
    while stack:
        w = stack.pop()
        if exact:
            coeff: Score = Fraction(one + delta[w]) / sigma[w]
        else:
            coeff = (1.0 + delta[w]) / sigma[w]

        for v in preds[w]:
            c = sigma[v] * coeff
            key = (v, w) if v < w else (w, v)
            edge_delta[key] = edge_delta.get(key, 0 * one) + c
            delta[v] += c

        if w != source:
            vertex_delta[w] = delta[w]

    return vertex_delta, edge_delta


def _bfs_dag(
    adjacency: Adjacency, source: VertexId
) -> tuple[list[VertexId], dict[VertexId, int], dict[VertexId, list[VertexId]]]:
    dist = {source: 0}
    sigma = {source: 1}
    preds: dict[VertexId, list[VertexId]] = {source: []}
    stack: list[VertexId] = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        stack.append(v)
        for w, _ in adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)

    return stack, sigma, preds


def _dijkstra_dag(
    adjacency: Adjacency, source: VertexId
) -> tuple[list[VertexId], dict[VertexId, int], dict[VertexId, list[VertexId]]]:
    dist: dict[VertexId, int] = {}
    seen = {source: 0}
    sigma = {source: 1}
    preds: dict[VertexId, list[VertexId]] = {source: []}
    stack: list[VertexId] = []
    tiebreak = count()
    heap = [(0, next(tiebreak), source, source)]
    while heap:
        d, _, pred, v = heapq.heappop(heap)
        if v in dist:
            continue

        if pred != v:
            sigma[v] += sigma[pred]
        stack.append(v)
        dist[v] = d
        for w, edge_length in adjacency[v]:
            length = d + edge_length
            if w not in dist and (w not in seen or length < seen[w]):
                seen[w] = length
                heapq.heappush(heap, (length, next(tiebreak), v, w))
                sigma[w] = 0
                preds[w] = [v]
            elif length == seen[w]:
                sigma[w] += sigma[v]
                preds[w].append(v)

    return stack, sigma, preds
