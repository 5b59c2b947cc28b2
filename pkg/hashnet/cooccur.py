"""Hashtag co-occurrence networks.

An edge weight is the number of posts carrying both of its hashtags. Each post is a
set of tags, so a post counts at most once per pair.
"""
from __future__ import annotations

from typing import Collection, Iterable, Mapping, Sequence, Tuple

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from hashnet.exceptions import DegenerateCorpusError, EmptyUnionError
from hashnet.graph import WeightedGraph
from hashnet.ingest import CleanedPost, Corpus, hashtag_frequencies

logger = logging.getLogger(__name__)

DEFAULT_K_TOP = 150
DEFAULT_PAIR_BUDGET = 1400

Pair = Tuple[str, str]


@dataclass(frozen=True)
class AreaNetwork:
    area_name: str
    graph: WeightedGraph
    k_used: int
    coverage: float


@dataclass(frozen=True)
class MergedNetwork:
    graph: WeightedGraph
    pair_budget: int
    area_of: list[str]
    weight_coverage: float
    distinct_pairs: int
    area_counts: list[dict[str, int]]


def count_pairs(
    posts: Iterable[CleanedPost],
    vocabulary: Collection[str] | None = None,
) -> Counter[Pair]:
    """Posts per unordered hashtag pair, pairs as lexicographically sorted tuples

    Parameters
    ----------
    posts : Iterable[CleanedPost]
        The posts

    vocabulary : Collection[str] | None = None
        Only count pairs of these hashtags, all hashtags when None
    """
    pairs: Counter[Pair] = Counter()
    keep = None if vocabulary is None else set(vocabulary)
    for post in posts:
        tags = post.hashtags if keep is None else post.hashtags & keep
        if len(tags) >= 2:
            pairs.update(combinations(sorted(tags), 2))

    return pairs


def top_hashtags(frequencies: dict[str, int], k: int | None) -> list[tuple[str, int]]:
    """The `k` most frequent hashtags, ties broken lexicographically"""
    ranked = sorted(frequencies.items(), key=lambda item: (-item[1], item[0]))
    return ranked if k is None else ranked[:k]


def coverage_stat(c: Corpus, top_set: Collection[str]) -> float:
    """Share of occurrences of `top_set` tags that share their post with another one

    Counted per (post, tag) occurrence with tag in `top_set`: the fraction of those
    occurrences whose post carries at least one other member of `top_set`.
    """
    if not top_set:
        raise ValueError("`top_set` must be non-empty")

    top = set(top_set)
    occurrences = paired = 0
    for post in c.posts:
        m = len(post.hashtags & top)
        occurrences += m
        if m >= 2:
            paired += m

    return paired / occurrences if occurrences else 0.0


def build_network(c: Corpus, k: int | None = DEFAULT_K_TOP) -> AreaNetwork:
    """Co-occurrence network over the `k` most frequent hashtags of `c`

    Vertex ids follow the frequency ranking. Hashtags outside the top `k` are
    ignored, a post only contributes the pairs among its top `k` tags. Vertices
    without edges are kept.

    Parameters
    ----------
    c : Corpus
        A cleaned corpus

    k : int | None = 150
        How many hashtags to keep, None for all of them

    Returns
    -------
    AreaNetwork
        The graph with the number of hashtags actually used and `coverage_stat`
    """
    if k is not None and not k >= 2:
        raise ValueError(f"`k` {k} must be >= 2")

    frequencies = hashtag_frequencies(c)
    if len(frequencies) < 2:
        raise DegenerateCorpusError(
            f"Corpus `{c.area_name}` has {len(frequencies)} distinct hashtags,"
            " at least 2 are needed"
        )

    ranked = top_hashtags(frequencies, k)
    g = WeightedGraph()
    for label, frequency in ranked:
        g.add_vertex(label, frequency)

    top = [label for label, _ in ranked]
    _add_pairs(g, count_pairs(c.posts, top))

    coverage = coverage_stat(c, top)
    logger.info(
        f"[{c.area_name}] network over {len(g)} hashtags, {g.edge_count} edges,"
        f" coverage {coverage:.3f}"
    )
    return AreaNetwork(area_name=c.area_name, graph=g, k_used=len(g), coverage=coverage)


def merge_networks(
    corpora: Sequence[Corpus],
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    *,
    from_area_networks: bool = False,
    k: int | None = DEFAULT_K_TOP,
) -> MergedNetwork:
    """Single network of the `pair_budget` heaviest pairs over all areas

    Hashtags with the same text unify across areas. Each vertex is attributed to the
    area contributing most of its occurrences, ties going to the first area name.

    Parameters
    ----------
    corpora : Sequence[Corpus]
        At least two cleaned corpora

    pair_budget : int = 1400
        Number of pairs to retain, ties broken lexicographically on the pair

    from_area_networks : bool = False
        Sum the edges of each area's top `k` network instead of counting pairs over
        all posts

    k : int | None = 150
        Only used with `from_area_networks`

    Returns
    -------
    MergedNetwork
        The merged graph with area attribution and the retained share of pair weight
    """
    if len(corpora) < 2:
        raise ValueError(f"`corpora` has {len(corpora)} corpora, at least 2 needed")

    if not pair_budget >= 1:
        raise ValueError(f"`pair_budget` {pair_budget} must be >= 1")

    pairs: Counter[Pair] = Counter()
    frequency: Counter[str] = Counter()
    per_area: dict[str, Counter[str]] = {}
    for corpus in corpora:
        area_frequencies = hashtag_frequencies(corpus)
        if from_area_networks:
            if len(area_frequencies) < 2:
                continue
            net = build_network(corpus, k)
            for u, v, w in net.graph.edges():
                a, b = sorted((net.graph.label(u), net.graph.label(v)))
                pairs[(a, b)] += w
        else:
            pairs.update(count_pairs(corpus.posts))

        frequency.update(area_frequencies)
        for tag, n in area_frequencies.items():
            per_area.setdefault(tag, Counter())[corpus.area_name] += n

    if not pairs:
        raise EmptyUnionError("The merged corpora contain no hashtag pairs")

    ranked = sorted(pairs.items(), key=lambda item: (-item[1], item[0]))
    kept = ranked[:pair_budget]

    labels = {tag for (a, b), _ in kept for tag in (a, b)}
    g = WeightedGraph()
    for label in sorted(labels, key=lambda t: (-frequency[t], t)):
        g.add_vertex(label, frequency[label])

    _add_pairs(g, dict(kept))

    area_counts = []
    area_of = []
    for vertex in g.vertices:
        counts = dict(sorted(per_area[vertex.label].items()))
        area_counts.append(counts)
        area_of.append(min(counts.items(), key=lambda item: (-item[1], item[0]))[0])

    total = sum(pairs.values())
    retained = sum(w for _, w in kept)
    coverage = retained / total
    logger.info(
        f"Merged {len(corpora)} corpora: kept {len(kept)} of {len(pairs)} pairs,"
        f" weight coverage {coverage:.3f}"
    )
    return MergedNetwork(
        graph=g,
        pair_budget=pair_budget,
        area_of=area_of,
        weight_coverage=coverage,
        distinct_pairs=len(pairs),
        area_counts=area_counts,
    )


def _add_pairs(g: WeightedGraph, pairs: Mapping[Pair, int]) -> None:
    edges = []
    for (a, b), w in pairs.items():
        u, v = sorted((g.id_of(a), g.id_of(b)))
        edges.append((u, v, w))

    for u, v, w in sorted(edges):
        g.upsert_edge(u, v, w)
