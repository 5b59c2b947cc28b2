from __future__ import annotations

import json
from collections import Counter
from pathlib import Path

from hashnet import (
    STUDY_AREAS,
    CesLexicon,
    SyntheticPlan,
    Theme,
    build_network,
    classify,
    clean,
    communities,
    count_pairs,
    generate_synthetic,
    read_posts,
    study_area_plans,
    write_synthetic,
)
from hashnet.exceptions import DegeneratePlanError
from hashnet.ingest import hashtag_frequencies
from hashnet.synth import GLOBAL_TERMS, lexicon_themes

import pytest

THEMES = (
    Theme("birds", ("puffins", "seabirds", "birds", "birding")),
    Theme("hike", ("hiking", "trail", "walking", "outdoors")),
)


def plan(**changes: object) -> SyntheticPlan:
    values: dict = {"area_name": "Test Area", "themes": THEMES, "posts": 200}
    values.update(changes)
    return SyntheticPlan(**values)  # type: ignore


def test_single_post_single_edge() -> None:
    """
    Expects
    -------
    * One theme, one post and two tags give one edge of weight 1
    """
    p = plan(
        themes=(Theme("t", ("a", "b")),),
        posts=1,
        min_tags=2,
        max_tags=2,
        mean_tags=2,
    )
    synthetic = generate_synthetic(p)
    c = clean(synthetic.posts, queries=p.queries)
    g = build_network(c, None).graph

    assert list(g.edges()) == [(0, 1, 1)]
    assert synthetic.ledger.pair_counts == {("a", "b"): 1}


def test_default_query() -> None:
    """
    Expects
    -------
    * Without queries the plan searches for its slugged area name
    * Every post carries the query hashtag first
    """
    p = plan()
    assert p.queries == ("#testarea",)
    assert all(post.hashtags[0] == "#testarea" for post in generate_synthetic(p).posts)


@pytest.mark.parametrize("seed", [0, 7])
def test_deterministic(seed: int) -> None:
    """
    Expects
    -------
    * The same plan and seed give identical posts and ledger
    * Another seed gives other posts
    """
    first = generate_synthetic(plan(seed=seed))
    second = generate_synthetic(plan(seed=seed))
    assert first == second

    other = generate_synthetic(plan(seed=seed + 1))
    assert other.posts != first.posts


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ledger_matches_cleaning(seed: int) -> None:
    """
    Expects
    -------
    * Default cleaning reproduces the ledger's frequencies and pair counts,
      with globals, tail tags and cross query duplicates in play
    * The duplicates found by cleaning are the ones the ledger recorded
    """
    p = plan(
        posts=500,
        queries=("#first", "#second"),
        global_terms=("travel", "photo"),
        global_rate=0.3,
        tail_terms=50,
        tail_rate=0.2,
        duplicate_rate=0.2,
        seed=seed,
    )
    synthetic = generate_synthetic(p)
    c = clean(synthetic.posts, queries=p.queries)

    assert len(c) == synthetic.unique_posts == 500
    assert hashtag_frequencies(c) == synthetic.ledger.frequencies
    assert dict(count_pairs(c.posts)) == synthetic.ledger.pair_counts
    assert c.summary is not None
    assert c.summary.duplicate_posts == synthetic.ledger.duplicates
    assert synthetic.ledger.duplicates > 0
    assert sum(synthetic.ledger.posts_per_theme.values()) == 500


def test_tag_counts_within_bounds() -> None:
    """
    Expects
    -------
    * Every post draws between min_tags and max_tags theme terms
    """
    p = plan(min_tags=2, max_tags=3, mean_tags=2.5)
    for post in generate_synthetic(p).posts:
        theme_tags = [t for t in post.hashtags[1:]]
        assert 2 <= len(theme_tags) <= 3
        assert len(set(theme_tags)) == len(theme_tags)


def test_zipf_ranking() -> None:
    """
    Expects
    -------
    * The first term of a theme is drawn more often than its last
    """
    ledger = generate_synthetic(plan(posts=2000, zipf_exponent=1.5)).ledger
    assert ledger.frequencies["puffins"] > ledger.frequencies["birding"]
    assert ledger.frequencies["hiking"] > ledger.frequencies["outdoors"]


@pytest.mark.parametrize(
    "changes",
    [
        {"themes": ()},
        {"posts": 0},
        {"area_name": "!!"},
        {"min_tags": 0},
        {"min_tags": 3, "max_tags": 2},
        {"mean_tags": 10},
        {"global_rate": 1.5},
        {"tail_rate": 0.1},
        {"themes": (Theme("t", ("a",)),)},
        {"themes": (Theme("global", ("a", "b")),)},
        {"themes": (Theme("t", ("A", "b")),)},
        {"themes": (Theme("t", ("testarea", "b")),)},
        {"themes": (Theme("t", ("a", "b")), Theme("u", ("b", "c")))},
        {"global_terms": ("puffins",)},
    ],
)
def test_degenerate_plans(changes: dict) -> None:
    """
    Expects
    -------
    * Plans that can't generate a meaningful corpus raise DegeneratePlanError
    """
    with pytest.raises(DegeneratePlanError):
        plan(**changes)


def themes_recovered(seed: int) -> bool:
    """Whether every planted theme has its own community, 80% pure and classified"""
    classes = ["wildlife (birds)", "recreational (hiking)", "aesthetic"]
    p = plan(themes=lexicon_themes(classes), posts=900, seed=seed)
    synthetic = generate_synthetic(p)
    c = clean(synthetic.posts, queries=p.queries)
    g = build_network(c, 150).graph
    _, partition = communities(g)
    labels = classify(partition, g, CesLexicon.starter())
    owner = synthetic.ledger.memberships
    members = partition.communities()

    chosen = set()
    for theme in p.themes:
        found = Counter(
            partition.assignment[g.id_of(term)] for term in theme.terms if term in g
        )
        if not found:
            return False

        community = found.most_common(1)[0][0]
        inside = [owner[g.label(v)] == theme.name for v in members[community]]
        if sum(inside) < 0.8 * len(inside):
            return False
        if theme.ces_class not in labels[community].classes:
            return False
        chosen.add(community)

    return len(chosen) == len(p.themes)


def test_theme_recovery() -> None:
    """
    Expects
    -------
    * Three planted themes each map to their own community with at least 80% of
      its members from the theme and the theme's CES class attached, on at least
      45 of 50 seeds
    """
    recovered = sum(themes_recovered(seed) for seed in range(50))
    assert recovered >= 45


def test_write_synthetic(tmp_path: Path) -> None:
    """
    Expects
    -------
    * One export per query, readable back into the generated records
    * The ledger lands next to them with the plan
    """
    p = plan(posts=50, queries=("#one", "#two"), duplicate_rate=0.5)
    synthetic = generate_synthetic(p)
    paths = write_synthetic(synthetic, tmp_path)

    assert [path.name for path in paths] == ["testarea_one.jsonl", "testarea_two.jsonl"]
    assert read_posts(paths) == synthetic.posts

    ledger = json.loads((tmp_path / "testarea.ledger.json").read_text())
    assert ledger["plan"]["seed"] == p.seed
    assert ledger["duplicates"] == synthetic.ledger.duplicates


def test_study_area_plans() -> None:
    """
    Expects
    -------
    * One plan per study area, capped in size, with distinct seeds
    * Every area shares the global terms, none of them inside a theme
    * Plans are stable for a given seed
    """
    plans = study_area_plans(seed=3, posts_cap=100)
    assert [p.area_name for p in plans] == [a.name for a in STUDY_AREAS]
    assert all(p.posts <= 100 for p in plans)
    assert len({p.seed for p in plans}) == len(plans)
    for p in plans:
        assert p.global_terms == GLOBAL_TERMS
        for theme in p.themes:
            assert not set(theme.terms) & set(GLOBAL_TERMS)

    assert study_area_plans(seed=3, posts_cap=100) == plans
    assert study_area_plans(seed=4, posts_cap=100)[0].seed != plans[0].seed


def test_unknown_class() -> None:
    """
    Expects
    -------
    * Asking for a class the lexicon doesn't have raises DegeneratePlanError
    """
    with pytest.raises(DegeneratePlanError):
        lexicon_themes(["astronomy"])
