"""Synthetic post corpora with a known ground truth.

A plan describes an area as a few themes, each a ranked pool of hashtags. Every post
picks one theme and draws its tags from the pool with Zipfian weights, optionally
joined by global hashtags shared across areas and a rare tag from a long tail. The
ledger records what cleaning and counting should find: true frequencies, pair
counts and which theme each hashtag was planted in.
"""
from __future__ import annotations

from typing import Any, Iterator, Mapping, NamedTuple, Sequence

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from itertools import combinations
from pathlib import Path

import numpy as np

from hashnet.ces import STARTER_CLASSES
from hashnet.cooccur import Pair
from hashnet.exceptions import DegeneratePlanError
from hashnet.ingest import EMPTY, RawPost, normalize_hashtag, write_posts

logger = logging.getLogger(__name__)

GLOBAL_TERMS = (
    "travel",
    "nature",
    "photo",
    "travelphotography",
    "adventure",
    "wanderlust",
)

_EPOCH = datetime(2019, 1, 1, tzinfo=timezone.utc)


class StudyArea(NamedTuple):
    name: str
    country: str
    queries: tuple[str, ...]
    posts: int
    classes: tuple[str, ...]


# Downloaded posts per area were capped at 10,000. Easter Island merges three
# queries. `classes` are the CES classes its communities were labelled with.
STUDY_AREAS: tuple[StudyArea, ...] = (
    StudyArea(
        "Galapagos", "Ecuador", ("#galapagos",), 10000,
        (
            "nature and wildlife appreciation", "recreational (beach)",
            "underwater wildlife", "recreational (underwater)", "wellbeing",
        ),
    ),
    StudyArea(
        "Glacier Bay", "USA (Alaska)", ("#glacierbayalaska",), 1811,
        ("aesthetic", "recreational (hiking)", "nature and wildlife appreciation"),
    ),
    StudyArea(
        "Great Barrier Reef", "Australia", ("#greatbarrierreef",), 9960,
        ("underwater wildlife", "recreational (underwater)", "aesthetic"),
    ),
    StudyArea(
        "Isole Egadi", "Italy", ("#isoleegadi",), 9969,
        ("recreational (water activities)", "aesthetic", "cultural heritage"),
    ),
    StudyArea(
        "Macquarie Island", "Australia", ("#macquarieisland",), 1430,
        (
            "nature and wildlife appreciation", "wildlife conservation",
            "wildlife (iconic fauna)", "wildlife (birds)",
        ),
    ),
    StudyArea(
        "Peninsula Valdez", "Argentina", ("#peninsulavaldes",), 9971,
        (
            "underwater wildlife", "wildlife conservation", "aesthetic",
            "wildlife (iconic fauna)",
        ),
    ),
    StudyArea(
        "Easter Island", "Chile", ("#easterisland", "#rapanui", "#isladepascua"),
        10000,
        ("cultural heritage", "wellbeing", "recreational (underwater)"),
    ),
    StudyArea(
        "Sandwich Harbour", "Namibia", ("#sandwichharbour",), 2807,
        ("aesthetic", "nature and wildlife appreciation", "wellbeing"),
    ),
    StudyArea(
        "Skomer", "UK", ("#skomer",), 4911,
        ("recreational (hiking)", "wildlife (birds)"),
    ),
    StudyArea(
        "Tawharanui", "New Zealand", ("#tawharanui",), 6832,
        (
            "recreational (beach)", "wellbeing", "cultural heritage",
            "wildlife conservation",
        ),
    ),
    StudyArea(
        "Tayrona", "Colombia", ("#tayrona",), 10000,
        ("wellbeing", "recreational (hiking)", "cultural heritage"),
    ),
    StudyArea(
        "Togean Island", "Indonesia", ("#togeanisland",), 9467,
        ("underwater wildlife", "recreational (underwater)", "aesthetic"),
    ),
    StudyArea(
        "Vamizi", "Mozambique", ("#vamizi",), 1367,
        (
            "wildlife conservation", "other (luxury tourism)", "wellbeing",
            "recreational (fishing)",
        ),
    ),
    StudyArea(
        "Ytrehvaler", "Norway", ("#ytrehvalernasjonalpark",), 1019,
        (
            "cultural heritage", "recreational (water activities)",
            "recreational (hiking)", "aesthetic",
        ),
    ),
)


@dataclass(frozen=True)
class Theme:
    """A ranked pool of hashtags, the first term being the most popular"""

    name: str
    terms: tuple[str, ...]
    ces_class: str | None = None


@dataclass(frozen=True)
class SyntheticPlan:
    area_name: str
    themes: tuple[Theme, ...]
    posts: int
    queries: tuple[str, ...] = ()
    zipf_exponent: float = 1.1
    min_tags: int = 2
    max_tags: int = 6
    mean_tags: float = 3.5
    global_terms: tuple[str, ...] = ()
    global_rate: float = 0.0
    tail_terms: int = 0
    tail_rate: float = 0.0
    duplicate_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.themes:
            raise DegeneratePlanError(f"Plan `{self.area_name}` has no themes")

        if not self.posts >= 1:
            raise DegeneratePlanError(
                f"Plan `{self.area_name}` has `posts` {self.posts}, must be >= 1"
            )

        if not self.area_name or not _slug(self.area_name):
            raise DegeneratePlanError(f"`area_name` {self.area_name!r} is unusable")

        if not 1 <= self.min_tags <= self.max_tags:
            raise DegeneratePlanError(
                f"Need 1 <= `min_tags` ({self.min_tags}) <= `max_tags`"
                f" ({self.max_tags})"
            )

        if not self.min_tags <= self.mean_tags <= self.max_tags:
            raise DegeneratePlanError(
                f"`mean_tags` {self.mean_tags} must lie in"
                f" [{self.min_tags}, {self.max_tags}]"
            )

        if not self.zipf_exponent >= 0:
            raise DegeneratePlanError(
                f"`zipf_exponent` {self.zipf_exponent} must be >= 0"
            )

        for name in ("global_rate", "tail_rate", "duplicate_rate"):
            rate = getattr(self, name)
            if not 0 <= rate <= 1:
                raise DegeneratePlanError(f"`{name}` {rate} must be in [0, 1]")

        if self.tail_rate > 0 and not self.tail_terms >= 1:
            raise DegeneratePlanError("`tail_rate` > 0 needs `tail_terms` >= 1")

        if not self.queries:
            object.__setattr__(self, "queries", (f"#{_slug(self.area_name)}",))

        queries: set[str] = set()
        for query in self.queries:
            normalized = normalize_hashtag(query)
            if normalized is EMPTY:
                raise DegeneratePlanError(f"Empty query in plan `{self.area_name}`")
            queries.add(str(normalized))

        planted: dict[str, str] = {}
        for theme in self.themes:
            if theme.name in ("global", "tail"):
                raise DegeneratePlanError(f"Theme name `{theme.name}` is reserved")

            if len(theme.terms) < self.min_tags:
                raise DegeneratePlanError(
                    f"Theme `{theme.name}` has {len(theme.terms)} terms, fewer than"
                    f" `min_tags` {self.min_tags}"
                )
            for term in theme.terms:
                self._plant(term, theme.name, planted, queries)

        for term in self.global_terms:
            self._plant(term, "global", planted, queries)

        for term in self.tail_vocabulary():
            self._plant(term, "tail", planted, queries)

    @staticmethod
    def _plant(
        term: str, owner: str, planted: dict[str, str], queries: set[str]
    ) -> None:
        if normalize_hashtag(term) != term:
            raise DegeneratePlanError(f"Term {term!r} is not a normalized hashtag")

        if term in queries:
            raise DegeneratePlanError(f"Term `{term}` is also a query hashtag")

        if term in planted:
            raise DegeneratePlanError(
                f"Term `{term}` is planted in both `{planted[term]}` and `{owner}`"
            )

        planted[term] = owner

    @property
    def slug(self) -> str:
        return _slug(self.area_name)

    def tail_vocabulary(self) -> list[str]:
        """Rare hashtags specific to this area"""
        width = len(str(self.tail_terms))
        return [f"{self.slug}{j:0{width}d}" for j in range(self.tail_terms)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "area_name": self.area_name,
            "themes": [
                {"name": t.name, "terms": list(t.terms), "ces_class": t.ces_class}
                for t in self.themes
            ],
            "posts": self.posts,
            "queries": list(self.queries),
            "zipf_exponent": self.zipf_exponent,
            "min_tags": self.min_tags,
            "max_tags": self.max_tags,
            "mean_tags": self.mean_tags,
            "global_terms": list(self.global_terms),
            "global_rate": self.global_rate,
            "tail_terms": self.tail_terms,
            "tail_rate": self.tail_rate,
            "duplicate_rate": self.duplicate_rate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Ledger:
    """What a default cleaning of the generated posts must reproduce"""

    frequencies: dict[str, int]
    pair_counts: dict[Pair, int]
    memberships: dict[str, str]
    posts_per_theme: dict[str, int]
    duplicates: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "frequencies": self.frequencies,
            "pair_counts": [[a, b, n] for (a, b), n in self.pair_counts.items()],
            "memberships": self.memberships,
            "posts_per_theme": self.posts_per_theme,
            "duplicates": self.duplicates,
        }


@dataclass(frozen=True)
class SyntheticCorpus:
    plan: SyntheticPlan
    by_query: dict[str, list[RawPost]]
    ledger: Ledger
    unique_posts: int

    @property
    def posts(self) -> list[RawPost]:
        """All records, duplicates included, query by query"""
        return [post for posts in self.by_query.values() for post in posts]


def generate_synthetic(plan: SyntheticPlan) -> SyntheticCorpus:
    """Draw the posts of `plan`

    Each post picks a theme uniformly, a tag count from a shifted Poisson clipped to
    ``[min_tags, max_tags]`` and the pool size, and that many distinct theme terms
    with weights ``rank ** -zipf_exponent``. Each global term then joins
    independently with `global_rate`, and one tail term with `tail_rate`. Every post
    also carries the query hashtag it was found by. Posts are spread round robin over
    the queries, a `duplicate_rate` share is also found by the next query.

    Parameters
    ----------
    plan : SyntheticPlan
        The plan, its seed fixes every draw

    Returns
    -------
    SyntheticCorpus
        Records per query and the ledger of the unique posts
    """
    rng = np.random.default_rng(plan.seed)
    weights = []
    for theme in plan.themes:
        ranks = np.arange(1, len(theme.terms) + 1, dtype=float)
        p = ranks ** -plan.zipf_exponent
        weights.append(p / p.sum())

    tail = plan.tail_vocabulary()
    by_query: dict[str, list[RawPost]] = {query: [] for query in plan.queries}
    frequencies: Counter[str] = Counter()
    pairs: Counter[Pair] = Counter()
    per_theme: Counter[str] = Counter()
    duplicates = 0
    users = max(1, plan.posts // 4)
    width = len(str(plan.posts))
    for i in range(plan.posts):
        t = int(rng.integers(len(plan.themes)))
        theme = plan.themes[t]
        per_theme[theme.name] += 1

        extra = rng.poisson(plan.mean_tags - plan.min_tags)
        n = min(plan.min_tags + int(extra), plan.max_tags, len(theme.terms))
        picks = rng.choice(len(theme.terms), size=n, replace=False, p=weights[t])
        tags = [theme.terms[j] for j in picks]

        if plan.global_terms:
            joins = rng.random(len(plan.global_terms)) < plan.global_rate
            tags.extend(term for term, j in zip(plan.global_terms, joins) if j)

        if tail and rng.random() < plan.tail_rate:
            tags.append(tail[int(rng.integers(len(tail)))])

        frequencies.update(tags)
        pairs.update(combinations(sorted(tags), 2))

        q = i % len(plan.queries)
        query = plan.queries[q]
        post = RawPost(
            post_id=f"{plan.slug}-{i:0{width}d}",
            user_id=f"u{int(rng.integers(users))}",
            hashtags=(query, *(f"#{tag}" for tag in tags)),
            query=query,
            timestamp=_EPOCH + timedelta(minutes=int(rng.integers(0, 525_600))),
        )
        by_query[query].append(post)

        if len(plan.queries) > 1 and rng.random() < plan.duplicate_rate:
            by_query[plan.queries[(q + 1) % len(plan.queries)]].append(post)
            duplicates += 1

    memberships = {}
    for theme in plan.themes:
        memberships.update({term: theme.name for term in theme.terms})
    memberships.update({term: "global" for term in plan.global_terms})
    memberships.update({term: "tail" for term in tail})

    ledger = Ledger(
        frequencies=dict(sorted(frequencies.items())),
        pair_counts=dict(sorted(pairs.items())),
        memberships=dict(sorted(memberships.items())),
        posts_per_theme=dict(sorted(per_theme.items())),
        duplicates=duplicates,
    )
    logger.debug(
        f"[{plan.area_name}] generated {plan.posts} posts, {len(frequencies)} distinct"
        f" hashtags, {duplicates} duplicates"
    )
    return SyntheticCorpus(
        plan=plan, by_query=by_query, ledger=ledger, unique_posts=plan.posts
    )


def write_synthetic(corpus: SyntheticCorpus, directory: Path | str) -> list[Path]:
    """Write one JSONL export per query and the ledger next to them

    Returns
    -------
    list[Path]
        The export files, in query order
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    slug = corpus.plan.slug

    paths = []
    for query, posts in corpus.by_query.items():
        if len(corpus.by_query) == 1:
            path = directory / f"{slug}.jsonl"
        else:
            path = directory / f"{slug}_{_slug(query)}.jsonl"
        write_posts(posts, path)
        paths.append(path)

    ledger = {"plan": corpus.plan.to_dict(), **corpus.ledger.to_dict()}
    ledger_path = directory / f"{slug}.ledger.json"
    ledger_path.write_text(
        json.dumps(ledger, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return paths


def lexicon_themes(
    classes: Sequence[str],
    pool_size: int = 8,
    exclude: Sequence[str] = GLOBAL_TERMS,
    lexicon: Mapping[str, Sequence[str]] = STARTER_CLASSES,
) -> tuple[Theme, ...]:
    """One theme per CES class, its pool the first `pool_size` class terms

    Terms in `exclude` are left out so they can be planted as global terms.
    """
    themes = []
    for name in classes:
        if name not in lexicon:
            raise DegeneratePlanError(f"Unknown CES class `{name}`")

        terms = tuple(t for t in lexicon[name] if t not in exclude)[:pool_size]
        themes.append(Theme(name=name, terms=terms, ces_class=name))

    return tuple(themes)


def study_area_plans(
    seed: int = 0,
    posts_cap: int = 10_000,
    pool_size: int = 8,
) -> list[SyntheticPlan]:
    """One plan per entry of `STUDY_AREAS`, sized by its recorded post count

    Areas share the global terms. Each area draws its own seed from `seed` so that
    adding areas does not change the others.
    """
    if not posts_cap >= 1:
        raise DegeneratePlanError(f"`posts_cap` {posts_cap} must be >= 1")

    plans = []
    for i, area in enumerate(STUDY_AREAS):
        plans.append(
            SyntheticPlan(
                area_name=area.name,
                themes=lexicon_themes(area.classes, pool_size=pool_size),
                posts=min(area.posts, posts_cap),
                queries=area.queries,
                zipf_exponent=1.1,
                min_tags=1,
                max_tags=6,
                mean_tags=3.5,
                global_terms=GLOBAL_TERMS,
                global_rate=0.25,
                tail_terms=400,
                tail_rate=0.05,
                duplicate_rate=0.05,
                seed=_area_seed(seed, i),
            )
        )

    return plans


def write_study_areas(
    directory: Path | str,
    seed: int = 0,
    posts_cap: int = 10_000,
) -> Path:
    """Generate every study area under `directory` with a config to run them

    Returns
    -------
    Path
        The written ``config.json``
    """
    directory = Path(directory)
    areas = []
    for corpus in _generate_all(study_area_plans(seed, posts_cap)):
        paths = write_synthetic(corpus, directory / "corpora")
        areas.append(
            {
                "name": corpus.plan.area_name,
                "inputs": [str(p.relative_to(directory)) for p in paths],
                "query": list(corpus.plan.queries),
            }
        )

    config = {"areas": areas, "output": "out", "seed": seed}
    path = directory / "config.json"
    path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(areas)} synthetic study areas to {directory}")
    return path


def _generate_all(plans: Sequence[SyntheticPlan]) -> Iterator[SyntheticCorpus]:
    for plan in plans:
        yield generate_synthetic(plan)


def _area_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _slug(text: str) -> str:
    return re.sub(r"[^0-9a-z]+", "", text.lower())
