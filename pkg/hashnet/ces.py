"""Label hashtag communities with Cultural Ecosystem Service classes.

A lexicon maps each CES class to a set of hashtags. A community is labelled with
every class having at least `min_overlap` of its terms among the community
members, most hits first. The order of the classes carries no priority beyond that.
"""
from __future__ import annotations

from typing import Any, Mapping

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from hashnet.community import Partition
from hashnet.exceptions import LexiconError
from hashnet.graph import WeightedGraph
from hashnet.ingest import EMPTY, normalize_hashtag

logger = logging.getLogger(__name__)

DEFAULT_MIN_OVERLAP = 2

# Assembled from the hashtags reported per CES class for the fourteen case studies.
# Term sets are kept disjoint so that one hashtag supports a single class.
STARTER_CLASSES: dict[str, tuple[str, ...]] = {
    "recreational (beach)": (
        "beach", "summer", "sun", "holidays", "vacation", "swim", "caribbean",
        "beachlife", "sand", "island",
    ),
    "recreational (underwater)": (
        "diving", "scubadiving", "snorkelling", "snorkeling", "underwater",
        "underwaterphotography", "freediving", "padi", "dive",
    ),
    "recreational (hiking)": (
        "hiking", "trekking", "hike", "trail", "walking", "outdoors", "mountains",
    ),
    "recreational (water activities)": (
        "kayak", "kayaking", "sailing", "surf", "surfing", "boat", "paddleboard",
    ),
    "recreational (fishing)": (
        "fishing", "fish", "flyfishing", "gamefishing", "catchandrelease",
    ),
    "underwater wildlife": (
        "coral", "reef", "sealife", "turtle", "sharks", "marinelife", "ocean",
        "coralreef",
    ),
    "nature and wildlife appreciation": (
        "nature", "wildlife", "wildlifephotography", "naturephotography", "animals",
        "endemic", "evolution", "naturelovers",
    ),
    "wildlife (birds)": (
        "birds", "puffin", "puffins", "birdwatching", "seabirds", "birding",
        "albatross", "penguins",
    ),
    "wildlife (iconic fauna)": (
        "whales", "whalewatching", "orca", "sealions", "elephantseal", "dolphins",
        "seals", "giantturtle",
    ),
    "wildlife conservation": (
        "conservation", "savethereef", "sustainability", "science", "climatechange",
        "protect", "4ocean",
    ),
    "cultural heritage": (
        "moai", "statue", "heritage", "culture", "indigenous", "kogui", "history",
        "archaeology", "unesco", "music", "design", "food",
    ),
    "aesthetic": (
        "sunset", "landscape", "photography", "beautiful", "paradise", "wonderful",
        "charming", "view", "sky", "travelphotography",
    ),
    "wellbeing": (
        "happiness", "happy", "relax", "wellbeing", "love", "friends", "peace",
        "goodvibes",
    ),
    "other (luxury tourism)": (
        "luxurytravel", "privateisland", "luxury", "resort", "luxurylifestyle",
    ),
}


@dataclass(frozen=True)
class CesLexicon:
    classes: Mapping[str, frozenset[str]]
    min_overlap: int = DEFAULT_MIN_OVERLAP

    def __post_init__(self) -> None:
        if not self.classes:
            raise LexiconError("A CES lexicon needs at least one class")

        if not self.min_overlap >= 1:
            raise LexiconError(f"`min_overlap` {self.min_overlap} must be >= 1")

        normalized: dict[str, frozenset[str]] = {}
        for name, terms in self.classes.items():
            if not name:
                raise LexiconError("CES class names must be non-empty")

            cleaned = set()
            for term in terms:
                tag = normalize_hashtag(term)
                if tag is EMPTY:
                    raise LexiconError(f"Empty term {term!r} in class `{name}`")
                cleaned.add(str(tag))

            if not cleaned:
                raise LexiconError(f"Class `{name}` has no terms")

            normalized[name] = frozenset(cleaned)

        object.__setattr__(self, "classes", dict(sorted(normalized.items())))

    @classmethod
    def starter(cls, min_overlap: int = DEFAULT_MIN_OVERLAP) -> CesLexicon:
        """The bundled lexicon"""
        return cls(
            classes={name: frozenset(terms) for name, terms in STARTER_CLASSES.items()},
            min_overlap=min_overlap,
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> CesLexicon:
        unknown = set(data) - {"classes", "min_overlap"}
        if unknown:
            raise LexiconError(f"Unknown keys {sorted(unknown)} in lexicon")

        classes = data.get("classes")
        if not isinstance(classes, dict):
            raise LexiconError("Lexicon needs a `classes` object of term arrays")

        for name, terms in classes.items():
            if not isinstance(terms, list) or not all(
                isinstance(t, str) for t in terms
            ):
                raise LexiconError(f"Class `{name}` must be an array of terms")

        min_overlap = data.get("min_overlap", DEFAULT_MIN_OVERLAP)
        if isinstance(min_overlap, bool) or not isinstance(min_overlap, int):
            raise LexiconError(f"`min_overlap` {min_overlap!r} must be an integer")

        return cls(
            classes={name: frozenset(terms) for name, terms in classes.items()},
            min_overlap=min_overlap,
        )

    @classmethod
    def from_file(cls, path: Path | str) -> CesLexicon:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise LexiconError(f"Lexicon {path} is not valid JSON: {e}") from e

        if not isinstance(data, dict):
            raise LexiconError(f"Lexicon {path} must be a JSON object")

        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return {
            "classes": {name: sorted(terms) for name, terms in self.classes.items()},
            "min_overlap": self.min_overlap,
        }


@dataclass(frozen=True)
class CommunityLabel:
    community: int
    size: int
    matches: tuple[tuple[str, int], ...] = field(default_factory=tuple)

    @property
    def unmatched(self) -> bool:
        return not self.matches

    @property
    def classes(self) -> list[str]:
        return [name for name, _ in self.matches]


def classify(
    partition: Partition,
    g: WeightedGraph,
    lex: CesLexicon,
) -> list[CommunityLabel]:
    """CES classes of each community of `partition`

    Parameters
    ----------
    partition : Partition
        Communities over the vertices of `g`

    g : WeightedGraph
        The graph whose labels are matched

    lex : CesLexicon
        Class terms and the minimal number of hits to report a class

    Returns
    -------
    list[CommunityLabel]
        One label per community, by community id
    """
    if not lex.classes:
        raise LexiconError("Can't classify with an empty lexicon")

    if len(partition.assignment) != len(g):
        raise ValueError(
            f"`partition` covers {len(partition.assignment)} vertices, graph has"
            f" {len(g)}"
        )

    labels = []
    for community, members in partition.communities().items():
        tags = {g.label(v) for v in members}
        hits = [
            (name, len(tags & terms))
            for name, terms in lex.classes.items()
            if len(tags & terms) >= lex.min_overlap
        ]
        hits.sort(key=lambda item: (-item[1], item[0]))
        labels.append(
            CommunityLabel(community=community, size=len(members), matches=tuple(hits))
        )

    return labels
