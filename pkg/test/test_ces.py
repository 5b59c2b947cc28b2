from __future__ import annotations

import json
from pathlib import Path

from hashnet import CesLexicon, Partition, WeightedGraph, classify
from hashnet.exceptions import LexiconError

import pytest


def labelled(labels: list[str]) -> WeightedGraph:
    return WeightedGraph.from_edges(labels, [])


LEXICON = CesLexicon(
    classes={
        "wildlife (birds)": frozenset(["puffins", "birds", "seabirds"]),
        "recreational (hiking)": frozenset(["hiking", "trail", "#Walking"]),
        "aesthetic": frozenset(["sunset", "view"]),
    },
    min_overlap=2,
)


def test_classify_by_overlap() -> None:
    """
    Expects
    -------
    * A community is labelled with every class reaching `min_overlap` hits,
      most hits first
    * A community with no class above the threshold is unmatched
    """
    g = labelled(
        ["puffins", "birds", "seabirds", "sunset", "view", "hiking", "coffee", "pub"]
    )
    partition = Partition(assignment=[0, 0, 0, 0, 0, 1, 1, 2], q=0.0)
    labels = classify(partition, g, LEXICON)

    assert [label.community for label in labels] == [0, 1, 2]
    assert labels[0].matches == (("wildlife (birds)", 3), ("aesthetic", 2))
    assert labels[0].size == 5
    assert labels[1].unmatched
    assert labels[2].classes == []


def test_classify_ties_by_name() -> None:
    """
    Expects
    -------
    * Classes with equal hits are ordered by name
    """
    g = labelled(["sunset", "view", "hiking", "trail"])
    labels = classify(Partition(assignment=[0, 0, 0, 0], q=0.0), g, LEXICON)
    assert labels[0].classes == ["aesthetic", "recreational (hiking)"]


def test_lexicon_terms_normalized() -> None:
    """
    Expects
    -------
    * Lexicon terms are normalized like hashtags
    """
    assert "walking" in LEXICON.classes["recreational (hiking)"]


@pytest.mark.parametrize(
    "classes, min_overlap",
    [
        ({}, 2),
        ({"a": frozenset()}, 2),
        ({"a": frozenset(["#"])}, 2),
        ({"a": frozenset(["x"])}, 0),
    ],
)
def test_lexicon_invalid(classes: dict, min_overlap: int) -> None:
    """
    Expects
    -------
    * Empty lexicons, empty classes or terms and min_overlap < 1 are rejected
    """
    with pytest.raises(LexiconError):
        CesLexicon(classes=classes, min_overlap=min_overlap)


def test_lexicon_from_file(tmp_path: Path) -> None:
    """
    Expects
    -------
    * A lexicon written with to_dict loads back equal
    * Invalid JSON raises LexiconError
    """
    path = tmp_path / "lexicon.json"
    path.write_text(json.dumps(LEXICON.to_dict()))
    assert CesLexicon.from_file(path) == LEXICON

    path.write_text("{")
    with pytest.raises(LexiconError):
        CesLexicon.from_file(path)


@pytest.mark.parametrize(
    "data",
    [
        {"classes": ["aesthetic"]},
        {"classes": {"aesthetic": "sunset"}},
        {"classes": {"aesthetic": ["sunset", 3]}},
        {"classes": {"aesthetic": ["sunset"]}, "min_overlap": "2"},
        {"classes": {"aesthetic": ["sunset"]}, "min_overlap": True},
        {"classes": {"aesthetic": ["sunset"]}, "threshold": 2},
    ],
)
def test_malformed_lexicon_file(tmp_path: Path, data: dict) -> None:
    """
    Expects
    -------
    * A class given as a string, not an array of terms, is rejected
    * So are non string terms, a non integer min_overlap and unknown keys
    * The error is an input error, exit code 1
    """
    path = tmp_path / "lexicon.json"
    path.write_text(json.dumps(data))
    with pytest.raises(LexiconError) as e:
        CesLexicon.from_file(path)

    assert e.value.exit_code == 1


def test_starter_lexicon_terms_disjoint() -> None:
    """
    Expects
    -------
    * The bundled lexicon's classes share no term
    """
    lexicon = CesLexicon.starter()
    seen: set[str] = set()
    for terms in lexicon.classes.values():
        assert not terms & seen
        seen |= terms


def test_partition_size_mismatch() -> None:
    """
    Expects
    -------
    * A partition not covering the graph is rejected
    """
    g = labelled(["a", "b"])
    with pytest.raises(ValueError):
        classify(Partition(assignment=[0], q=0.0), g, LEXICON)
