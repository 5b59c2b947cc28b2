"""Read post exports and apply the cleaning rules.

Post exports are line-delimited JSON, one object per line::

    {"post_id": "1", "user_id": "u9", "query": "galapagos",
     "hashtags": ["#Galapagos", "#nature"], "timestamp": "2019-06-01T10:00:00Z"}

Cleaning drops whole posts, never single tags, for excluded users and hashtags.
Remaining tags are normalized, resolved through the synonym map and then the
translation map until no alias is left, de-duplicated and stripped of the query
hashtags of the area.
"""
from __future__ import annotations

from typing import IO, Any, Iterable, Mapping, Union

import hashlib
import json
import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from hashnet.exceptions import (
    AliasCycleError,
    ConfigError,
    MalformedRecordError,
    MissingFieldError,
)

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("post_id", "user_id", "hashtags", "query")


class _EMPTY:
    def __repr__(self) -> str:
        return "EMPTY"

    def __bool__(self) -> bool:
        return False


# Returned by `normalize_hashtag` when nothing is left of a tag
EMPTY = _EMPTY()


@dataclass(frozen=True)
class RawPost:
    post_id: str
    user_id: str
    hashtags: tuple[str, ...]
    query: str
    timestamp: datetime | None = None

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "post_id": self.post_id,
            "user_id": self.user_id,
            "query": self.query,
            "hashtags": list(self.hashtags),
        }
        if self.timestamp is not None:
            record["timestamp"] = self.timestamp.isoformat().replace("+00:00", "Z")

        return record


@dataclass(frozen=True)
class CleanedPost:
    post_id: str
    user_id: str
    query: str
    hashtags: frozenset[str]

    def as_raw(self) -> RawPost:
        return RawPost(
            post_id=self.post_id,
            user_id=self.user_id,
            hashtags=tuple(f"#{tag}" for tag in sorted(self.hashtags)),
            query=self.query,
        )


@dataclass(frozen=True)
class CleaningRules:
    exclude_hashtags: frozenset[str] = frozenset()
    exclude_users: frozenset[str] = frozenset()
    synonym_map: Mapping[str, str] = field(default_factory=dict)
    translation_map: Mapping[str, str] = field(default_factory=dict)
    drop_query_hashtags: bool = True

    def __post_init__(self) -> None:
        # Normalize everything once so lookups can be plain set/dict hits
        def norm(tag: str) -> str:
            result = normalize_hashtag(tag)
            if result is EMPTY:
                raise ConfigError(f"Empty hashtag {tag!r} in cleaning rules")
            return str(result)

        object.__setattr__(
            self, "exclude_hashtags", frozenset(norm(t) for t in self.exclude_hashtags)
        )
        object.__setattr__(self, "exclude_users", frozenset(self.exclude_users))
        object.__setattr__(
            self,
            "synonym_map",
            {norm(k): norm(v) for k, v in sorted(self.synonym_map.items())},
        )
        object.__setattr__(
            self,
            "translation_map",
            {norm(k): norm(v) for k, v in sorted(self.translation_map.items())},
        )
        self.validate()

    def validate(self) -> None:
        """Raise `AliasCycleError` if any alias chain loops"""
        for term in sorted(self.synonym_map.keys() | self.translation_map.keys()):
            self.resolve(term)

    def resolve(self, tag: str) -> str:
        """Follow synonyms, then translations, until `tag` is no alias"""
        chain = [tag]
        seen = {tag}
        current = tag
        while True:
            if current in self.synonym_map:
                nxt = self.synonym_map[current]
            elif current in self.translation_map:
                nxt = self.translation_map[current]
            else:
                return current

            chain.append(nxt)
            if nxt in seen:
                start = chain.index(nxt)
                raise AliasCycleError(chain[start:])

            seen.add(nxt)
            current = nxt

    def digest(self) -> str:
        """Stable sha256 over the rules, recorded with each cleaned corpus"""
        payload = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict[str, Any]:
        return {
            "exclude_hashtags": sorted(self.exclude_hashtags),
            "exclude_users": sorted(self.exclude_users),
            "synonyms": dict(self.synonym_map),
            "translations": dict(self.translation_map),
            "drop_query_hashtags": self.drop_query_hashtags,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> CleaningRules:
        known = {
            "exclude_hashtags",
            "exclude_users",
            "synonyms",
            "translations",
            "drop_query_hashtags",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(
                f"Unknown keys {sorted(unknown)} in cleaning rules, each must be in"
                f" {sorted(known)}"
            )

        def tags(key: str) -> frozenset[str]:
            value = data.get(key, [])
            if not isinstance(value, list) or not all(
                isinstance(x, str) for x in value
            ):
                raise ConfigError(
                    f"`{key}` in cleaning rules must be a list of strings"
                )
            return frozenset(value)

        def aliases(key: str) -> dict[str, str]:
            value = data.get(key, {})
            if not isinstance(value, dict) or not all(
                isinstance(x, str) for x in value.values()
            ):
                raise ConfigError(
                    f"`{key}` in cleaning rules must be an object of alias to term"
                )
            return dict(value)

        drop = data.get("drop_query_hashtags", True)
        if not isinstance(drop, bool):
            raise ConfigError(
                f"`drop_query_hashtags` {drop!r} in cleaning rules must be a boolean"
            )

        return cls(
            exclude_hashtags=tags("exclude_hashtags"),
            exclude_users=tags("exclude_users"),
            synonym_map=aliases("synonyms"),
            translation_map=aliases("translations"),
            drop_query_hashtags=drop,
        )

    @classmethod
    def from_file(cls, path: Path | str) -> CleaningRules:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Cleaning rules {path} are not valid JSON: {e}") from e

        if not isinstance(data, dict):
            raise ConfigError(f"Cleaning rules {path} must be a JSON object")

        return cls.from_dict(data)


@dataclass(frozen=True)
class CleaningSummary:
    input_posts: int
    duplicate_posts: int
    dropped_by_user: int
    dropped_by_hashtag: int
    retained_posts: int
    rule_hits: dict[str, dict[str, int]]
    empty_tags: int
    query_tags_removed: int

    @property
    def dropped_posts(self) -> int:
        return self.duplicate_posts + self.dropped_by_user + self.dropped_by_hashtag

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_posts": self.input_posts,
            "duplicate_posts": self.duplicate_posts,
            "dropped_by_user": self.dropped_by_user,
            "dropped_by_hashtag": self.dropped_by_hashtag,
            "dropped_posts": self.dropped_posts,
            "retained_posts": self.retained_posts,
            "empty_tags": self.empty_tags,
            "query_tags_removed": self.query_tags_removed,
            "rule_hits": self.rule_hits,
        }


@dataclass(frozen=True)
class Corpus:
    area_name: str
    posts: tuple[CleanedPost, ...]
    rules_applied: str
    summary: CleaningSummary | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.posts)

    def as_raw(self) -> list[RawPost]:
        return [post.as_raw() for post in self.posts]


Source = Union[IO[bytes], IO[str], Iterable[Union[bytes, str]]]


def parse_posts(source: Source) -> list[RawPost]:
    """Parse line-delimited JSON post records, preserving input order

    Blank lines are skipped. Line numbers in errors count from 1.

    Parameters
    ----------
    source : IO[bytes] | IO[str] | Iterable[bytes | str]
        A binary or text stream, or any iterable of lines

    Returns
    -------
    list[RawPost]
        One post per non-blank line
    """
    posts = []
    for number, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedRecordError(number, f"not UTF-8 ({e})") from e

        if not line.strip():
            continue

        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecordError(number, str(e)) from e

        posts.append(_parse_record(record, number))

    return posts


def read_posts(paths: Iterable[Path | str]) -> list[RawPost]:
    """Parse and concatenate several exports, e.g. one per query of an area"""
    posts: list[RawPost] = []
    for path in paths:
        with Path(path).open("rb") as fh:
            parsed = parse_posts(fh)
        logger.debug(f"Read {len(parsed)} posts from {path}")
        posts.extend(parsed)

    return posts


def write_posts(posts: Iterable[RawPost], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(json.dumps(post.to_record(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def normalize_hashtag(tag: str) -> str | _EMPTY:
    """Strip one leading '#', lowercase and trim a hashtag

    Returns
    -------
    str | EMPTY
        The normalized tag, or `EMPTY` when nothing is left
    """
    text = unicodedata.normalize("NFC", tag).strip()
    if text.startswith("#"):
        text = text[1:]

    text = text.strip().lower()
    return text if text else EMPTY


def clean(
    posts: Iterable[RawPost],
    rules: CleaningRules | None = None,
    area_name: str = "",
    queries: Iterable[str] = (),
) -> Corpus:
    """Apply `rules` to `posts`

    Posts by excluded users, posts carrying an excluded hashtag (before or after
    alias resolution) and repeated post ids are dropped. Posts left with fewer than
    two hashtags are kept, they count towards frequencies but add no edges.

    Parameters
    ----------
    posts : Iterable[RawPost]
        Parsed posts, possibly from several query exports

    rules : CleaningRules | None = None
        The rules, None meaning normalization only

    area_name : str = ""
        Name recorded on the corpus

    queries : Iterable[str] = ()
        Query hashtags to strip on top of the `query` field of each post

    Returns
    -------
    Corpus
        The cleaned posts with a summary of what was dropped and rewritten
    """
    rules = rules if rules is not None else CleaningRules()
    posts = list(posts)

    query_tags: set[str] = set()
    if rules.drop_query_hashtags:
        for raw_query in [*queries, *(post.query for post in posts)]:
            query = normalize_hashtag(raw_query)
            if query is not EMPTY:
                query_tags.add(str(query))
                query_tags.add(rules.resolve(str(query)))

    seen_ids: set[str] = set()
    duplicates = by_user = by_hashtag = empty = query_removed = 0
    synonym_hits: Counter[str] = Counter()
    translation_hits: Counter[str] = Counter()
    exclusion_hits: Counter[str] = Counter()
    user_hits: Counter[str] = Counter()
    retained = []
    for post in posts:
        if post.post_id in seen_ids:
            duplicates += 1
            continue
        seen_ids.add(post.post_id)

        if post.user_id in rules.exclude_users:
            by_user += 1
            user_hits[post.user_id] += 1
            continue

        tags: set[str] = set()
        excluded: str | None = None
        for raw in post.hashtags:
            tag = normalize_hashtag(raw)
            if tag is EMPTY:
                empty += 1
                continue

            tag = str(tag)
            resolved = rules.resolve(tag)
            for hit in (tag, resolved):
                if hit in rules.exclude_hashtags:
                    excluded = hit
                    break

            if excluded is not None:
                break

            if tag in rules.synonym_map:
                synonym_hits[tag] += 1
            elif tag in rules.translation_map:
                translation_hits[tag] += 1

            tags.add(resolved)

        if excluded is not None:
            by_hashtag += 1
            exclusion_hits[excluded] += 1
            continue

        if query_tags:
            before = len(tags)
            tags -= query_tags
            query_removed += before - len(tags)

        retained.append(
            CleanedPost(
                post_id=post.post_id,
                user_id=post.user_id,
                query=post.query,
                hashtags=frozenset(tags),
            )
        )

    summary = CleaningSummary(
        input_posts=len(posts),
        duplicate_posts=duplicates,
        dropped_by_user=by_user,
        dropped_by_hashtag=by_hashtag,
        retained_posts=len(retained),
        rule_hits={
            "exclude_hashtags": dict(sorted(exclusion_hits.items())),
            "exclude_users": dict(sorted(user_hits.items())),
            "synonyms": dict(sorted(synonym_hits.items())),
            "translations": dict(sorted(translation_hits.items())),
        },
        empty_tags=empty,
        query_tags_removed=query_removed,
    )
    logger.info(
        f"[{area_name}] cleaned {summary.input_posts} posts: kept"
        f" {summary.retained_posts}, dropped {summary.dropped_posts}"
    )
    return Corpus(
        area_name=area_name,
        posts=tuple(retained),
        rules_applied=rules.digest(),
        summary=summary,
    )


def hashtag_frequencies(c: Corpus) -> dict[str, int]:
    """Number of posts carrying each hashtag, ordered by hashtag"""
    counts: Counter[str] = Counter()
    for post in c.posts:
        counts.update(post.hashtags)

    return dict(sorted(counts.items()))


def _parse_record(record: Any, line: int) -> RawPost:
    if not isinstance(record, dict):
        raise MalformedRecordError(line, "record is not a JSON object")

    for name in REQUIRED_FIELDS:
        if name not in record or record[name] is None:
            raise MissingFieldError(name, line)

    hashtags = record["hashtags"]
    if not isinstance(hashtags, list) or not all(isinstance(t, str) for t in hashtags):
        raise MalformedRecordError(line, "`hashtags` must be an array of strings")

    post_id = str(record["post_id"])
    if not post_id:
        raise MalformedRecordError(line, "`post_id` must be non-empty")

    timestamp = None
    if record.get("timestamp") is not None:
        timestamp = _parse_timestamp(record["timestamp"], line)

    return RawPost(
        post_id=post_id,
        user_id=str(record["user_id"]),
        hashtags=tuple(hashtags),
        query=str(record["query"]),
        timestamp=timestamp,
    )


def _parse_timestamp(value: Any, line: int) -> datetime:
    if not isinstance(value, str):
        raise MalformedRecordError(line, "`timestamp` must be an ISO-8601 string")

    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError as e:
        raise MalformedRecordError(line, f"bad `timestamp` {value!r}") from e

    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)

    return stamp.astimezone(timezone.utc)
