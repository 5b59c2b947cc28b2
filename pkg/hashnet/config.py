"""Run configuration, loaded from a JSON document.

.. code:: json

    {
        "areas": [
            {"name": "Skomer", "inputs": ["skomer.jsonl"], "rules": "rules.json"}
        ],
        "k_top": 150,
        "pair_budget": 1400,
        "output": "out",
        "memory": [1, "GB"]
    }

Relative paths resolve against the directory of the config file. Command line
flags override file values through `RunConfig.override`.
"""
from __future__ import annotations

from typing import Any, Mapping

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from hashnet.centrality import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE
from hashnet.ces import CesLexicon
from hashnet.cooccur import DEFAULT_K_TOP, DEFAULT_PAIR_BUDGET
from hashnet.exceptions import ConfigError
from hashnet.ingest import CleaningRules
from hashnet.util import Amount, as_bytes, as_seconds

FORMATS = ("graphml", "dot", "edge-csv", "report-json")

_MAX_SEED = 2**64


@dataclass(frozen=True)
class AreaConfig:
    name: str
    inputs: tuple[Path, ...]
    rules: Path | None = None
    query: tuple[str, ...] = ()

    def load_rules(self) -> CleaningRules:
        """The cleaning rules of this area, normalization only when unset"""
        if self.rules is None:
            return CleaningRules()

        return CleaningRules.from_file(self.rules)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Path) -> AreaConfig:
        if not isinstance(data, Mapping):
            raise ConfigError(f"Area entries must be objects, got {data!r}")

        unknown = set(data) - {"name", "inputs", "rules", "query"}
        if unknown:
            raise ConfigError(f"Unknown keys {sorted(unknown)} in area entry")

        name = data.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"Area entry {dict(data)} needs a non-empty `name`")

        inputs = data.get("inputs")
        if isinstance(inputs, str):
            inputs = [inputs]

        if not isinstance(inputs, list) or not inputs:
            raise ConfigError(f"Area `{name}` needs a non-empty list of `inputs`")

        query = data.get("query", [])
        if isinstance(query, str):
            query = [query]

        rules = data.get("rules")
        return cls(
            name=name,
            inputs=tuple(_resolve(base, p) for p in inputs),
            rules=None if rules is None else _resolve(base, rules),
            query=tuple(str(q) for q in query),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "inputs": [str(p) for p in self.inputs],
            "rules": None if self.rules is None else str(self.rules),
            "query": list(self.query),
        }


@dataclass(frozen=True)
class RunConfig:
    areas: tuple[AreaConfig, ...]
    output: Path = Path("out")
    k_top: int = DEFAULT_K_TOP
    pair_budget: int = DEFAULT_PAIR_BUDGET
    weighted_betweenness: bool = True
    eigen_tolerance: float = DEFAULT_TOLERANCE
    eigen_max_iterations: int = DEFAULT_MAX_ITERATIONS
    lexicon: Path | None = None
    min_overlap: int | None = None
    seed: int = 0
    workers: int = 1
    merge_from_area_networks: bool = False
    layout: bool = False
    formats: tuple[str, ...] = FORMATS
    top_n: int = 10
    wall_time: Amount | None = None
    cpu_time: Amount | None = None
    memory: Amount | None = None
    source: Path | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.areas:
            raise ConfigError("A run needs at least one area")

        names = [area.name for area in self.areas]
        duplicated = sorted({n for n in names if names.count(n) > 1})
        if duplicated:
            raise ConfigError(f"Area names must be unique, repeated: {duplicated}")

        if not self.k_top >= 2:
            raise ConfigError(f"`k_top` {self.k_top} must be >= 2")

        if not self.pair_budget >= 1:
            raise ConfigError(f"`pair_budget` {self.pair_budget} must be >= 1")

        if not self.eigen_tolerance > 0:
            raise ConfigError(f"`eigen_tolerance` {self.eigen_tolerance} must be > 0")

        if not self.eigen_max_iterations >= 1:
            raise ConfigError(
                f"`eigen_max_iterations` {self.eigen_max_iterations} must be >= 1"
            )

        if self.min_overlap is not None and not self.min_overlap >= 1:
            raise ConfigError(f"`min_overlap` {self.min_overlap} must be >= 1")

        if not 0 <= self.seed < _MAX_SEED:
            raise ConfigError(f"`seed` {self.seed} must be an unsigned 64 bit integer")

        if not self.workers >= 1:
            raise ConfigError(f"`workers` {self.workers} must be >= 1")

        if not self.top_n >= 1:
            raise ConfigError(f"`top_n` {self.top_n} must be >= 1")

        unknown = [f for f in self.formats if f not in FORMATS]
        if unknown:
            raise ConfigError(f"`formats` {unknown} must each be in {list(FORMATS)}")

        for name, convert in (
            ("wall_time", as_seconds),
            ("cpu_time", as_seconds),
            ("memory", as_bytes),
        ):
            try:
                amount = convert(getattr(self, name))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"`{name}` {getattr(self, name)!r} is invalid: {e}")

            if amount is not None and not amount >= 1:
                raise ConfigError(f"`{name}` {getattr(self, name)} must be positive")

    @property
    def budgeted(self) -> bool:
        return any(x is not None for x in (self.wall_time, self.cpu_time, self.memory))

    def area(self, name: str) -> AreaConfig:
        for area in self.areas:
            if area.name == name:
                return area

        raise ConfigError(
            f"No area `{name}` configured, choose from {[a.name for a in self.areas]}"
        )

    def load_lexicon(self) -> CesLexicon:
        """The configured lexicon, the bundled starter one when unset"""
        lexicon = (
            CesLexicon.starter()
            if self.lexicon is None
            else CesLexicon.from_file(self.lexicon)
        )
        if self.min_overlap is not None:
            lexicon = CesLexicon(classes=lexicon.classes, min_overlap=self.min_overlap)

        return lexicon

    def override(self, **changes: Any) -> RunConfig:
        """Copy with `changes` applied, None values leave a field untouched"""
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigError(f"Unknown config fields {sorted(unknown)}")

        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def parameters(self) -> dict[str, Any]:
        """The analysis parameters, everything but areas and file locations"""
        skip = {"areas", "output", "lexicon", "source"}
        params = {k: v for k, v in asdict(self).items() if k not in skip}
        params["formats"] = list(self.formats)
        return json.loads(json.dumps(params))

    def digest(self) -> str:
        """sha256 of `parameters`, stable across machines and directories"""
        payload = json.dumps(self.parameters(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Path | None = None) -> RunConfig:
        base = Path(".") if base is None else base
        known = {f.name for f in fields(cls)} - {"source"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(
                f"Unknown keys {sorted(unknown)} in config, each must be in"
                f" {sorted(known)}"
            )

        areas = data.get("areas")
        if not isinstance(areas, list):
            raise ConfigError("Config needs an `areas` list")

        values: dict[str, Any] = dict(data)
        values["areas"] = tuple(AreaConfig.from_dict(a, base) for a in areas)
        if "output" in values:
            values["output"] = _resolve(base, values["output"])
        else:
            values["output"] = base / "out"

        if values.get("lexicon") is not None:
            values["lexicon"] = _resolve(base, values["lexicon"])

        if "formats" in values:
            values["formats"] = tuple(values["formats"])

        for name in ("wall_time", "cpu_time", "memory"):
            if isinstance(values.get(name), list):
                values[name] = tuple(values[name])

        for name, kind in (
            ("k_top", int),
            ("pair_budget", int),
            ("eigen_max_iterations", int),
            ("seed", int),
            ("workers", int),
            ("top_n", int),
            ("weighted_betweenness", bool),
            ("merge_from_area_networks", bool),
            ("layout", bool),
        ):
            if name in values and type(values[name]) is not kind:
                raise ConfigError(
                    f"`{name}` must be {kind.__name__}, got {values[name]!r}"
                )

        return cls(**values)

    @classmethod
    def from_file(cls, path: Path | str) -> RunConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigError(f"Config file {path} does not exist") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config {path} is not valid JSON: {e}") from e

        if not isinstance(data, dict):
            raise ConfigError(f"Config {path} must be a JSON object")

        config = cls.from_dict(data, base=path.resolve().parent)
        return replace(config, source=path)

    def to_dict(self) -> dict[str, Any]:
        data = self.parameters()
        data["areas"] = [area.to_dict() for area in self.areas]
        data["output"] = str(self.output)
        data["lexicon"] = None if self.lexicon is None else str(self.lexicon)
        return data


def _resolve(base: Path, path: Any) -> Path:
    if not isinstance(path, str):
        raise ConfigError(f"Paths must be strings, got {path!r}")

    p = Path(path)
    return p if p.is_absolute() else base / p
