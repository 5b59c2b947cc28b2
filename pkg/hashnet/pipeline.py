"""End to end analyses of study areas and of their merged network.

Each area goes through ingest, clean, build, centrality, community, classify and
export. An error in any of these is re-raised as a `StageError` naming the stage
and the area. Output of an area lands in its own directory under the configured
output::

    out/
        run.json             inputs, digests and parameters of the run
        timings.json         wall time and peak memory, the only non reproducible file
        Skomer/
            cleaning_summary.json
            centrality.csv   label, frequency, eigenvector, betweenness
            edges.csv        u, v, weight, edge_betweenness
            partition.csv    label, community, ces_classes
            dendrogram.csv   merge steps with Q after each
            report.json
            network.graphml, network.dot, network.json
        merged/
            ...              the same, with an area column
"""
from __future__ import annotations

from typing import Any, Iterator, Sequence

import hashlib
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

from hashnet.budget import Budget
from hashnet.centrality import CentralityReport, centrality_report
from hashnet.ces import CommunityLabel, classify
from hashnet.community import Dendrogram, Partition, communities
from hashnet.config import AreaConfig, RunConfig
from hashnet.cooccur import AreaNetwork, MergedNetwork, build_network, merge_networks
from hashnet.exceptions import BudgetException, ConfigError, StageError
from hashnet.export import (
    EXTENSIONS,
    export_graph,
    layout,
    write_centrality_table,
    write_dendrogram,
    write_edge_table,
    write_json,
    write_partition_table,
)
from hashnet.graph import WeightedGraph
from hashnet.ingest import Corpus, clean, read_posts
from hashnet.support import describe
from hashnet.util import Monitor

logger = logging.getLogger(__name__)

MERGED = "merged"

# Communities smaller than this are reported but flagged
SMALL_COMMUNITY = 3


@dataclass(frozen=True)
class Timing:
    wall_seconds: float
    peak_rss_mb: float

    def to_dict(self) -> dict[str, float]:
        return {"wall_seconds": self.wall_seconds, "peak_rss_mb": self.peak_rss_mb}


@dataclass(frozen=True)
class Analysis:
    """Centralities, merge history and best partition of one graph"""

    centrality: CentralityReport
    dendrogram: Dendrogram
    partition: Partition
    labels: list[CommunityLabel]

    def classes(self) -> dict[int, list[str]]:
        return {label.community: label.classes for label in self.labels}

    def small_communities(self) -> list[int]:
        return [
            label.community for label in self.labels if label.size < SMALL_COMMUNITY
        ]


@dataclass(frozen=True)
class AreaReport:
    area_name: str
    corpus: Corpus
    network: AreaNetwork
    analysis: Analysis
    top_n: int = 10
    timing: Timing | None = field(default=None, compare=False)

    @property
    def graph(self) -> WeightedGraph:
        return self.network.graph

    def to_dict(self) -> dict[str, Any]:
        g = self.graph
        summary = self.corpus.summary
        return {
            "area": self.area_name,
            "rules_digest": self.corpus.rules_applied,
            "cleaning": None if summary is None else summary.to_dict(),
            "network": {
                "vertices": len(g),
                "edges": g.edge_count,
                "total_weight": g.total_weight,
                "k_used": self.network.k_used,
                "coverage": self.network.coverage,
            },
            **_analysis_dict(g, self.analysis, self.top_n),
        }


@dataclass(frozen=True)
class MergedReport:
    network: MergedNetwork
    analysis: Analysis
    top_n: int = 10
    timing: Timing | None = field(default=None, compare=False)

    @property
    def graph(self) -> WeightedGraph:
        return self.network.graph

    def to_dict(self) -> dict[str, Any]:
        g = self.graph
        attributed: dict[str, int] = {}
        for area in self.network.area_of:
            attributed[area] = attributed.get(area, 0) + 1

        return {
            "area": MERGED,
            "network": {
                "vertices": len(g),
                "edges": g.edge_count,
                "total_weight": g.total_weight,
                "pair_budget": self.network.pair_budget,
                "distinct_pairs": self.network.distinct_pairs,
                "weight_coverage": self.network.weight_coverage,
            },
            "vertices_per_area": dict(sorted(attributed.items())),
            **_analysis_dict(g, self.analysis, self.top_n),
        }


@dataclass(frozen=True)
class RunResult:
    areas: list[AreaReport]
    merged: MergedReport | None


@contextmanager
def stage(name: str, area: str) -> Iterator[None]:
    """Re-raise anything but a `StageError` as one naming `name` and `area`"""
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, area, e) from e


def area_directory(config: RunConfig, name: str) -> Path:
    safe = re.sub(r"[^0-9A-Za-z._-]+", "_", name).strip("_.") or "area"
    return config.output / safe


def clean_area(area: AreaConfig) -> Corpus:
    """Read every input of `area` and apply its cleaning rules"""
    with stage("ingest", area.name):
        posts = read_posts(area.inputs)

    with stage("clean", area.name):
        rules = area.load_rules()
        return clean(posts, rules, area_name=area.name, queries=area.query)


def analyze(
    g: WeightedGraph,
    config: RunConfig,
    area_name: str,
    n_jobs: int = 1,
) -> Analysis:
    """Centralities, communities and CES labels of `g`"""
    with stage("centrality", area_name):
        scores = centrality_report(
            g,
            use_weights=config.weighted_betweenness,
            tolerance=config.eigen_tolerance,
            max_iterations=config.eigen_max_iterations,
            n_jobs=n_jobs,
        )

    with stage("community", area_name):
        dendrogram, partition = communities(g)

    with stage("classify", area_name):
        labels = classify(partition, g, config.load_lexicon())

    analysis = Analysis(scores, dendrogram, partition, labels)
    for c in analysis.small_communities():
        members = [g.label(v) for v in partition.communities()[c]]
        logger.warning(
            f"[{area_name}] community {c} has only {len(members)} hashtag(s)"
            f" {members}, interpret with care"
        )

    return analysis


def run_area(
    config: RunConfig,
    area: AreaConfig,
    corpus: Corpus | None = None,
    *,
    write: bool = True,
    n_jobs: int = 1,
) -> AreaReport:
    """Full analysis of one area

    Parameters
    ----------
    config : RunConfig
        Parameters of the run

    area : AreaConfig
        The area to analyse

    corpus : Corpus | None = None
        The already cleaned corpus of `area`, read from its inputs when None

    write : bool = True
        Write tables and exports to the area directory

    n_jobs : int = 1
        Processes used for betweenness

    Returns
    -------
    AreaReport
        Everything computed for the area
    """
    start = time.perf_counter()
    if corpus is None:
        corpus = clean_area(area)

    with stage("build", area.name):
        network = build_network(corpus, config.k_top)

    analysis = analyze(network.graph, config, area.name, n_jobs=n_jobs)
    report = AreaReport(
        area_name=area.name,
        corpus=corpus,
        network=network,
        analysis=analysis,
        top_n=config.top_n,
    )
    if write:
        with stage("export", area.name):
            write_area(report, config)

    timing = Timing(
        wall_seconds=time.perf_counter() - start,
        peak_rss_mb=Monitor().peak_memory("MB"),
    )
    logger.info(
        f"[{area.name}] {len(network.graph)} hashtags in"
        f" {analysis.partition.community_count} communities,"
        f" Q={analysis.partition.q:.4f} ({timing.wall_seconds:.1f}s)"
    )
    return replace(report, timing=timing)


def run_merged(
    config: RunConfig,
    corpora: Sequence[Corpus] | None = None,
    *,
    write: bool = True,
    n_jobs: int = 1,
) -> MergedReport:
    """Analysis of the network merged over all configured areas"""
    if len(config.areas) < 2:
        raise ConfigError(
            f"A merged network needs at least 2 areas, {len(config.areas)} configured"
        )

    start = time.perf_counter()
    if corpora is None:
        corpora = [clean_area(area) for area in config.areas]

    with stage("merge", MERGED):
        network = merge_networks(
            corpora,
            config.pair_budget,
            from_area_networks=config.merge_from_area_networks,
            k=config.k_top,
        )

    analysis = analyze(network.graph, config, MERGED, n_jobs=n_jobs)
    report = MergedReport(network=network, analysis=analysis, top_n=config.top_n)
    if write:
        with stage("export", MERGED):
            write_merged(report, config)

    timing = Timing(
        wall_seconds=time.perf_counter() - start,
        peak_rss_mb=Monitor().peak_memory("MB"),
    )
    return replace(report, timing=timing)


def run_all(config: RunConfig) -> RunResult:
    """Clean every area, analyse them, then the merged network, and write a manifest

    Areas run one after the other in this process unless `config.workers` > 1 or a
    budget is set, in which case each area runs in its own budgeted subprocess,
    `workers` at a time. Reports are collected in configuration order.
    """
    start = time.perf_counter()
    corpora = [clean_area(area) for area in config.areas]

    if config.workers == 1 and not config.budgeted:
        reports = [
            run_area(config, area, corpus)
            for area, corpus in zip(config.areas, corpora)
        ]
    else:
        logger.debug(describe())
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_budgeted_area, config, area, corpus)
                for area, corpus in zip(config.areas, corpora)
            ]
            reports = [future.result() for future in futures]

    merged = None
    if len(config.areas) >= 2:
        merged = run_merged(config, corpora, n_jobs=config.workers)

    with stage("export", "run"):
        write_manifest(config, corpora)
        write_timings(config, reports, merged, time.perf_counter() - start)

    return RunResult(areas=reports, merged=merged)


def write_area(report: AreaReport, config: RunConfig) -> Path:
    directory = area_directory(config, report.area_name)
    if report.corpus.summary is not None:
        write_json(report.corpus.summary.to_dict(), directory / "cleaning_summary.json")

    _write_analysis(report.graph, report.analysis, config, directory)
    write_json(report.to_dict(), directory / "report.json")
    return directory


def write_merged(report: MergedReport, config: RunConfig) -> Path:
    directory = config.output / MERGED
    _write_analysis(
        report.graph, report.analysis, config, directory, report.network.area_of
    )
    write_json(report.to_dict(), directory / "report.json")
    return directory


def write_manifest(config: RunConfig, corpora: Sequence[Corpus]) -> Path:
    """Record inputs by content digest so that the file is location independent"""
    areas = []
    for area, corpus in zip(config.areas, corpora):
        areas.append(
            {
                "name": area.name,
                "directory": area_directory(config, area.name).name,
                "inputs": [
                    {"file": path.name, "sha256": _file_digest(path)}
                    for path in area.inputs
                ],
                "rules_digest": corpus.rules_applied,
                "retained_posts": len(corpus),
            }
        )

    manifest = {
        "config_digest": config.digest(),
        "parameters": config.parameters(),
        "lexicon": config.load_lexicon().to_dict(),
        "areas": areas,
        "merged": MERGED if len(config.areas) >= 2 else None,
    }
    return write_json(manifest, config.output / "run.json")


def write_timings(
    config: RunConfig,
    reports: Sequence[AreaReport],
    merged: MergedReport | None,
    total: float,
) -> Path:
    timings: dict[str, Any] = {
        "areas": {
            r.area_name: None if r.timing is None else r.timing.to_dict()
            for r in reports
        },
        "merged": None,
        "total_wall_seconds": total,
    }
    if merged is not None and merged.timing is not None:
        timings["merged"] = merged.timing.to_dict()

    return write_json(timings, config.output / "timings.json")


def _budgeted_area(
    config: RunConfig, area: AreaConfig, corpus: Corpus
) -> AreaReport:
    budget = Budget(
        run_area,
        name=f"hashnet-{area.name}",
        memory=config.memory,
        cpu_time=config.cpu_time,
        wall_time=config.wall_time,
    )
    try:
        return budget(config, area, corpus)
    except BudgetException as e:
        raise StageError("analyze", area.name, e) from e


def _write_analysis(
    g: WeightedGraph,
    analysis: Analysis,
    config: RunConfig,
    directory: Path,
    area_of: Sequence[str] | None = None,
) -> None:
    scores = analysis.centrality
    write_centrality_table(g, scores, directory / "centrality.csv", area_of=area_of)
    write_edge_table(g, scores, directory / "edges.csv")
    write_partition_table(
        g,
        analysis.partition,
        analysis.classes(),
        directory / "partition.csv",
        area_of=area_of,
    )
    write_dendrogram(analysis.dendrogram, directory / "dendrogram.csv")

    positions = layout(g, config.seed) if config.layout else None
    for fmt in config.formats:
        # The edge table already is the edge-csv export
        if fmt == "edge-csv":
            continue

        export_graph(
            g,
            scores,
            analysis.partition,
            fmt,
            directory / f"network{EXTENSIONS[fmt]}",
            area_of=area_of,
            positions=positions,
        )


def _analysis_dict(
    g: WeightedGraph, analysis: Analysis, top_n: int
) -> dict[str, Any]:
    scores = analysis.centrality
    frequencies = sorted(
        ((v.label, v.frequency) for v in g.vertices), key=lambda x: (-x[1], x[0])
    )
    edge_top = sorted(
        scores.edge_betweenness.items(), key=lambda item: (-item[1], item[0])
    )[:top_n]
    small = set(analysis.small_communities())
    members = analysis.partition.communities()
    return {
        "top": {
            "frequency": [[label, n] for label, n in frequencies[:top_n]],
            "eigenvector": [
                [g.label(v), x] for v, x in scores.top("eigenvector", top_n)
            ],
            "betweenness": [
                [g.label(v), x] for v, x in scores.top("betweenness", top_n)
            ],
            "edge_betweenness": [
                [g.label(u), g.label(v), x] for (u, v), x in edge_top
            ],
        },
        "communities": {
            "q": analysis.partition.q,
            "count": analysis.partition.community_count,
            "merges": len(analysis.dendrogram.merges),
            "best_step": analysis.dendrogram.best_step(),
            "items": [
                {
                    "id": label.community,
                    "size": label.size,
                    "members": [g.label(v) for v in members[label.community]],
                    "ces_classes": [[name, hits] for name, hits in label.matches],
                    "small": label.community in small,
                }
                for label in analysis.labels
            ],
        },
    }


def _file_digest(path: Path) -> str:
    sha = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            sha.update(block)
    return sha.hexdigest()
