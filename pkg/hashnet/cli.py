"""Command line interface, ``python -m hashnet <command>``.

Exit codes are 0 on success, 1 for invalid inputs or configuration and 2 when an
analysis fails on valid inputs, e.g. when power iteration does not converge or an
area runs out of its budget.
"""
from __future__ import annotations

from typing import Any, Callable, Sequence

import argparse
import json
import logging
import sys
from pathlib import Path

from hashnet.config import FORMATS, AreaConfig, RunConfig
from hashnet.cooccur import build_network
from hashnet.exceptions import ConfigError, HashnetException, InputError
from hashnet.export import (
    EXTENSIONS,
    export_graph,
    layout,
    write_json,
    write_partition_table,
)
from hashnet.ingest import write_posts
from hashnet.pipeline import (
    area_directory,
    clean_area,
    run_all,
    run_area,
    run_merged,
)
from hashnet.synth import (
    SyntheticPlan,
    Theme,
    generate_synthetic,
    write_study_areas,
    write_synthetic,
)

logger = logging.getLogger("hashnet")


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"Expected a boolean, got {value!r}")


def _parse_seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"Seed {seed} is not an unsigned 64 bit int")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Run configuration (JSON)")
    common.add_argument("--out", type=Path, help="Output directory")
    common.add_argument("--seed", type=_parse_seed, help="Unsigned 64 bit seed")
    common.add_argument("--k-top", type=int, help="Hashtags per area network")
    common.add_argument("--pair-budget", type=int, help="Pairs in the merged network")
    common.add_argument(
        "--weighted-betweenness",
        type=_parse_bool,
        help="Use 1/weight as edge length for betweenness (true/false)",
    )
    common.add_argument("--workers", type=int, help="Areas analysed concurrently")
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    parser = argparse.ArgumentParser(
        prog="hashnet",
        description="Hashtag co-occurrence networks of protected area posts",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, summary: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=summary, parents=[common])
        if name not in ("synth", "merge", "run"):
            sub.add_argument(
                "--area",
                action="append",
                help="Only this area, may be repeated (default: all areas)",
            )
        return sub

    command("clean", "Clean the posts of each area")
    command("build", "Build the co-occurrence network of each area")
    command("analyze", "Full per area analysis with tables and exports")
    command("merge", "Analyse the network merged over all areas")
    command("classify", "Label the communities of each area with CES classes")
    export = command("export", "Write graph exports of each area")
    export.add_argument(
        "--format",
        action="append",
        choices=FORMATS,
        help="Export format, may be repeated (default: from the config)",
    )
    command("run", "Analyse every area and the merged network, with a manifest")

    synth = command("synth", "Generate synthetic corpora")
    source = synth.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--study-areas",
        action="store_true",
        help="One corpus per study area plus a config.json to run them",
    )
    source.add_argument("--plan", type=Path, help="A synthetic plan (JSON)")
    synth.add_argument("--posts-cap", type=int, default=10_000)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        raise ConfigError(f"`{args.command}` needs --config")

    config = RunConfig.from_file(args.config)
    return config.override(
        output=args.out,
        seed=args.seed,
        k_top=args.k_top,
        pair_budget=args.pair_budget,
        weighted_betweenness=args.weighted_betweenness,
        workers=args.workers,
    )


def selected_areas(config: RunConfig, args: argparse.Namespace) -> list[AreaConfig]:
    if not getattr(args, "area", None):
        return list(config.areas)
    return [config.area(name) for name in args.area]


def cmd_clean(args: argparse.Namespace) -> None:
    config = load_config(args)
    for area in selected_areas(config, args):
        corpus = clean_area(area)
        directory = area_directory(config, area.name)
        directory.mkdir(parents=True, exist_ok=True)
        write_posts(corpus.as_raw(), directory / "cleaned.jsonl")
        if corpus.summary is not None:
            write_json(corpus.summary.to_dict(), directory / "cleaning_summary.json")


def cmd_build(args: argparse.Namespace) -> None:
    config = load_config(args)
    for area in selected_areas(config, args):
        network = build_network(clean_area(area), config.k_top)
        g = network.graph
        write_json(
            {
                "area": area.name,
                "k_used": network.k_used,
                "coverage": network.coverage,
                "vertices": [
                    {"id": v, "label": x.label, "frequency": x.frequency}
                    for v, x in enumerate(g.vertices)
                ],
                "edges": [{"u": u, "v": v, "weight": w} for u, v, w in g.edges()],
            },
            area_directory(config, area.name) / "cooccurrence.json",
        )


def cmd_analyze(args: argparse.Namespace) -> None:
    config = load_config(args)
    for area in selected_areas(config, args):
        run_area(config, area, n_jobs=config.workers)


def cmd_merge(args: argparse.Namespace) -> None:
    config = load_config(args)
    report = run_merged(config, n_jobs=config.workers)
    top = report.analysis.centrality.top("eigenvector", config.top_n)
    for v, score in top:
        print(f"{report.graph.label(v)}\t{score:.6f}\t{report.network.area_of[v]}")


def cmd_classify(args: argparse.Namespace) -> None:
    config = load_config(args)
    for area in selected_areas(config, args):
        report = run_area(config, area, write=False, n_jobs=config.workers)
        analysis = report.analysis
        write_partition_table(
            report.graph,
            analysis.partition,
            analysis.classes(),
            area_directory(config, area.name) / "partition.csv",
        )
        members = analysis.partition.communities()
        for label in analysis.labels:
            tags = ", ".join(report.graph.label(v) for v in members[label.community])
            classes = "; ".join(label.classes) or "-"
            print(f"{area.name}\t{label.community}\t{classes}\t{tags}")


def cmd_export(args: argparse.Namespace) -> None:
    config = load_config(args)
    formats = args.format or list(config.formats)
    for area in selected_areas(config, args):
        report = run_area(config, area, write=False, n_jobs=config.workers)
        positions = layout(report.graph, config.seed) if config.layout else None
        directory = area_directory(config, area.name)
        for fmt in formats:
            export_graph(
                report.graph,
                report.analysis.centrality,
                report.analysis.partition,
                fmt,
                directory / f"network{EXTENSIONS[fmt]}",
                positions=positions,
            )


def cmd_run(args: argparse.Namespace) -> None:
    run_all(load_config(args))


def cmd_synth(args: argparse.Namespace) -> None:
    out = args.out if args.out is not None else Path("synthetic")
    if args.study_areas:
        seed = args.seed if args.seed is not None else 0
        path = write_study_areas(out, seed=seed, posts_cap=args.posts_cap)
        print(path)
        return

    plan = load_plan(args.plan, args.seed)
    for path in write_synthetic(generate_synthetic(plan), out):
        print(path)


def load_plan(path: Path, seed: int | None = None) -> SyntheticPlan:
    """Read a `SyntheticPlan` from JSON, `seed` overriding the file's"""
    try:
        data: dict[str, Any] = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Plan {path} does not exist") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Plan {path} is not valid JSON: {e}") from e

    try:
        themes = tuple(
            Theme(
                name=t["name"],
                terms=tuple(t["terms"]),
                ces_class=t.get("ces_class"),
            )
            for t in data.pop("themes", [])
        )
        for name in ("queries", "global_terms"):
            if name in data:
                data[name] = tuple(data[name])
        if seed is not None:
            data["seed"] = seed
        return SyntheticPlan(themes=themes, **data)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"Plan {path} is malformed: {e}") from e


COMMANDS: dict[str, Callable[[argparse.Namespace], None]] = {
    "clean": cmd_clean,
    "build": cmd_build,
    "analyze": cmd_analyze,
    "merge": cmd_merge,
    "classify": cmd_classify,
    "export": cmd_export,
    "run": cmd_run,
    "synth": cmd_synth,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except HashnetException as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(str(e))
        return InputError.exit_code

    return 0
