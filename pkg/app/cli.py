"""Command-line entry point: ``impact <command> [options]``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

import uvicorn

from app.app_logging import configure_logging
from app.config import PipelineConfig, load_config
from app.errors import ConfigError, ImpactError
from app.main import create_app
from app.services import pipeline_service
from app.services.store_service import load_store_dir
from app.services.synthetic_service import preferential_attachment, split_sources, write_source

logger = logging.getLogger(__name__)

# flag -> (MeasureParams field, type)
MEASURE_FLAGS: dict[str, tuple[str, type]] = {
    "--pr-alpha": ("pr_alpha", float),
    "--pr-epsilon": ("pr_epsilon", float),
    "--ram-gamma": ("ram_gamma", float),
    "--att-alpha": ("att_alpha", float),
    "--att-beta": ("att_beta", float),
    "--att-gamma": ("att_gamma", float),
    "--att-rho": ("att_rho", float),
    "--att-window": ("att_window", int),
    "--icc-window": ("incubation_window", int),
    "--current-year": ("current_year", int),
    "--max-iterations": ("max_iterations", int),
}

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def parse_source_flag(value: str) -> tuple[str, dict[str, str]]:
    """``name=metadata_path,edges_path``."""
    name, sep, paths = value.partition("=")
    metadata, comma, edges = paths.partition(",")
    if not sep or not comma or not name.strip() or not metadata.strip() or not edges.strip():
        raise ConfigError(f"--sources expects name=metadata_path,edges_path, got {value!r}")
    return name.strip(), {"metadata": metadata.strip(), "edges": edges.strip()}


def parse_listen_flag(value: str) -> dict[str, Any]:
    """``host:port``."""
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"--listen expects host:port, got {value!r}")
    return {"host": host, "port": int(port)}


def collect_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Settings given on the command line, as keyword overrides."""
    overrides: dict[str, Any] = {}
    if args.sources:
        overrides["sources"] = dict(parse_source_flag(value) for value in args.sources)
    measures = {
        field: getattr(args, field) for field, _ in MEASURE_FLAGS.values() if getattr(args, field) is not None
    }
    if measures:
        overrides["measures"] = measures
    for name in ("out_dir", "graph_id", "workers", "k", "top_percent", "correlation_out", "log_level"):
        if getattr(args, name) is not None:
            overrides[name] = getattr(args, name)
    if args.no_compress:
        overrides["compress"] = False
    serve: dict[str, Any] = {}
    if args.listen:
        serve.update(parse_listen_flag(args.listen))
    if args.dumps is not None:
        serve["dumps"] = args.dumps
    if args.batch_cap is not None:
        serve["batch_cap"] = args.batch_cap
    if serve:
        overrides["serve"] = serve
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file")
    common.add_argument(
        "--sources", action="append", metavar="NAME=META,EDGES", help="Source files; repeat per source"
    )
    common.add_argument("--out-dir", dest="out_dir", type=Path, help="Root directory of stage outputs")
    common.add_argument("--graph-id", dest="graph_id", help="Graph label used in dump names")
    common.add_argument("--workers", type=int, help="Worker threads (default: available cores)")
    common.add_argument("--k", type=int, help="Top-k size for correlations")
    common.add_argument("--top-percent", dest="top_percent", type=float, help="Top-k as a share of nodes (default 1)")
    common.add_argument(
        "--correlation-out", dest="correlation_out", type=Path, help="Directory for the correlation CSV and JSON"
    )
    common.add_argument("--no-compress", dest="no_compress", action="store_true", help="Write plain .tsv dumps")
    common.add_argument("--listen", metavar="HOST:PORT", help="Service listen address")
    common.add_argument("--dumps", type=Path, help="Directory with the dumps to serve")
    common.add_argument("--batch-cap", dest="batch_cap", type=int, help="Maximum DOIs per batch request")
    common.add_argument("--report", type=Path, help="Extra path for the ingest report JSON")
    common.add_argument("--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS)
    for flag, (field, kind) in MEASURE_FLAGS.items():
        common.add_argument(flag, dest=field, type=kind)

    parser = argparse.ArgumentParser(prog="impact", description="Citation impact scores")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("ingest", parents=[common], help="Merge sources into a unified corpus")
    subparsers.add_parser("compute", parents=[common], help="Build the graph and compute the measures")
    subparsers.add_parser("export", parents=[common], help="Write the score dumps")
    subparsers.add_parser("correlate", parents=[common], help="Top-k correlations between measures")
    subparsers.add_parser("pipeline", parents=[common], help="Run every stage")
    subparsers.add_parser("serve", parents=[common], help="Serve the dumps over HTTP")

    synth = subparsers.add_parser("synth", help="Generate synthetic sources")
    synth.add_argument("--nodes", type=int, default=10_000)
    synth.add_argument("--years", type=int, default=20)
    synth.add_argument("--sources", type=int, default=3, help="Number of overlapping sources")
    synth.add_argument("--overlap", type=float, default=0.3, help="Share of rows repeated in a second source")
    synth.add_argument("--mean-refs", dest="mean_refs", type=float, default=10.0)
    synth.add_argument("--aging", type=float, default=0.2, help="Yearly decay of citation attractiveness")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--last-year", dest="last_year", type=int)
    synth.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    synth.add_argument("--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS, default="INFO")
    return parser


def run_synth(args: argparse.Namespace) -> Path:
    """Write synthetic sources and a config file naming them."""
    records, edges = preferential_attachment(
        args.nodes, args.years, args.mean_refs, args.aging, seed=args.seed, last_year=args.last_year
    )
    names = [f"synth{index}" for index in range(1, args.sources + 1)]
    lines = ["# generated by impact synth", "graph_id = synth"]
    for name, (part_records, part_edges) in zip(names, split_sources(records, edges, names, args.overlap, args.seed)):
        source = write_source(part_records, part_edges, args.out_dir, name)
        lines.append(f"sources.{name}.metadata = {source.metadata_path.name}")
        lines.append(f"sources.{name}.edges = {source.edges_path.name}")
    config_path = args.out_dir / "impact.conf"
    config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(names)} sources and {config_path}")
    return config_path


def serve(config: PipelineConfig) -> None:
    dumps = config.serve.dumps or config.out_dir / pipeline_service.DUMPS_DIR
    store = load_store_dir(dumps)
    uvicorn.run(
        create_app(store, batch_cap=config.serve.batch_cap),
        host=config.serve.host,
        port=config.serve.port,
        log_config=None,
    )


def run_command(command: str, config: PipelineConfig, report: Path | None = None) -> None:
    if command == "ingest":
        pipeline_service.run_ingest(config, report)
    elif command == "compute":
        pipeline_service.run_compute(config)
    elif command == "export":
        pipeline_service.run_export(config)
    elif command == "correlate":
        pipeline_service.run_correlate(config)
    elif command == "pipeline":
        pipeline_service.run_pipeline(config, report)
    elif command == "serve":
        serve(config)


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand; 0 on success, 2 for configuration errors, 1 otherwise."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or "INFO")

    try:
        if args.command == "synth":
            run_synth(args)
            return 0
        config = load_config(args.config, **collect_overrides(args))
        configure_logging(config.log_level)
        if args.command in ("ingest", "pipeline"):
            config.require_sources()
        run_command(args.command, config, args.report)
    except ConfigError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 2
    except (ImpactError, OSError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
