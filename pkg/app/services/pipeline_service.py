"""Stage orchestration: ingest, compute, export, correlate.

Every stage writes its artifacts plus a ``stage_report.json`` under its own
directory of ``out_dir``. A stage run on its own reads its predecessor's
artifacts from disk; ``run_pipeline`` hands results along in memory.
"""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from app.config import PipelineConfig
from app.errors import ImpactError, StoreConsistencyError
from app.models.correlation import CorrelationMatrix
from app.models.graph import CitationGraph, SkipReport
from app.models.ingest import IngestReport, SourceDescriptor
from app.models.scores import Measure, MeasureParams, ScoreVector
from app.services.correlation_service import correlation_matrix, resolve_k
from app.services.export_service import write_dumps
from app.services.graph_service import build_graph
from app.services.ingest_service import merge_sources, parse_source, write_unified
from app.services.measures_service import compute_all

logger = logging.getLogger(__name__)

INGEST_DIR = "ingest"
COMPUTE_DIR = "compute"
DUMPS_DIR = "dumps"
CORRELATE_DIR = "correlate"
STAGE_REPORT = "stage_report.json"
INGEST_REPORT = "ingest_report.json"


@dataclass(frozen=True, eq=False)
class IngestResult:
    records: pd.DataFrame
    edges: pd.DataFrame
    report: IngestReport


@dataclass(frozen=True, eq=False)
class ComputeResult:
    graph: CitationGraph
    skipped: SkipReport
    vectors: dict[Measure, ScoreVector]


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_stage_report(directory: Path) -> dict:
    path = directory / STAGE_REPORT
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise StoreConsistencyError(f"Cannot read {path}; run the previous stage first ({e})") from e


def run_ingest(config: PipelineConfig, report_path: Path | None = None) -> IngestResult:
    """Merge the configured sources and persist the unified corpus."""
    started = time.perf_counter()
    directory = config.out_dir / INGEST_DIR
    records, edges, report = merge_sources(config.require_sources(), workers=config.workers)
    unified = write_unified(records, edges, directory)
    report_json = report.model_dump(mode="json")
    write_json(directory / INGEST_REPORT, report_json)
    if report_path is not None:
        write_json(report_path, report_json)
    write_json(
        directory / STAGE_REPORT,
        {
            "stage": "ingest",
            "sources": [source.name for source in config.source_descriptors()],
            "outputs": [unified.metadata_path.name, unified.edges_path.name, INGEST_REPORT],
            "report": report_json,
        },
    )
    logger.info(f"Ingest finished in {time.perf_counter() - started:.2f}s")
    return IngestResult(records=records, edges=edges, report=report)


def load_ingest(config: PipelineConfig) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Unified records and edges written by a previous ingest run."""
    directory = config.out_dir / INGEST_DIR
    read_stage_report(directory)
    unified = parse_source(
        SourceDescriptor(
            name="unified",
            metadata_path=directory / "records.csv.gz",
            edges_path=directory / "edges.csv.gz",
        )
    )
    return unified.records, unified.edges


def build_stage_graph(config: PipelineConfig, ingest: IngestResult | None = None) -> tuple[CitationGraph, SkipReport]:
    if ingest is None:
        records, edges = load_ingest(config)
    else:
        # same rows as the persisted records.csv.gz
        records, edges = ingest.records[ingest.records["in_metadata"]], ingest.edges
    return build_graph(records, edges)


def run_compute(config: PipelineConfig, ingest: IngestResult | None = None) -> ComputeResult:
    """Build the graph and compute the five measures."""
    started = time.perf_counter()
    graph, skipped = build_stage_graph(config, ingest)
    vectors = compute_all(graph, config.measures, workers=config.workers)

    directory = config.out_dir / COMPUTE_DIR
    directory.mkdir(parents=True, exist_ok=True)
    for measure, vector in vectors.items():
        np.save(directory / f"{measure.value}.npy", vector.scores, allow_pickle=False)
    write_json(
        directory / STAGE_REPORT,
        {
            "stage": "compute",
            "graph": {"nodes": graph.n, "edges": graph.edge_count, "fingerprint": graph.fingerprint()},
            "skipped": skipped.model_dump(),
            "params": config.measures.model_dump(mode="json"),
            "measures": [vector.summary() for vector in vectors.values()],
        },
    )
    unconverged = [vector.measure.value for vector in vectors.values() if not vector.converged]
    if unconverged:
        logger.warning(f"Not converged within max_iterations: {', '.join(unconverged)}")
    logger.info(f"Compute finished in {time.perf_counter() - started:.2f}s")
    return ComputeResult(graph=graph, skipped=skipped, vectors=vectors)


def load_compute(config: PipelineConfig, graph: CitationGraph | None = None) -> dict[Measure, ScoreVector]:
    """Score vectors written by a previous compute run.

    Raises:
        StoreConsistencyError: when ``graph`` is not the graph they were computed on.
    """
    directory = config.out_dir / COMPUTE_DIR
    report = read_stage_report(directory)
    if graph is not None and report["graph"]["fingerprint"] != graph.fingerprint():
        raise StoreConsistencyError("Computed scores belong to a different graph; rerun compute")
    params = MeasureParams(**report["params"])
    vectors = {}
    for summary in report["measures"]:
        measure = Measure(summary["measure"])
        try:
            scores = np.load(directory / f"{measure.value}.npy", allow_pickle=False)
        except (OSError, ValueError) as e:
            raise StoreConsistencyError(f"Cannot load {measure.value} scores: {e}") from e
        vectors[measure] = ScoreVector(
            measure=measure,
            scores=scores,
            params=params,
            iterations_run=summary["iterations_run"],
            converged=summary["converged"],
            warnings=summary["warnings"],
        )
    return vectors


def run_export(config: PipelineConfig, computed: ComputeResult | None = None) -> dict[Measure, Path]:
    """Write the five dumps."""
    if computed is None:
        graph, _ = build_stage_graph(config)
        vectors = load_compute(config, graph)
    else:
        graph, vectors = computed.graph, computed.vectors
    directory = config.out_dir / DUMPS_DIR
    paths = write_dumps(
        vectors, graph, config.graph_id, directory, compressed=config.compress, workers=config.workers
    )
    write_json(
        directory / STAGE_REPORT,
        {
            "stage": "export",
            "graph_id": config.graph_id,
            "rows": graph.n,
            "dumps": {measure.value: path.name for measure, path in paths.items()},
        },
    )
    return paths


def run_correlate(config: PipelineConfig, computed: ComputeResult | None = None) -> CorrelationMatrix:
    """Pairwise top-k correlations of the computed measures."""
    vectors = load_compute(config) if computed is None else computed.vectors
    n = len(next(iter(vectors.values()))) if vectors else 0
    k = resolve_k(n, config.k, config.top_percent)
    matrix = correlation_matrix(vectors, k)

    directory = config.out_dir / CORRELATE_DIR
    target = config.correlation_out or directory
    target.mkdir(parents=True, exist_ok=True)
    (target / "correlation.csv").write_text(matrix.to_csv(), encoding="utf-8")
    write_json(target / "correlation.json", matrix.to_dict())
    report = {"stage": "correlate", "k": k, "nodes": n, "outputs": ["correlation.csv", "correlation.json"]}
    if config.correlation_out is not None:
        report["output_dir"] = str(config.correlation_out)
    write_json(directory / STAGE_REPORT, report)
    logger.info(f"Correlations written to {target}")
    return matrix


def run_pipeline(config: PipelineConfig, report_path: Path | None = None) -> CorrelationMatrix:
    """Ingest, compute, export and correlate in one go."""
    stage = "ingest"
    try:
        ingest = run_ingest(config, report_path)
        stage = "compute"
        computed = run_compute(config, ingest)
        stage = "export"
        run_export(config, computed)
        stage = "correlate"
        return run_correlate(config, computed)
    except ImpactError:
        logger.error(f"Pipeline stopped at stage {stage}")
        raise
