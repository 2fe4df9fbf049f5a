"""Parse, normalize and merge citation sources.

Each source is a metadata CSV (``doi,year``) and an edge CSV
(``citing,cited``), optionally gzip-compressed (``.gz`` suffix).
"""

import csv
import gzip
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from app.errors import IngestError
from app.models.doi import normalize_doi_series
from app.models.graph import MIN_YEAR, max_plausible_year
from app.models.ingest import IngestReport, SourceDescriptor, SourceReport

logger = logging.getLogger(__name__)

METADATA_COLUMNS = ["doi", "year"]
EDGE_COLUMNS = ["citing", "cited"]
# catches rows carrying more fields than the schema
EXTRA_FIELD = "_extra"


@dataclass(frozen=True, eq=False)
class ParsedSource:
    """Normalized rows of one source.

    ``records`` has one row per well-formed metadata row (``year`` is a
    nullable Int64); ``edges`` keeps every well-formed edge row, including
    self loops and repeats, which the merge removes.
    """

    name: str
    records: pd.DataFrame
    edges: pd.DataFrame
    report: SourceReport


def _scan_csv(path: Path) -> tuple[list[str], int]:
    """Header fields and the number of data records, quoted line breaks included."""
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8-sig", newline="") as handle:
        rows = (row for row in csv.reader(handle) if row)
        header = next(rows, None)
        records = sum(1 for _ in rows)
    if header is None:
        raise IngestError(f"{path}: empty file")
    return [field.strip().lower() for field in header], records


def _read_csv(path: Path, columns: list[str]) -> tuple[pd.DataFrame, int]:
    """Read a schema CSV; returns the well-formed rows and the number of rows dropped as malformed.

    Rows with more fields than the schema are malformed wherever they occur:
    the parser either skips them or fills the sentinel column.
    """
    try:
        header, records = _scan_csv(path)
        if header != columns:
            raise IngestError(f"{path}: expected header {','.join(columns)}, found {','.join(header)}")
        frame = pd.read_csv(
            path,
            header=0,
            names=[*columns, EXTRA_FIELD],
            index_col=False,
            dtype=str,
            keep_default_na=False,
            compression="infer",
            encoding="utf-8",
            on_bad_lines="skip",
        )
    except (OSError, UnicodeDecodeError, csv.Error, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise IngestError(f"Cannot read {path}: {e}") from e
    extra = frame[EXTRA_FIELD].notna().to_numpy()
    malformed = records - len(frame) + int(extra.sum())
    return frame.loc[~extra, columns].reset_index(drop=True), malformed


def parse_years(values: pd.Series, max_year: int | None = None) -> pd.Series:
    """Integral years inside the sanity window; anything else becomes ``<NA>``."""
    max_year = max_year or max_plausible_year()
    stripped = values.astype("string").str.strip().fillna("").astype(object)
    numeric = pd.to_numeric(stripped, errors="coerce").astype("float64")
    usable = numeric.notna() & (numeric == numeric.round()) & numeric.between(MIN_YEAR, max_year)
    return numeric.where(usable).astype("Int64")


def parse_source(source: SourceDescriptor, max_year: int | None = None) -> ParsedSource:
    """Read one source and normalize its DOIs and years.

    Raises:
        IngestError: when a file is unreadable or has the wrong header.
    """
    metadata, bad_metadata = _read_csv(source.metadata_path, METADATA_COLUMNS)
    dois = normalize_doi_series(metadata["doi"])
    years = parse_years(metadata["year"], max_year)
    wellformed = dois.notna()
    records = pd.DataFrame(
        {
            "doi": dois[wellformed].to_numpy(dtype=object),
            "year": years[wellformed].reset_index(drop=True),
        }
    )

    raw_edges, bad_edges = _read_csv(source.edges_path, EDGE_COLUMNS)
    citing = normalize_doi_series(raw_edges["citing"])
    cited = normalize_doi_series(raw_edges["cited"])
    edge_ok = citing.notna() & cited.notna()
    edges = pd.DataFrame(
        {
            "citing": citing[edge_ok].to_numpy(dtype=object),
            "cited": cited[edge_ok].to_numpy(dtype=object),
        }
    )
    loops = edges["citing"] == edges["cited"]
    distinct_edges = len(edges[~loops].drop_duplicates())
    distinct_dois = pd.unique(
        np.concatenate([records["doi"].to_numpy(), edges["citing"].to_numpy(), edges["cited"].to_numpy()])
    )

    report = SourceReport(
        metadata_rows=len(metadata) + bad_metadata,
        edge_rows=len(raw_edges) + bad_edges,
        distinct_dois=len(distinct_dois),
        distinct_edges=distinct_edges,
        malformed_rows=bad_metadata + bad_edges,
        malformed_doi=int((~wellformed).sum() + (~edge_ok).sum()),
        missing_year=int(records["year"].isna().sum()),
        duplicate_records=len(records) - int(records["doi"].nunique()),
        self_loop=int(loops.sum()),
        duplicate_edges=int((~loops).sum()) - distinct_edges,
    )
    logger.info(
        f"Parsed source {source.name}: {report.distinct_dois} DOIs, {report.distinct_edges} edges, "
        f"{report.malformed_rows + report.malformed_doi} malformed rows, {report.missing_year} without year"
    )
    return ParsedSource(name=source.name, records=records, edges=edges, report=report)


def merge_sources(
    sources: list[SourceDescriptor], workers: int = 1, max_year: int | None = None
) -> tuple[pd.DataFrame, pd.DataFrame, IngestReport]:
    """Union the sources into one deduplicated record set and edge set.

    Conflicting years resolve to the earliest one. DOIs that only appear in
    edge files are kept as year-less records (``in_metadata`` False).

    Returns:
        ``records`` (doi, year, in_metadata) sorted by DOI, ``edges``
        (citing, cited) sorted, and the integration report.

    Raises:
        IngestError: with no sources, duplicate source names or no dated record.
    """
    if not sources:
        raise IngestError("At least one source is required")
    names = [source.name for source in sources]
    if len(set(names)) != len(names):
        raise IngestError(f"Duplicate source names: {sorted(names)}")

    ordered = sorted(sources, key=lambda source: source.name)
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(ordered)))) as executor:
        parsed = list(executor.map(lambda source: parse_source(source, max_year), ordered))

    all_records = pd.concat([p.records for p in parsed], ignore_index=True)
    grouped = all_records.groupby("doi", sort=True)["year"]
    years = grouped.min()
    year_conflicts = int((grouped.nunique() > 1).sum())

    edges = pd.concat([p.edges for p in parsed], ignore_index=True)
    edges = (
        edges[edges["citing"] != edges["cited"]]
        .drop_duplicates()
        .sort_values(["citing", "cited"], kind="stable")
        .reset_index(drop=True)
    )

    endpoints = pd.unique(np.concatenate([edges["citing"].to_numpy(), edges["cited"].to_numpy()]))
    edge_only = pd.Index(endpoints, dtype=object).difference(years.index).to_numpy(dtype=object)
    records = pd.concat(
        [
            pd.DataFrame(
                {"doi": years.index.to_numpy(dtype=object), "year": years.to_numpy(), "in_metadata": True}
            ),
            pd.DataFrame(
                {"doi": edge_only, "year": pd.array([pd.NA] * len(edge_only), dtype="Int64"), "in_metadata": False}
            ),
        ],
        ignore_index=True,
    )
    records["year"] = records["year"].astype("Int64")
    records["in_metadata"] = records["in_metadata"].astype(bool)
    records = records.sort_values("doi", kind="stable").reset_index(drop=True)

    report = IngestReport(
        sources={p.name: p.report for p in parsed},
        unified_distinct_dois=len(records),
        unified_distinct_edges=len(edges),
        records_with_year=int(records["year"].notna().sum()),
        edge_only_dois=len(edge_only),
        year_conflicts=year_conflicts,
    )
    if report.records_with_year == 0:
        raise IngestError("No usable records: every source lacks publication years")
    logger.info(
        f"Merged {len(parsed)} sources: {report.unified_distinct_dois} DOIs "
        f"({report.records_with_year} dated), {report.unified_distinct_edges} edges"
    )
    return records, edges, report


def write_unified(records: pd.DataFrame, edges: pd.DataFrame, directory: Path) -> SourceDescriptor:
    """Persist a merged corpus in the ingest schemas so it can be re-ingested."""
    directory.mkdir(parents=True, exist_ok=True)
    compression = {"method": "gzip", "mtime": 0}
    metadata_path = directory / "records.csv.gz"
    edges_path = directory / "edges.csv.gz"
    records.loc[records["in_metadata"], METADATA_COLUMNS].to_csv(
        metadata_path, index=False, compression=compression
    )
    edges.loc[:, EDGE_COLUMNS].to_csv(edges_path, index=False, compression=compression)
    return SourceDescriptor(name="unified", metadata_path=metadata_path, edges_path=edges_path)
