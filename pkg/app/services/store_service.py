"""In-memory score store behind the HTTP service."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from types import MappingProxyType

from app.errors import DumpFormatError, InvalidDoiError, RequestError, StoreConsistencyError
from app.models.api import ScoreEntry, ScoreRecord, StoreMetadata
from app.models.doi import normalize_doi
from app.models.export import DumpSpec
from app.models.scores import Measure
from app.services.export_service import read_dump

UTC = timezone.utc

logger = logging.getLogger(__name__)

DEFAULT_BATCH_CAP = 1000


@dataclass(frozen=True, eq=False)
class ScoreStore:
    """DOI to five-score records, immutable once loaded."""

    records: Mapping[str, ScoreRecord]
    metadata: StoreMetadata

    def __len__(self) -> int:
        return len(self.records)

    def get(self, doi: str) -> ScoreRecord | None:
        return self.records.get(doi)


def dump_paths(directory: Path) -> list[Path]:
    """Dump files in ``directory``, sorted by name."""
    return sorted(path for path in directory.iterdir() if path.name.endswith((".tsv", ".tsv.gz")))


def load_store(paths: Iterable[Path]) -> ScoreStore:
    """Join one dump per measure into a store.

    Raises:
        StoreConsistencyError: unless there is exactly one dump per measure,
            all from the same graph_id and all covering the same DOIs.
        DumpFormatError: on unparseable names or rows.
    """
    specs: dict[Measure, tuple[DumpSpec, Path]] = {}
    for path in map(Path, paths):
        spec = DumpSpec.parse(path.name)
        if spec.measure in specs:
            raise StoreConsistencyError(
                f"Two dumps for {spec.measure.value}: {specs[spec.measure][1].name}, {path.name}"
            )
        specs[spec.measure] = (spec, path)

    missing = [measure.value for measure in Measure if measure not in specs]
    if missing:
        raise StoreConsistencyError(f"No dump for {', '.join(missing)}")
    graph_ids = {spec.graph_id for spec, _ in specs.values()}
    if len(graph_ids) != 1:
        raise StoreConsistencyError(f"Dumps come from different graphs: {sorted(graph_ids)}")

    columns: dict[Measure, dict[str, float]] = {}
    for measure, (_, path) in specs.items():
        rows = read_dump(path)
        column = dict(rows)
        if len(column) != len(rows):
            raise StoreConsistencyError(f"{path.name} lists a DOI more than once")
        columns[measure] = column

    all_dois = set().union(*(column.keys() for column in columns.values()))
    for measure, column in columns.items():
        absent = all_dois - column.keys()
        if absent:
            raise StoreConsistencyError(f"DOI {min(absent)} is missing from {specs[measure][1].name}")

    records = {
        doi: ScoreRecord(**{measure.key: columns[measure][doi] for measure in Measure}) for doi in sorted(all_dois)
    }
    metadata = StoreMetadata(
        graph_id=graph_ids.pop(),
        params={measure.value: dict(specs[measure][0].params) for measure in Measure},
        build_timestamp=datetime.fromtimestamp(max(path.stat().st_mtime for _, path in specs.values()), tz=UTC),
        doi_count=len(records),
    )
    logger.info(f"Loaded {len(records)} DOIs for graph {metadata.graph_id}")
    return ScoreStore(records=MappingProxyType(records), metadata=metadata)


def load_store_dir(directory: Path) -> ScoreStore:
    paths = dump_paths(directory)
    if not paths:
        raise DumpFormatError(str(directory), 0, "no dump files found")
    return load_store(paths)


def get_scores(store: ScoreStore, dois: list[str], cap: int = DEFAULT_BATCH_CAP) -> list[ScoreEntry]:
    """Look up DOIs in request order; misses and malformed DOIs come back as not found.

    Raises:
        RequestError: for an empty or over-cap list.
    """
    if not dois:
        raise RequestError("At least one DOI is required")
    if len(dois) > cap:
        raise RequestError(f"At most {cap} DOIs per request, got {len(dois)}")
    results = []
    for raw in dois:
        try:
            doi = normalize_doi(raw)
        except InvalidDoiError:
            results.append(ScoreEntry(doi=raw, found=False))
            continue
        record = store.get(doi)
        results.append(ScoreEntry(doi=doi, found=record is not None, scores=record))
    return results
