"""Two-column (DOI, score) TSV dumps."""

import gzip
import io
import logging
import math
from collections.abc import Iterator, Mapping
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from app.errors import DumpDataError, DumpFormatError, InvalidDoiError
from app.models.doi import normalize_doi
from app.models.export import DumpSpec
from app.models.graph import CitationGraph
from app.models.scores import Measure, ScoreVector

logger = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b"


def format_score(score: float) -> str:
    return f"{score:.17g}"


def ranked_order(scores: np.ndarray) -> np.ndarray:
    """Node IDs by descending score, ties by ascending ID (hence ascending DOI)."""
    return np.lexsort((np.arange(len(scores)), -scores))


def write_dump(vector: ScoreVector, graph: CitationGraph, spec: DumpSpec, directory: Path) -> Path:
    """Write ``vector`` as ``DOI<TAB>score`` lines, best first.

    The gzip header carries no timestamp or name, so identical inputs give
    identical bytes.
    """
    if len(vector) != graph.n:
        raise DumpDataError(f"{vector.measure.value} has {len(vector)} scores for {graph.n} nodes")
    if not np.isfinite(vector.scores).all():
        raise DumpDataError(f"{vector.measure.value} contains non-finite scores")
    bad = [doi for doi in graph.dois if "\t" in doi or "\n" in doi]
    if bad:
        raise DumpDataError(f"DOI {bad[0]!r} cannot be written to a TSV dump")

    body = "".join(
        f"{graph.dois[node]}\t{format_score(vector.scores[node])}\n"
        for node in ranked_order(vector.scores)
    ).encode("utf-8")

    directory.mkdir(parents=True, exist_ok=True)
    path = directory / spec.filename
    if spec.compressed:
        with path.open("wb") as raw, gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as out:
            out.write(body)
    else:
        path.write_bytes(body)
    logger.info(f"Wrote {graph.n} rows to {path}")
    return path


def write_dumps(
    vectors: Mapping[Measure, ScoreVector],
    graph: CitationGraph,
    graph_id: str,
    directory: Path,
    compressed: bool = True,
    workers: int = 1,
) -> dict[Measure, Path]:
    """Write one dump per measure; one writer per file."""
    specs = {measure: DumpSpec.for_vector(vector, graph_id, compressed) for measure, vector in vectors.items()}
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {
            measure: executor.submit(write_dump, vector, graph, specs[measure], directory)
            for measure, vector in vectors.items()
        }
        return {measure: future.result() for measure, future in futures.items()}


def _open_text(path: Path) -> io.TextIOBase:
    with path.open("rb") as handle:
        compressed = handle.read(2) == GZIP_MAGIC
    if compressed:
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="\n")
    return path.open("r", encoding="utf-8", newline="\n")


def iter_dump(path: Path) -> Iterator[tuple[str, float]]:
    """Yield ``(doi, score)`` rows in file order.

    Raises:
        DumpFormatError: on the first malformed line, with its 1-based number.
    """
    with _open_text(path) as handle:
        for line_number, line in enumerate(handle, start=1):
            columns = line.rstrip("\n").split("\t")
            if len(columns) != 2:
                raise DumpFormatError(
                    str(path), line_number, f"expected 2 tab-separated columns, found {len(columns)}"
                )
            raw_doi, raw_score = columns
            try:
                doi = normalize_doi(raw_doi)
            except InvalidDoiError:
                raise DumpFormatError(str(path), line_number, f"invalid DOI {raw_doi!r}") from None
            try:
                score = float(raw_score)
            except ValueError:
                raise DumpFormatError(str(path), line_number, f"invalid score {raw_score!r}") from None
            if not math.isfinite(score):
                raise DumpFormatError(str(path), line_number, f"non-finite score {raw_score!r}")
            yield doi, score


def read_dump(path: Path) -> list[tuple[str, float]]:
    return list(iter_dump(Path(path)))
