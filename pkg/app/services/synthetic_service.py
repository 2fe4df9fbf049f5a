"""Synthetic citation corpora.

Recency-biased preferential attachment: a paper published in year ``Y`` picks
its references among papers of earlier years with probability proportional to
``(in_degree + 1) * exp(-aging * (Y - year))``.
"""

import logging
from datetime import date
from pathlib import Path

import numpy as np
import pandas as pd

from app.errors import ParameterError
from app.models.ingest import SourceDescriptor

logger = logging.getLogger(__name__)

SYNTHETIC_PREFIX = "10.5555/synth"


def preferential_attachment(
    n: int,
    years: int = 20,
    mean_refs: float = 10.0,
    aging: float = 0.2,
    seed: int = 0,
    last_year: int | None = None,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Generate a corpus of ``n`` papers spread evenly over ``years`` years.

    References of one year are drawn in a single batch from the attachment
    weights at the start of that year, then deduplicated.

    Returns:
        ``records`` (doi, year) and ``edges`` (citing, cited) frames.
    """
    if n < 0 or years < 1 or mean_refs < 0 or aging < 0:
        raise ParameterError(f"Invalid generator parameters: n={n}, years={years}, mean_refs={mean_refs}")
    last_year = last_year or date.today().year
    rng = np.random.default_rng(seed)

    width = max(len(str(max(n - 1, 0))), 1)
    dois = np.array([f"{SYNTHETIC_PREFIX}.{i:0{width}d}" for i in range(n)], dtype=object)
    offsets = (np.arange(n, dtype=np.int64) * years) // max(n, 1)
    paper_years = last_year - years + 1 + offsets

    in_degree = np.zeros(n, dtype=np.int64)
    citing_parts: list[np.ndarray] = []
    cited_parts: list[np.ndarray] = []
    for offset in range(1, years):
        cohort = np.flatnonzero(offsets == offset)
        earlier = np.flatnonzero(offsets < offset)
        if len(cohort) == 0 or len(earlier) == 0:
            continue
        weights = (in_degree[earlier] + 1) * np.exp(-aging * (offset - offsets[earlier]))
        refs = np.minimum(rng.poisson(mean_refs, size=len(cohort)), len(earlier))
        citing = np.repeat(cohort, refs)
        cited = earlier[rng.choice(len(earlier), size=len(citing), p=weights / weights.sum())]
        pairs = np.unique(citing * n + cited)
        citing, cited = np.divmod(pairs, n)
        np.add.at(in_degree, cited, 1)
        citing_parts.append(citing)
        cited_parts.append(cited)

    citing = np.concatenate(citing_parts) if citing_parts else np.empty(0, dtype=np.int64)
    cited = np.concatenate(cited_parts) if cited_parts else np.empty(0, dtype=np.int64)
    records = pd.DataFrame({"doi": dois, "year": paper_years})
    edges = pd.DataFrame({"citing": dois[citing], "cited": dois[cited]})
    logger.info(f"Generated synthetic corpus: {n} papers over {years} years, {len(edges)} citations")
    return records, edges


def split_sources(
    records: pd.DataFrame,
    edges: pd.DataFrame,
    names: list[str],
    overlap: float = 0.3,
    seed: int = 0,
) -> list[tuple[pd.DataFrame, pd.DataFrame]]:
    """Distribute rows over overlapping sources.

    Every row goes to one source chosen uniformly; a share ``overlap`` of the
    rows is repeated in a second, different source. The union of the parts
    equals the input.
    """
    if not names:
        raise ParameterError("At least one source name is required")
    if not 0 <= overlap <= 1:
        raise ParameterError(f"overlap must be in [0, 1], got {overlap}")
    rng = np.random.default_rng(seed)
    count = len(names)

    def assign(size: int) -> tuple[np.ndarray, np.ndarray]:
        primary = rng.integers(0, count, size=size)
        shift = rng.integers(1, max(count, 2), size=size)
        secondary = np.where(rng.random(size) < overlap, (primary + shift) % count, primary)
        return primary, secondary

    record_primary, record_secondary = assign(len(records))
    edge_primary, edge_secondary = assign(len(edges))
    parts = []
    for index in range(count):
        in_records = (record_primary == index) | (record_secondary == index)
        in_edges = (edge_primary == index) | (edge_secondary == index)
        parts.append((records[in_records].reset_index(drop=True), edges[in_edges].reset_index(drop=True)))
    return parts


def write_source(
    records: pd.DataFrame, edges: pd.DataFrame, directory: Path, name: str, compressed: bool = True
) -> SourceDescriptor:
    """Write one source in the ingest CSV schemas."""
    directory.mkdir(parents=True, exist_ok=True)
    suffix = ".csv.gz" if compressed else ".csv"
    compression = {"method": "gzip", "mtime": 0} if compressed else None
    source = SourceDescriptor(
        name=name,
        metadata_path=directory / f"{name}_metadata{suffix}",
        edges_path=directory / f"{name}_edges{suffix}",
    )
    records.loc[:, ["doi", "year"]].to_csv(source.metadata_path, index=False, compression=compression)
    edges.loc[:, ["citing", "cited"]].to_csv(source.edges_path, index=False, compression=compression)
    return source
