"""Citation graph construction and neighbourhood queries."""

import logging
from collections.abc import Iterable
from fractions import Fraction

import numpy as np
import pandas as pd

from app.models.doi import normalize_doi_series
from app.models.graph import (
    MIN_YEAR,
    CitationGraph,
    PubRecord,
    SkipReport,
    max_plausible_year,
)

logger = logging.getLogger(__name__)

RecordsInput = Iterable[PubRecord] | pd.DataFrame
EdgesInput = Iterable[tuple[str, str]] | pd.DataFrame


def _records_frame(records: RecordsInput) -> pd.DataFrame:
    if isinstance(records, pd.DataFrame):
        return records.loc[:, ["doi", "year"]]
    rows = [(record.doi, record.year) for record in records]
    return pd.DataFrame(rows, columns=["doi", "year"], dtype=object)


def _edges_frame(edges: EdgesInput) -> pd.DataFrame:
    if isinstance(edges, pd.DataFrame):
        return edges.loc[:, ["citing", "cited"]]
    return pd.DataFrame(list(edges), columns=["citing", "cited"], dtype=object)


def dated_records(records: RecordsInput, max_year: int | None = None) -> tuple[pd.Series, int]:
    """Resolve records to one plausible year per DOI, sorted by DOI.

    Returns:
        Series of years indexed by normalized DOI, and the number of DOIs
        dropped for lacking a plausible year.
    """
    max_year = max_year or max_plausible_year()
    frame = _records_frame(records)
    dois = normalize_doi_series(frame["doi"])
    years = pd.to_numeric(frame["year"], errors="coerce").astype("float64")
    dated = dois.notna() & years.notna() & (years == years.round()) & years.between(MIN_YEAR, max_year)
    resolved = (
        pd.DataFrame({"doi": dois[dated].to_numpy(dtype=object), "year": years[dated].to_numpy(np.int64)})
        .groupby("doi", sort=True)["year"]
        .min()
    )
    missing_year = int(dois.dropna().nunique()) - len(resolved)
    return resolved, missing_year


def build_graph(
    records: RecordsInput, edges: EdgesInput, max_year: int | None = None
) -> tuple[CitationGraph, SkipReport]:
    """Build the citation graph from dated records and raw citing/cited pairs.

    Only distinct edges whose endpoints both carry a year are kept; self loops
    are dropped. Node IDs follow ascending DOI order.

    Returns:
        The graph and a report of every skipped row.
    """
    years, missing_year = dated_records(records, max_year)
    node_dois = years.index.to_numpy(dtype=object)
    n = len(node_dois)

    frame = _edges_frame(edges)
    citing = normalize_doi_series(frame["citing"])
    cited = normalize_doi_series(frame["cited"])
    wellformed = (citing.notna() & cited.notna()).to_numpy(dtype=bool)
    malformed = int((~wellformed).sum())

    index = pd.Index(node_dois, dtype=object)
    citing_ids = index.get_indexer(citing[wellformed].to_numpy(dtype=object)).astype(np.int64)
    cited_ids = index.get_indexer(cited[wellformed].to_numpy(dtype=object)).astype(np.int64)
    known = (citing_ids >= 0) & (cited_ids >= 0)
    unknown = int((~known).sum())
    citing_ids, cited_ids = citing_ids[known], cited_ids[known]

    loops = citing_ids == cited_ids
    citing_ids, cited_ids = citing_ids[~loops], cited_ids[~loops]

    # sorted unique keys give CSR order: cited first, then citing
    keys = np.unique(cited_ids * max(n, 1) + citing_ids)
    report = SkipReport(
        malformed_doi=malformed,
        unknown_doi=unknown,
        self_loop=int(loops.sum()),
        duplicate=len(cited_ids) - len(keys),
        missing_year=missing_year,
    )
    if n == 0:
        logger.warning("No dated records, graph is empty")
        return CitationGraph.empty(), report

    targets, sources = np.divmod(keys, n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(targets, minlength=n), out=indptr[1:])
    graph = CitationGraph(
        dois=node_dois,
        years=years.to_numpy(dtype=np.int64),
        indptr=indptr,
        indices=sources.astype(np.int64),
        out_degree=np.bincount(sources, minlength=n).astype(np.int64),
    )
    logger.info(
        f"Built graph: {graph.n} nodes, {graph.edge_count} edges, "
        f"{report.skipped_edges} edges skipped, {missing_year} DOIs without year"
    )
    return graph, report


def in_neighbors(graph: CitationGraph, node: int) -> list[int]:
    """IDs of the papers citing ``node``, ascending."""
    return graph.in_neighbors(node)


def transition_column_weight(graph: CitationGraph, node: int) -> Fraction | None:
    """``1/out_degree(node)``, or None for a dangling node."""
    return graph.column_weight(node)
