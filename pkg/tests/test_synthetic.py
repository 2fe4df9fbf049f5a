"""Tests for the synthetic corpus generator."""

import sys
import time

import numpy as np
import pandas as pd
import pytest

from app.config import load_config
from app.errors import ParameterError
from app.models.scores import Measure, MeasureParams
from app.services.correlation_service import correlation_matrix, resolve_k
from app.services.graph_service import build_graph
from app.services.ingest_service import parse_source
from app.services.measures_service import compute_all
from app.services.pipeline_service import run_pipeline
from app.services.synthetic_service import preferential_attachment, split_sources, write_source


class TestPreferentialAttachment:
    """Test corpus generation."""

    def test_same_seed_same_corpus(self):
        """Test that generation is reproducible."""
        first = preferential_attachment(500, years=5, seed=11, last_year=2024)
        second = preferential_attachment(500, years=5, seed=11, last_year=2024)
        pd.testing.assert_frame_equal(first[0], second[0])
        pd.testing.assert_frame_equal(first[1], second[1])

    def test_years_spread_evenly(self):
        """Test that every year holds the same number of papers."""
        records, _ = preferential_attachment(400, years=8, last_year=2024)
        counts = records["year"].value_counts()
        assert sorted(counts.index) == list(range(2017, 2025))
        assert set(counts) == {50}

    def test_references_point_to_earlier_years(self):
        """Test that there are no self loops, repeats or same-year citations."""
        records, edges = preferential_attachment(800, years=6, mean_refs=6, seed=2, last_year=2024)
        years = records.set_index("doi")["year"]
        assert not edges.duplicated().any()
        assert (edges["citing"] != edges["cited"]).all()
        assert (years[edges["citing"]].to_numpy() > years[edges["cited"]].to_numpy()).all()
        assert len(edges) > 0

    def test_first_year_cites_nothing(self):
        """Test that the oldest cohort has no references."""
        records, edges = preferential_attachment(300, years=3, seed=5, last_year=2024)
        oldest = set(records.loc[records["year"] == 2022, "doi"])
        assert not oldest & set(edges["citing"])

    def test_rejects_bad_parameters(self):
        """Test parameter validation."""
        with pytest.raises(ParameterError):
            preferential_attachment(10, years=0)


class TestSplitSources:
    """Test distribution over sources."""

    def test_union_equals_input(self):
        """Test that no row is lost."""
        records, edges = preferential_attachment(600, years=5, seed=1, last_year=2024)
        parts = split_sources(records, edges, ["a", "b", "c"], overlap=0.5, seed=4)
        union = pd.concat([part_edges for _, part_edges in parts]).drop_duplicates()
        assert len(union) == len(edges)
        assert set(pd.concat([part_records for part_records, _ in parts])["doi"]) == set(records["doi"])
        assert sum(len(part_edges) for _, part_edges in parts) > len(edges)

    def test_no_overlap_partitions(self):
        """Test that overlap 0 assigns each row once."""
        records, edges = preferential_attachment(600, years=5, seed=1, last_year=2024)
        parts = split_sources(records, edges, ["a", "b"], overlap=0.0)
        assert sum(len(part_edges) for _, part_edges in parts) == len(edges)

    def test_invalid_overlap(self):
        """Test that overlap outside [0, 1] is rejected."""
        records, edges = preferential_attachment(10, years=2, last_year=2024)
        with pytest.raises(ParameterError):
            split_sources(records, edges, ["a"], overlap=1.5)

    def test_write_source_is_ingestible(self, tmp_path):
        """Test that written sources parse back."""
        records, edges = preferential_attachment(100, years=4, seed=9, last_year=2024)
        source = write_source(records, edges, tmp_path, "s")
        assert source.metadata_path.name == "s_metadata.csv.gz"
        parsed = parse_source(source)
        assert parsed.records["doi"].tolist() == records["doi"].tolist()
        assert len(parsed.edges) == len(edges)


@pytest.mark.slow
class TestRecencyCorrelations:
    """Qualitative agreement pattern of the five measures on a large corpus."""

    def test_popularity_measures_agree_most(self):
        """Test that AttRank and RAM form the most correlated pair."""
        records, edges = preferential_attachment(50_000, years=20, mean_refs=10, aging=0.2, seed=42, last_year=2024)
        graph, _ = build_graph(records, edges)
        vectors = compute_all(graph, MeasureParams(current_year=2024), workers=4)
        matrix = correlation_matrix(vectors, resolve_k(graph.n, top_percent=1.0))

        off_diagonal = matrix.values[~np.eye(len(matrix.measures), dtype=bool)]
        assert matrix.value(Measure.ATTRANK, Measure.RAM) == off_diagonal.max()
        assert matrix.value(Measure.ATTRANK, Measure.RAM) > matrix.value(Measure.CC, Measure.PR)


@pytest.mark.slow
class TestDeskScale:
    """Full pipeline on a million-paper corpus within desk-machine limits."""

    def test_million_node_pipeline(self, tmp_path):
        """Test that ingest to correlations finishes in 10 minutes and under 8 GB."""
        resource = pytest.importorskip("resource")
        records, edges = preferential_attachment(
            1_000_000, years=20, mean_refs=11, aging=0.2, seed=3, last_year=2024
        )
        assert len(edges) > 9_000_000
        names = ["desk1", "desk2", "desk3"]
        sources = {}
        for name, (part_records, part_edges) in zip(names, split_sources(records, edges, names, 0.3, seed=3)):
            source = write_source(part_records, part_edges, tmp_path / "sources", name)
            sources[name] = {"metadata": source.metadata_path, "edges": source.edges_path}
        del records, edges
        config = load_config(
            sources=sources,
            out_dir=tmp_path / "out",
            graph_id="desk",
            workers=4,
            measures={"current_year": 2024},
        )

        started = time.perf_counter()
        matrix = run_pipeline(config)
        elapsed = time.perf_counter() - started

        # kilobytes on Linux, bytes on macOS
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        peak_bytes = peak if sys.platform == "darwin" else peak * 1024
        assert elapsed < 600
        assert peak_bytes < 8 * 1024**3
        assert matrix.k == 10_000
        dumps = [path for path in (tmp_path / "out" / "dumps").iterdir() if path.name.endswith(".tsv.gz")]
        assert len(dumps) == 5
        assert (tmp_path / "out" / "correlate" / "correlation.json").is_file()
