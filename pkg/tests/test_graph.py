"""Tests for DOI normalization and citation graph construction."""

from fractions import Fraction

import numpy as np
import pytest

from app.errors import InvalidDoiError, NodeRangeError
from app.models.doi import is_doi, normalize_doi
from app.models.graph import PubRecord
from app.services.graph_service import build_graph, in_neighbors, transition_column_weight
from tests.conftest import graph_from_pairs, make_doi, random_graph


class TestDoi:
    """Test DOI normalization."""

    def test_lowercases_and_trims(self):
        """Test that case and surrounding whitespace are dropped."""
        assert normalize_doi("  10.1000/ABC ") == "10.1000/abc"

    def test_strips_resolver_prefixes(self):
        """Test that resolver URLs and doi: prefixes are removed."""
        assert normalize_doi("https://doi.org/10.1000/X") == "10.1000/x"
        assert normalize_doi("http://dx.doi.org/10.1000/x") == "10.1000/x"
        assert normalize_doi("doi:10.1000/x") == "10.1000/x"

    def test_idempotent(self):
        """Test that normalizing twice changes nothing."""
        once = normalize_doi("HTTPS://DOI.ORG/10.1234.5/Some-Thing")
        assert normalize_doi(once) == once

    @pytest.mark.parametrize("raw", ["", "abc", "11.1000/x", "10.1000/", "10.abc/x", "10.1000/a b"])
    def test_rejects_malformed(self, raw):
        """Test that non-DOIs raise InvalidDoiError."""
        with pytest.raises(InvalidDoiError):
            normalize_doi(raw)
        assert not is_doi(raw)


class TestBuildGraph:
    """Test graph construction."""

    def test_duplicate_edges_collapse(self):
        """Test that a repeated edge is stored once."""
        records = [PubRecord("10.1/a", 2000), PubRecord("10.1/b", 2005)]
        graph, report = build_graph(records, [("10.1/b", "10.1/a"), ("10.1/b", "10.1/a")])
        assert graph.n == 2
        assert graph.edge_count == 1
        assert report.duplicate == 1

    def test_self_loop_dropped(self):
        """Test that self citations never enter the graph."""
        graph, report = build_graph([PubRecord("10.1/a", 2000)], [("10.1/a", "10.1/a")])
        assert graph.edge_count == 0
        assert report.self_loop == 1

    def test_unknown_endpoints_skipped(self):
        """Test that edges touching unknown DOIs are counted, not stored."""
        records = [PubRecord(f"10.1/{name}", 2000 + i) for i, name in enumerate("abcde")]
        edges = [
            ("10.1/b", "10.1/a"),
            ("10.1/c", "10.1/a"),
            ("10.1/c", "10.1/b"),
            ("10.1/d", "10.1/c"),
            ("10.1/e", "10.1/d"),
            ("10.1/e", "10.1/zz"),
            ("10.1/yy", "10.1/a"),
        ]
        graph, report = build_graph(records, edges)
        assert graph.edge_count == 5
        assert report.unknown_doi == 2
        assert report.skipped_edges == 2

    def test_year_less_records_excluded(self):
        """Test that records without a plausible year are not nodes."""
        records = [
            PubRecord("10.1/a", 2000),
            PubRecord("10.1/b", None),
            PubRecord("10.1/c", 999),
            PubRecord("10.1/d", 2001),
        ]
        graph, report = build_graph(records, [("10.1/d", "10.1/a"), ("10.1/b", "10.1/a")])
        assert graph.dois.tolist() == ["10.1/a", "10.1/d"]
        assert graph.edge_count == 1
        assert report.missing_year == 2
        assert report.unknown_doi == 1

    def test_malformed_doi_counted(self):
        """Test that unparseable DOIs are reported."""
        graph, report = build_graph([PubRecord("10.1/a", 2000)], [("garbage", "10.1/a")])
        assert graph.edge_count == 0
        assert report.malformed_doi == 1

    def test_duplicate_records_take_earliest_year(self):
        """Test that a DOI listed twice keeps the minimum year."""
        graph, _ = build_graph([PubRecord("10.1/a", 2003), PubRecord("10.1/A", 2001)], [])
        assert graph.years.tolist() == [2001]

    def test_node_ids_follow_doi_order(self):
        """Test that IDs are assigned in lexicographic DOI order."""
        records = [PubRecord("10.1/c", 2000), PubRecord("10.1/a", 2000), PubRecord("10.1/b", 2000)]
        graph, _ = build_graph(records, [])
        assert graph.dois.tolist() == ["10.1/a", "10.1/b", "10.1/c"]
        assert graph.id_index["10.1/c"] == 2

    def test_degree_sums_match_edge_count(self, rng):
        """Test that in-degrees and out-degrees both sum to the edge count."""
        graph, dense = random_graph(rng, 80)
        assert graph.in_degree.sum() == graph.out_degree.sum() == graph.edge_count == int(dense.sum())

    def test_deterministic_under_permutation(self, rng):
        """Test that shuffled inputs give a byte-identical graph."""
        records = [PubRecord(make_doi(i), 2000 + i % 7) for i in range(40)]
        edges = [(make_doi(j), make_doi(i)) for i in range(40) for j in range(40) if (i * 7 + j * 3) % 11 == 0]
        first, _ = build_graph(records, edges)
        second, _ = build_graph(
            [records[i] for i in rng.permutation(len(records))],
            [edges[i] for i in rng.permutation(len(edges))] + edges[:5],
        )
        assert first.fingerprint() == second.fingerprint()

    def test_empty_input(self):
        """Test that no records give the empty graph."""
        graph, _ = build_graph([], [])
        assert graph.n == 0
        assert graph.edge_count == 0

    def test_graph_is_immutable(self):
        """Test that the stored arrays are read-only."""
        graph = graph_from_pairs(2, [(1, 0)])
        with pytest.raises(ValueError):
            graph.indices[0] = 1


class TestInNeighbors:
    """Test in-neighbour queries."""

    def test_single_node(self):
        """Test that an isolated node has no citing papers."""
        assert in_neighbors(graph_from_pairs(1, []), 0) == []

    def test_direct_edge(self):
        """Test that the citing paper is listed."""
        graph = graph_from_pairs(2, [(1, 0)])
        assert in_neighbors(graph, 0) == [1]
        assert in_neighbors(graph, 1) == []

    def test_matches_dense_oracle(self, rng):
        """Test that every node agrees with the dense adjacency matrix."""
        for _ in range(5):
            n = int(rng.integers(1, 200))
            graph, dense = random_graph(rng, n, density=0.08)
            for node in range(n):
                assert in_neighbors(graph, node) == np.flatnonzero(dense[node]).tolist()

    def test_out_of_range(self):
        """Test that invalid IDs raise a range error."""
        graph = graph_from_pairs(2, [(1, 0)])
        with pytest.raises(NodeRangeError):
            in_neighbors(graph, 2)
        with pytest.raises(IndexError):
            in_neighbors(graph, -1)


class TestTransitionColumnWeight:
    """Test column weights of the transition matrix."""

    def test_four_references(self):
        """Test that a paper citing four others spreads a quarter to each."""
        graph = graph_from_pairs(5, [(4, 0), (4, 1), (4, 2), (4, 3)])
        assert transition_column_weight(graph, 4) == Fraction(1, 4)

    def test_dangling(self):
        """Test that a paper without references is dangling."""
        graph = graph_from_pairs(2, [(1, 0)])
        assert transition_column_weight(graph, 0) is None
        assert graph.dangling.tolist() == [True, False]

    def test_columns_sum_to_one(self, rng):
        """Test that every non-dangling column of P sums to 1."""
        graph, _ = random_graph(rng, 120)
        sums = np.asarray(graph.transition_matrix.sum(axis=0)).ravel()
        np.testing.assert_allclose(sums[~graph.dangling], 1.0, atol=1e-12)
        assert np.all(sums[graph.dangling] == 0)

    def test_adjacency_matches_dense(self, rng):
        """Test that the sparse matrix A equals the dense oracle."""
        graph, dense = random_graph(rng, 60)
        np.testing.assert_array_equal(graph.adjacency.toarray(), dense)
