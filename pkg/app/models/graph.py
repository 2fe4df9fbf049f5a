"""Citation graph data model."""

import hashlib
from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from functools import cached_property

import numpy as np
from pydantic import BaseModel, Field
from scipy import sparse

from app.errors import NodeRangeError

MIN_YEAR = 1000


def max_plausible_year(today: date | None = None) -> int:
    """Upper bound of the publication-year sanity window."""
    return (today or date.today()).year + 2


@dataclass(frozen=True, slots=True)
class PubRecord:
    """A publication keyed by normalized DOI; ``year`` is None when unknown."""

    doi: str
    year: int | None = None


class SkipReport(BaseModel):
    """Rows dropped while building a graph."""

    malformed_doi: int = Field(default=0, description="Edges with an unparseable DOI")
    unknown_doi: int = Field(
        default=0, description="Edges with an endpoint absent from the dated records"
    )
    self_loop: int = Field(default=0, description="Edges citing themselves")
    duplicate: int = Field(default=0, description="Repeated edges collapsed to one")
    missing_year: int = Field(
        default=0, description="Records without a plausible publication year"
    )

    @property
    def skipped_edges(self) -> int:
        return self.malformed_doi + self.unknown_doi + self.self_loop + self.duplicate


@dataclass(frozen=True, eq=False)
class CitationGraph:
    """Immutable citation graph stored as in-edge CSR.

    Row ``i`` of the CSR lists the papers ``j`` citing paper ``i`` in ascending
    ID order, so ``A[i, j] = 1`` exactly for stored edges. Node IDs follow
    ascending lexicographic DOI order.
    """

    dois: np.ndarray
    years: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    out_degree: np.ndarray

    def __post_init__(self):
        for array in (self.dois, self.years, self.indptr, self.indices, self.out_degree):
            array.setflags(write=False)

    @classmethod
    def empty(cls) -> "CitationGraph":
        return cls(
            dois=np.array([], dtype=object),
            years=np.array([], dtype=np.int64),
            indptr=np.zeros(1, dtype=np.int64),
            indices=np.array([], dtype=np.int64),
            out_degree=np.array([], dtype=np.int64),
        )

    @property
    def n(self) -> int:
        return len(self.dois)

    @property
    def edge_count(self) -> int:
        return len(self.indices)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def edge_targets(self) -> np.ndarray:
        """Cited node of every stored edge, aligned with ``indices``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.in_degree)

    @cached_property
    def id_index(self) -> dict[str, int]:
        return {doi: node for node, doi in enumerate(self.dois)}

    @cached_property
    def dangling(self) -> np.ndarray:
        """Boolean mask of papers without references."""
        return self.out_degree == 0

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Matrix A with rows for cited and columns for citing papers."""
        data = np.ones(self.edge_count, dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def transition_matrix(self) -> sparse.csr_matrix:
        """Column-normalised A; dangling columns stay empty."""
        data = 1.0 / self.out_degree[self.indices]
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def check_node(self, node: int) -> None:
        if not 0 <= node < self.n:
            raise NodeRangeError(f"Node {node} outside 0..{self.n - 1}")

    def in_neighbors(self, node: int) -> list[int]:
        self.check_node(node)
        return self.indices[self.indptr[node] : self.indptr[node + 1]].tolist()

    def column_weight(self, node: int) -> Fraction | None:
        """Weight ``1/out_degree`` of column ``node`` in P, None when dangling."""
        self.check_node(node)
        degree = int(self.out_degree[node])
        return Fraction(1, degree) if degree else None

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update("\n".join(self.dois.tolist()).encode("utf-8"))
        for array in (self.years, self.indptr, self.indices, self.out_degree):
            digest.update(np.ascontiguousarray(array, dtype="<i8").tobytes())
        return digest.hexdigest()
