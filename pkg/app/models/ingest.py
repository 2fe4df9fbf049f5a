"""Source descriptors and integration reports."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field


class SourceDescriptor(BaseModel):
    """One citation source: a metadata file and an edge file."""

    name: str = Field(..., min_length=1, description="Source label, e.g. coci")
    metadata_path: Path = Field(..., description="CSV with header doi,year")
    edges_path: Path = Field(..., description="CSV with header citing,cited")
    format: Literal["csv"] = Field(default="csv", description="File schema family")

    def missing_paths(self) -> list[Path]:
        return [path for path in (self.metadata_path, self.edges_path) if not path.is_file()]


class SourceReport(BaseModel):
    """Counts for a single source."""

    metadata_rows: int = 0
    edge_rows: int = 0
    distinct_dois: int = 0
    distinct_edges: int = 0
    malformed_rows: int = Field(default=0, description="Rows with a wrong field count")
    malformed_doi: int = 0
    missing_year: int = 0
    duplicate_records: int = 0
    self_loop: int = 0
    duplicate_edges: int = 0


class IngestReport(BaseModel):
    """Per-source and unified counts of an integration run."""

    sources: dict[str, SourceReport] = Field(default_factory=dict)
    unified_distinct_dois: int = 0
    unified_distinct_edges: int = 0
    records_with_year: int = 0
    edge_only_dois: int = Field(default=0, description="DOIs seen only in edge files")
    year_conflicts: int = Field(default=0, description="DOIs with disagreeing years")
