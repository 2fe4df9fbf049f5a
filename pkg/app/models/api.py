"""Pydantic models for API requests and responses."""

from datetime import datetime

from pydantic import BaseModel, Field


class ScoreRecord(BaseModel):
    """The five scores of one publication."""

    cc: float
    icc: float
    pagerank: float
    ram: float
    attrank: float


class ScoreEntry(BaseModel):
    """Lookup result for one requested DOI."""

    doi: str = Field(..., description="DOI as requested, normalized when possible")
    found: bool
    scores: ScoreRecord | None = None


class StoreMetadata(BaseModel):
    """Provenance of the served scores."""

    graph_id: str
    params: dict[str, dict[str, str]] = Field(
        default_factory=dict, description="Per-measure parameters taken from the dump names"
    )
    build_timestamp: datetime
    doi_count: int = 0


class ScoresRequest(BaseModel):
    """Batch lookup body."""

    dois: list[str] = Field(..., description="DOIs to look up, in response order")


class ScoresResponse(BaseModel):
    metadata: StoreMetadata
    results: list[ScoreEntry]


class MeasureInfo(BaseModel):
    tag: str
    key: str
    aspect: str
    params: dict[str, str] = Field(default_factory=dict)


class HealthResponse(BaseModel):
    status: str
    metadata: StoreMetadata
