"""Read-only score lookup routes."""

from fastapi import APIRouter, Depends, HTTPException, Request

from app.errors import RequestError
from app.models.api import HealthResponse, MeasureInfo, ScoresRequest, ScoresResponse
from app.models.scores import Measure
from app.services.store_service import ScoreStore, get_scores

router = APIRouter()


def get_store(request: Request) -> ScoreStore:
    """The store loaded at startup."""
    return request.app.state.store


def get_batch_cap(request: Request) -> int:
    return request.app.state.batch_cap


def _lookup(store: ScoreStore, dois: list[str], cap: int) -> ScoresResponse:
    try:
        results = get_scores(store, dois, cap)
    except RequestError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return ScoresResponse(metadata=store.metadata, results=results)


@router.get("/scores/{doi:path}", response_model=ScoresResponse)
async def get_single_scores(doi: str, store: ScoreStore = Depends(get_store)):
    """Scores of one DOI; unknown DOIs come back with ``found: false``."""
    return _lookup(store, [doi], cap=1)


@router.post("/scores", response_model=ScoresResponse)
async def get_batch_scores(
    body: ScoresRequest,
    store: ScoreStore = Depends(get_store),
    cap: int = Depends(get_batch_cap),
):
    """Scores of up to ``batch_cap`` DOIs, in request order."""
    return _lookup(store, body.dois, cap)


@router.get("/measures", response_model=list[MeasureInfo])
async def list_measures(store: ScoreStore = Depends(get_store)):
    """The five measures, their impact aspect and dump parameters."""
    return [
        MeasureInfo(
            tag=measure.value,
            key=measure.key,
            aspect=measure.aspect.value,
            params=store.metadata.params.get(measure.value, {}),
        )
        for measure in Measure
    ]


@router.get("/health", response_model=HealthResponse)
async def health_check(store: ScoreStore = Depends(get_store)):
    """Health check with build metadata."""
    return HealthResponse(status="healthy", metadata=store.metadata)
