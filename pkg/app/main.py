"""Main FastAPI application entry point."""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app.config import get_settings
from app.errors import ConfigError
from app.routers import scores
from app.services.store_service import DEFAULT_BATCH_CAP, ScoreStore, load_store_dir

logger = logging.getLogger(__name__)


def create_app(store: ScoreStore | None = None, batch_cap: int | None = None) -> FastAPI:
    """Build the service around ``store``, or around the dumps named in the settings."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if getattr(app.state, "store", None) is None:
            settings = get_settings()
            if settings.serve.dumps is None:
                raise ConfigError("serve.dumps is not set")
            app.state.store = load_store_dir(settings.serve.dumps)
            app.state.batch_cap = settings.serve.batch_cap
        logger.info(f"Serving {len(app.state.store)} DOIs of graph {app.state.store.metadata.graph_id}")
        yield

    app = FastAPI(
        title="Citation Impact Scores",
        description="Read-only access to precomputed publication impact scores",
        version="0.1.0",
        lifespan=lifespan,
    )
    app.state.store = store
    app.state.batch_cap = batch_cap or DEFAULT_BATCH_CAP
    app.include_router(scores.router, prefix="/v1", tags=["scores"])
    return app


app = create_app()
