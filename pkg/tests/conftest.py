"""Shared fixtures, graph builders and dense-matrix oracles."""

from pathlib import Path

import numpy as np
import pytest

from app.config import PipelineConfig, load_config
from app.models.graph import CitationGraph, PubRecord
from app.services.graph_service import build_graph

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "app" / "fixtures" / "tiny"
FIXTURE_CONFIG = FIXTURE_DIR / "impact.conf"
CURRENT_YEAR = 2024


def make_doi(node: int) -> str:
    """Zero-padded DOIs keep node IDs equal to ``node``."""
    return f"10.5555/t.{node:04d}"


def graph_from_pairs(n: int, pairs: list[tuple[int, int]], years: list[int] | None = None) -> CitationGraph:
    """Graph over ``n`` papers from ``(citing, cited)`` index pairs."""
    years = years if years is not None else [CURRENT_YEAR] * n
    records = [PubRecord(make_doi(node), int(years[node])) for node in range(n)]
    edges = [(make_doi(citing), make_doi(cited)) for citing, cited in pairs]
    graph, _ = build_graph(records, edges)
    return graph


def random_graph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.05,
    dangling_share: float = 0.2,
    first_year: int = 2000,
) -> tuple[CitationGraph, np.ndarray]:
    """Random graph and its dense adjacency ``A[cited, citing]``."""
    years = rng.integers(first_year, CURRENT_YEAR + 1, size=n)
    dense = rng.random((n, n)) < density
    np.fill_diagonal(dense, False)
    dense[:, rng.random(n) < dangling_share] = False
    cited, citing = np.nonzero(dense)
    graph = graph_from_pairs(n, list(zip(citing.tolist(), cited.tolist())), years.tolist())
    return graph, dense.astype(np.float64)


def dense_power_iteration(
    adjacency: np.ndarray,
    alpha: float,
    teleport: np.ndarray,
    epsilon: float = 1e-12,
    max_iterations: int = 1000,
    start: np.ndarray | None = None,
) -> np.ndarray:
    """Reference fixed point of ``s = alpha * (P s + dangling/N) + teleport``."""
    n = len(adjacency)
    out_degree = adjacency.sum(axis=0)
    transition = adjacency / np.where(out_degree > 0, out_degree, 1)
    dangling = out_degree == 0
    scores = np.full(n, 1.0 / n) if start is None else start
    for _ in range(max_iterations):
        updated = alpha * (transition @ scores + scores[dangling].sum() / n) + teleport
        if np.abs(updated - scores).sum() <= epsilon:
            return updated
        scores = updated
    return scores


def dense_attention(adjacency: np.ndarray, years: np.ndarray, since: int) -> np.ndarray:
    recent = adjacency * (years >= since)[np.newaxis, :]
    counts = recent.sum(axis=1)
    return counts / counts.sum() if counts.sum() > 0 else counts


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def tiny_config(tmp_path) -> PipelineConfig:
    """Bundled fixture corpus with outputs under ``tmp_path``."""
    return load_config(FIXTURE_CONFIG, out_dir=tmp_path / "out", workers=1)


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
