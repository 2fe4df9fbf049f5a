"""Top-k rankings and Spearman's rho_min between measures."""

import logging
import math
from collections.abc import Mapping

import numpy as np

from app.errors import ParameterError
from app.models.correlation import CorrelationMatrix, RankCorrelation, TopKRanking
from app.models.scores import Measure, ScoreVector

logger = logging.getLogger(__name__)


def resolve_k(n: int, k: int | None = None, top_percent: float = 1.0) -> int:
    """Explicit ``k`` wins, otherwise ``ceil(n * top_percent / 100)``, at least 1."""
    if k is not None:
        return k
    return max(1, math.ceil(n * top_percent / 100))


def top_k(vector: ScoreVector, k: int) -> TopKRanking:
    """Best ``k`` nodes by descending score, ties by ascending node ID."""
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    scores = vector.scores
    if k < len(scores):
        # keep every node tied with the k-th score, then order exactly
        threshold = np.partition(-scores, k - 1)[k - 1]
        candidates = np.flatnonzero(-scores <= threshold)
    else:
        candidates = np.arange(len(scores))
    order = np.lexsort((candidates, -scores[candidates]))
    return TopKRanking(measure=vector.measure, k=k, entries=candidates[order][:k])


def _ranks(union: np.ndarray, ranking: TopKRanking) -> np.ndarray:
    """1-based position in ``ranking``; ``k + 1`` for absent nodes."""
    ranks = np.full(len(union), ranking.k + 1, dtype=np.float64)
    if len(ranking.entries) == 0:
        return ranks
    order = np.argsort(ranking.entries, kind="stable")
    sorted_entries = ranking.entries[order]
    positions = np.minimum(np.searchsorted(sorted_entries, union), len(sorted_entries) - 1)
    present = sorted_entries[positions] == union
    ranks[present] = order[positions[present]] + 1
    return ranks


def rho_min(first: TopKRanking, second: TopKRanking) -> RankCorrelation:
    """Pearson correlation of rank vectors over the union of two top-k lists.

    A node missing from a list takes rank ``k + 1`` there. A constant rank
    vector makes the correlation undefined; it is reported as 0 and flagged.
    """
    if first.k != second.k:
        raise ParameterError(f"k mismatch: {first.k} vs {second.k}")
    if np.array_equal(first.entries, second.entries):
        return RankCorrelation(1.0)
    union = np.union1d(first.entries, second.entries)
    x = _ranks(union, first)
    y = _ranks(union, second)
    dx = x - x.mean()
    dy = y - y.mean()
    denominator = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if denominator == 0:
        return RankCorrelation(0.0, degenerate=True)
    value = float(np.sum(dx * dy) / denominator)
    return RankCorrelation(min(1.0, max(-1.0, value)))


def correlation_matrix(vectors: Mapping[Measure, ScoreVector], k: int) -> CorrelationMatrix:
    """Pairwise rho_min of all given measures over their top-k lists."""
    measures = list(vectors)
    sizes = {len(vector) for vector in vectors.values()}
    if len(sizes) > 1:
        raise ParameterError(f"Score vectors cover different graphs (sizes {sorted(sizes)})")
    rankings = {measure: top_k(vectors[measure], k) for measure in measures}
    size = len(measures)
    values = np.eye(size)
    degenerate = np.zeros((size, size), dtype=bool)
    for i in range(size):
        for j in range(i + 1, size):
            result = rho_min(rankings[measures[i]], rankings[measures[j]])
            values[i, j] = values[j, i] = result.value
            degenerate[i, j] = degenerate[j, i] = result.degenerate
            logger.info(f"rho_min({measures[i].value}, {measures[j].value}) = {result.value:.4f}")
    return CorrelationMatrix(measures=measures, values=values, degenerate=degenerate, k=k)
