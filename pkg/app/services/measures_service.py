"""Impact measure kernels over a citation graph.

Every kernel reads the immutable graph and aggregates over citing papers in
ascending node order (scipy CSR row order), so repeated runs are bitwise
identical.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.errors import MeasureError
from app.models.graph import CitationGraph
from app.models.scores import Measure, MeasureParams, ScoreVector

logger = logging.getLogger(__name__)


def citation_count(graph: CitationGraph, params: MeasureParams | None = None) -> ScoreVector:
    """In-degree of every paper."""
    return ScoreVector(
        measure=Measure.CC,
        scores=graph.in_degree.astype(np.float64),
        params=params or MeasureParams(),
    )


def incubation_citation_count(graph: CitationGraph, params: MeasureParams) -> ScoreVector:
    """Citations received from papers published at most ``y`` years after the cited one."""
    citing_years = graph.years[graph.indices]
    cited_years = graph.years[graph.edge_targets]
    in_window = citing_years <= cited_years + params.incubation_window
    scores = np.bincount(graph.edge_targets[in_window], minlength=graph.n).astype(np.float64)
    return ScoreVector(measure=Measure.ICC, scores=scores, params=params)


def ram(graph: CitationGraph, params: MeasureParams) -> ScoreVector:
    """Citation sum with each citation weighted ``gamma ** (t_c - t_j)``."""
    age = params.current_year - graph.years
    future = age < 0
    future_citations = int(graph.out_degree[future].sum())
    if future_citations:
        logger.warning(
            f"RAM: {future_citations} citations from papers dated after {params.current_year}, "
            "weights capped at 1"
        )
    weights = np.power(params.ram_gamma, np.maximum(age, 0).astype(np.float64))
    scores = graph.adjacency @ weights
    return ScoreVector(
        measure=Measure.RAM,
        scores=np.asarray(scores, dtype=np.float64),
        params=params,
        warnings={"future_dated_citations": future_citations} if future_citations else {},
    )


def attention_score(graph: CitationGraph, params: MeasureParams) -> np.ndarray:
    """Each paper's share of the citations made in the most recent years.

    All zeros when no citation falls inside the window.
    """
    since = params.current_year - params.attention_window + 1
    recent = graph.years[graph.indices] >= since
    counts = np.bincount(graph.edge_targets[recent], minlength=graph.n).astype(np.float64)
    total = counts.sum()
    return counts / total if total > 0 else counts


def age_prior(graph: CitationGraph, params: MeasureParams) -> np.ndarray:
    """``c * exp(-rho * (t_c - t_i))`` with ``c`` making the prior sum to 1."""
    age = np.maximum(params.current_year - graph.years, 0).astype(np.float64)
    prior = np.exp(-params.att_rho * age)
    return prior / prior.sum() if graph.n else prior


def _power_iterate(
    graph: CitationGraph,
    alpha: float,
    teleport: np.ndarray,
    params: MeasureParams,
    measure: Measure,
) -> tuple[np.ndarray, int, bool]:
    """Iterate ``s = alpha * (P s + dangling/N) + teleport`` from the uniform vector.

    ``teleport`` must sum to ``1 - alpha``; dangling mass is spread uniformly.
    Stops when the L1 change is at most ``pr_epsilon``.
    """
    n = graph.n
    transition = graph.transition_matrix
    dangling = graph.dangling
    scores = np.full(n, 1.0 / n)
    for iteration in range(1, params.max_iterations + 1):
        dangling_mass = scores[dangling].sum()
        updated = alpha * (transition @ scores + dangling_mass / n) + teleport
        change = np.abs(updated - scores).sum()
        scores = updated
        if change <= params.pr_epsilon:
            return scores, iteration, True
    logger.warning(
        f"{measure.value} did not converge in {params.max_iterations} iterations "
        f"(last L1 change {change:.3e})"
    )
    return scores, params.max_iterations, False


def pagerank(graph: CitationGraph, params: MeasureParams) -> ScoreVector:
    """PageRank with uniform teleport and uniform dangling redistribution."""
    if graph.n == 0:
        return ScoreVector(measure=Measure.PR, scores=np.zeros(0), params=params)
    teleport = np.full(graph.n, (1.0 - params.pr_alpha) / graph.n)
    scores, iterations, converged = _power_iterate(graph, params.pr_alpha, teleport, params, Measure.PR)
    return ScoreVector(
        measure=Measure.PR,
        scores=scores,
        params=params,
        iterations_run=iterations,
        converged=converged,
    )


def attrank(graph: CitationGraph, params: MeasureParams) -> ScoreVector:
    """PageRank variant teleporting by recent attention and an age prior.

    With no citation in the attention window the attention weight moves onto
    the age prior.
    """
    if graph.n == 0:
        return ScoreVector(measure=Measure.ATTRANK, scores=np.zeros(0), params=params)
    attention = attention_score(graph, params)
    prior = age_prior(graph, params)
    if attention.any():
        teleport = params.att_beta * attention + params.att_gamma * prior
        warnings = {}
    else:
        logger.warning("AttRank: no citations in the attention window, using the age prior only")
        teleport = (params.att_beta + params.att_gamma) * prior
        warnings = {"empty_attention_window": 1}
    scores, iterations, converged = _power_iterate(
        graph, params.att_alpha, teleport, params, Measure.ATTRANK
    )
    return ScoreVector(
        measure=Measure.ATTRANK,
        scores=scores,
        params=params,
        iterations_run=iterations,
        converged=converged,
        warnings=warnings,
    )


KERNELS: dict[Measure, Callable[[CitationGraph, MeasureParams], ScoreVector]] = {
    Measure.CC: citation_count,
    Measure.ICC: incubation_citation_count,
    Measure.PR: pagerank,
    Measure.RAM: ram,
    Measure.ATTRANK: attrank,
}


def compute_measure(graph: CitationGraph, params: MeasureParams, measure: Measure) -> ScoreVector:
    try:
        vector = KERNELS[measure](graph, params)
    except MeasureError:
        raise
    except Exception as e:
        raise MeasureError(measure.value, e) from e
    logger.info(
        f"{measure.value}: {len(vector)} scores, {vector.iterations_run} iterations, "
        f"converged={vector.converged}"
    )
    return vector


def compute_all(
    graph: CitationGraph, params: MeasureParams, workers: int = 1
) -> dict[Measure, ScoreVector]:
    """Run the five kernels, concurrently when ``workers > 1``.

    Returns:
        Score vectors keyed by measure, in canonical measure order.
    """
    if workers <= 1:
        return {measure: compute_measure(graph, params, measure) for measure in Measure}
    # warm the shared caches before fanning out
    _ = (graph.transition_matrix, graph.adjacency, graph.edge_targets, graph.dangling)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            measure: executor.submit(compute_measure, graph, params, measure) for measure in Measure
        }
        return {measure: futures[measure].result() for measure in Measure}
