"""Top-k rankings and their pairwise correlations."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from app.models.scores import Measure

TIE_RULE = "score desc, node id asc"


@dataclass(frozen=True, eq=False)
class TopKRanking:
    """The best ``k`` node IDs of a measure, best first."""

    measure: Measure
    k: int
    entries: np.ndarray
    tie_rule: str = TIE_RULE


@dataclass(frozen=True)
class RankCorrelation:
    value: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric matrix of top-k correlations."""

    measures: list[Measure]
    values: np.ndarray
    degenerate: np.ndarray
    k: int

    def value(self, first: Measure, second: Measure) -> float:
        return float(self.values[self.measures.index(first), self.measures.index(second)])

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        tags = [measure.value for measure in self.measures]
        writer.writerow(["measure", *tags])
        for tag, row in zip(tags, self.values):
            writer.writerow([tag, *(f"{value:.17g}" for value in row)])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        tags = [measure.value for measure in self.measures]
        return {
            "k": self.k,
            "measures": tags,
            "values": self.values.tolist(),
            "pairs": [
                {
                    "first": tags[i],
                    "second": tags[j],
                    "rho_min": float(self.values[i, j]),
                    "degenerate": bool(self.degenerate[i, j]),
                }
                for i in range(len(tags))
                for j in range(i + 1, len(tags))
            ],
        }
