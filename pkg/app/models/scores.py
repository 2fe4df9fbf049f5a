"""Measure tags, tunables and score vectors."""

from dataclasses import dataclass, field
from datetime import date
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Aspect(str, Enum):
    """Impact aspect a measure captures."""

    POPULARITY = "popularity"
    INFLUENCE = "influence"
    IMPULSE = "impulse"


class Measure(str, Enum):
    """The five impact measures, in canonical order."""

    CC = "CC"
    ICC = "iCC"
    PR = "PR"
    RAM = "RAM"
    ATTRANK = "AttRank"

    @property
    def aspect(self) -> Aspect:
        return _ASPECTS[self]

    @property
    def key(self) -> str:
        """Field name used in API responses."""
        return _API_KEYS[self]


_ASPECTS = {
    Measure.CC: Aspect.INFLUENCE,
    Measure.ICC: Aspect.IMPULSE,
    Measure.PR: Aspect.INFLUENCE,
    Measure.RAM: Aspect.POPULARITY,
    Measure.ATTRANK: Aspect.POPULARITY,
}

_API_KEYS = {
    Measure.CC: "cc",
    Measure.ICC: "icc",
    Measure.PR: "pagerank",
    Measure.RAM: "ram",
    Measure.ATTRANK: "attrank",
}

ITERATIVE_MEASURES = frozenset({Measure.PR, Measure.ATTRANK})


class MeasureParams(BaseModel):
    """All tunables of the five measures."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    current_year: int = Field(
        default_factory=lambda: date.today().year,
        ge=1000,
        description="Current year t_c",
    )
    incubation_window: int = Field(default=3, ge=1, description="iCC window y in years")
    pr_alpha: float = Field(default=0.5, ge=0, le=1, description="PageRank damping")
    pr_epsilon: float = Field(
        default=1e-12, gt=0, description="L1 convergence threshold shared by PR and AttRank"
    )
    ram_gamma: float = Field(default=0.6, gt=0, lt=1, description="RAM yearly decay")
    att_alpha: float = Field(default=0.2, ge=0, le=1, description="AttRank citation weight")
    att_beta: float = Field(default=0.5, ge=0, le=1, description="AttRank attention weight")
    att_gamma: float = Field(default=0.3, ge=0, le=1, description="AttRank age-prior weight")
    att_rho: float = Field(default=0.16, gt=0, description="AttRank age-decay exponent")
    att_window: int | None = Field(
        default=None, ge=1, description="Recent-attention years, defaults to incubation_window"
    )
    max_iterations: int = Field(default=200, ge=1)

    @model_validator(mode="after")
    def check_attrank_weights(self) -> "MeasureParams":
        total = self.att_alpha + self.att_beta + self.att_gamma
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"att_alpha + att_beta + att_gamma must equal 1, got {total!r}")
        if self.att_alpha >= 1.0:
            raise ValueError("att_alpha must be < 1 for AttRank to converge")
        return self

    @property
    def attention_window(self) -> int:
        return self.att_window if self.att_window is not None else self.incubation_window


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Scores of one measure indexed by node ID, with the parameters that produced them."""

    measure: Measure
    scores: np.ndarray
    params: MeasureParams
    iterations_run: int = 0
    converged: bool = True
    warnings: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.scores)

    def summary(self) -> dict:
        """JSON-ready description for stage reports."""
        return {
            "measure": self.measure.value,
            "aspect": self.measure.aspect.value,
            "nodes": len(self),
            "iterations_run": self.iterations_run,
            "converged": self.converged,
            "warnings": dict(self.warnings),
        }
