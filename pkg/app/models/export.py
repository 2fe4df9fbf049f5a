"""Dump file naming.

Filename grammar::

    name    = measure "_" graph_id { "_" param } ".tsv" [ ".gz" ]
    param   = token value

``measure`` is one of the measure tags, ``graph_id`` matches ``[a-z0-9_]+``
and each measure has a fixed, ordered list of parameter tokens, which is
what makes the name parseable despite underscores in ``graph_id``.
"""

import re

from pydantic import BaseModel, Field

from app.errors import DumpFormatError
from app.models.scores import Measure, MeasureParams, ScoreVector

GRAPH_ID_PATTERN = r"^[a-z0-9_]+$"

# (filename token, MeasureParams attribute) in filename order
DUMP_PARAMS: dict[Measure, tuple[tuple[str, str], ...]] = {
    Measure.CC: (),
    Measure.ICC: (("y", "incubation_window"),),
    Measure.PR: (("a", "pr_alpha"), ("error", "pr_epsilon")),
    Measure.RAM: (("gamma", "ram_gamma"), ("tc", "current_year")),
    Measure.ATTRANK: (
        ("a", "att_alpha"),
        ("b", "att_beta"),
        ("c", "att_gamma"),
        ("rho", "att_rho"),
        ("y", "attention_window"),
        ("tc", "current_year"),
        ("error", "pr_epsilon"),
    ),
}

_EXPONENT = re.compile(r"e([+-]?)0*(\d)")


def format_param_value(value: int | float) -> str:
    """Shortest round-trip text: ``0.5``, ``1e-12``, ``2020``."""
    if isinstance(value, int):
        return str(value)
    text = repr(float(value))
    return _EXPONENT.sub(lambda m: f"e{m.group(1).replace('+', '')}{m.group(2)}", text)


class DumpSpec(BaseModel):
    """Identity of one dump file."""

    measure: Measure
    graph_id: str = Field(..., pattern=GRAPH_ID_PATTERN)
    params: dict[str, str] = Field(default_factory=dict, description="token -> value text")
    compressed: bool = True

    @classmethod
    def for_vector(cls, vector: ScoreVector, graph_id: str, compressed: bool = True) -> "DumpSpec":
        return cls(
            measure=vector.measure,
            graph_id=graph_id,
            params=dump_params(vector.measure, vector.params),
            compressed=compressed,
        )

    @property
    def filename(self) -> str:
        parts = [self.measure.value, self.graph_id]
        parts += [f"{token}{value}" for token, value in self.params.items()]
        return "_".join(parts) + (".tsv.gz" if self.compressed else ".tsv")

    @classmethod
    def parse(cls, name: str) -> "DumpSpec":
        """Invert ``filename``."""
        compressed = name.endswith(".gz")
        stem = name[:-3] if compressed else name
        if not stem.endswith(".tsv"):
            raise DumpFormatError(name, 0, "dump names end in .tsv or .tsv.gz")
        tokens = stem[: -len(".tsv")].split("_")
        try:
            measure = Measure(tokens[0])
        except ValueError:
            raise DumpFormatError(name, 0, f"unknown measure tag {tokens[0]!r}") from None
        expected = DUMP_PARAMS[measure]
        if len(tokens) < 2 + len(expected):
            raise DumpFormatError(name, 0, f"{measure.value} dumps carry {len(expected)} parameters")
        graph_id = "_".join(tokens[1 : len(tokens) - len(expected)])
        params = {}
        for (token, _), part in zip(expected, tokens[len(tokens) - len(expected) :]):
            if not part.startswith(token) or len(part) == len(token):
                raise DumpFormatError(name, 0, f"expected parameter {token!r}, found {part!r}")
            params[token] = part[len(token) :]
        return cls(measure=measure, graph_id=graph_id, params=params, compressed=compressed)


def dump_params(measure: Measure, params: MeasureParams) -> dict[str, str]:
    return {token: format_param_value(getattr(params, attr)) for token, attr in DUMP_PARAMS[measure]}
