"""DOI normalization, scalar and vectorized."""

import re
from typing import NewType

import pandas as pd

from app.errors import InvalidDoiError

Doi = NewType("Doi", str)

DOI_PATTERN = re.compile(r"^10\.\d+(?:\.\d+)*/\S+$")
RESOLVER_PREFIX = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:)")


def normalize_doi(raw: str) -> Doi:
    """Lowercase, trim and strip resolver prefixes from a DOI.

    Raises:
        InvalidDoiError: when the cleaned value is not ``10.<registrant>/<suffix>``.
    """
    if not isinstance(raw, str):
        raise InvalidDoiError(f"Not a DOI: {raw!r}")
    value = RESOLVER_PREFIX.sub("", raw.strip().lower()).strip()
    if not DOI_PATTERN.match(value):
        raise InvalidDoiError(f"Not a DOI: {raw!r}")
    return Doi(value)


def is_doi(raw: str) -> bool:
    try:
        normalize_doi(raw)
    except InvalidDoiError:
        return False
    return True


def normalize_doi_series(values: pd.Series) -> pd.Series:
    """Vectorized ``normalize_doi``; malformed entries become ``<NA>``."""
    cleaned = (
        values.astype("string")
        .str.strip()
        .str.lower()
        .str.replace(RESOLVER_PREFIX.pattern, "", regex=True)
        .str.strip()
    )
    valid = cleaned.str.match(DOI_PATTERN.pattern).fillna(False).astype(bool)
    return cleaned.where(valid)
