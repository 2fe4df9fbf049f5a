"""Pipeline and service configuration.

Values are resolved from, highest precedence first: keyword overrides (CLI
flags), ``IMPACT_*`` environment variables (``__`` separates nested keys, e.g.
``IMPACT_MEASURES__PR_ALPHA``), a ``.env`` file, a key=value config file and
the defaults below.
"""

import os
from contextvars import ContextVar
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from app.errors import ConfigError
from app.models.export import GRAPH_ID_PATTERN
from app.models.ingest import SourceDescriptor
from app.models.scores import MeasureParams

ENV_PREFIX = "IMPACT_"
SECTIONS = ("measures", "serve", "sources")
PATH_KEYS = {("sources", "metadata"), ("sources", "edges"), ("serve", "dumps")}

_config_file: ContextVar[Path | None] = ContextVar("config_file", default=None)


class SourceSettings(BaseModel):
    """File pair of one source."""

    metadata: Path
    edges: Path


class ServeSettings(BaseModel):
    """HTTP service options."""

    host: str = "127.0.0.1"
    port: int = Field(default=8000, ge=1, le=65535)
    batch_cap: int = Field(default=1000, ge=1, description="Maximum DOIs per batch request")
    dumps: Path | None = Field(default=None, description="Directory holding the five dumps")


def parse_config_file(path: Path) -> dict[str, Any]:
    """Read ``section.key = value`` lines into a nested mapping.

    Top-level keys carry no section. Source files are declared as
    ``sources.<name>.metadata`` and ``sources.<name>.edges``; relative paths
    there and in ``serve.dumps`` resolve against the config file's directory.

    Raises:
        ConfigError: on unreadable files, lines without ``=`` or unknown keys.
    """
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e

    values: dict[str, Any] = {}
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_number}: expected 'key = value'")
        parts = [part.strip() for part in key.strip().split(".")]
        value = value.strip()

        if len(parts) == 1:
            if parts[0] not in PipelineConfig.model_fields or parts[0] in SECTIONS:
                raise ConfigError(f"{path}:{line_number}: unknown key {parts[0]!r}")
            values[parts[0]] = value
            continue
        section = parts[0]
        if section not in SECTIONS:
            raise ConfigError(f"{path}:{line_number}: unknown section {section!r}")
        expected_depth = 3 if section == "sources" else 2
        if len(parts) != expected_depth:
            raise ConfigError(f"{path}:{line_number}: malformed key {key.strip()!r}")
        if (section, parts[-1]) in PATH_KEYS:
            value = str((path.parent / value).resolve())
        target = values.setdefault(section, {})
        for part in parts[1:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = value
    return values


class KeyValueConfigSource(PydanticBaseSettingsSource):
    """Settings source backed by the config file of the current ``load_config`` call."""

    def get_field_value(self, field: FieldInfo, field_name: str) -> tuple[Any, str, bool]:
        return None, field_name, False

    def __call__(self) -> dict[str, Any]:
        path = _config_file.get()
        return parse_config_file(path) if path is not None else {}


class PipelineConfig(BaseSettings):
    """Everything one run of the pipeline or the service needs."""

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    sources: dict[str, SourceSettings] = Field(default_factory=dict)
    measures: MeasureParams = Field(default_factory=MeasureParams)
    out_dir: Path = Path("out")
    graph_id: str = Field(default="graph", pattern=GRAPH_ID_PATTERN)
    compress: bool = True
    k: int | None = Field(default=None, ge=1, description="Top-k size; derived from top_percent when unset")
    top_percent: float = Field(default=1.0, gt=0, le=100)
    correlation_out: Path | None = Field(
        default=None, description="Directory for correlation.csv and correlation.json; out_dir/correlate when unset"
    )
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    serve: ServeSettings = Field(default_factory=ServeSettings)
    log_level: str = Field(default="INFO", pattern=r"^(?i:debug|info|warning|error|critical)$")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return init_settings, env_settings, dotenv_settings, KeyValueConfigSource(settings_cls)

    def source_descriptors(self) -> list[SourceDescriptor]:
        return [
            SourceDescriptor(name=name, metadata_path=source.metadata, edges_path=source.edges)
            for name, source in sorted(self.sources.items())
        ]

    def require_sources(self) -> list[SourceDescriptor]:
        """Source descriptors, checked for existence.

        Raises:
            ConfigError: when no source is configured or a file is missing.
        """
        descriptors = self.source_descriptors()
        if not descriptors:
            raise ConfigError("No sources configured")
        for descriptor in descriptors:
            missing = descriptor.missing_paths()
            if missing:
                raise ConfigError(f"Source {descriptor.name}: missing {', '.join(map(str, missing))}")
        return descriptors


def describe_validation_error(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'config'}: {item['msg']}" for item in error.errors()
    )


def load_config(config_file: Path | None = None, **overrides: Any) -> PipelineConfig:
    """Resolve and validate the configuration.

    Raises:
        ConfigError: when any source yields an invalid value.
    """
    token = _config_file.set(config_file)
    try:
        return PipelineConfig(**overrides)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {describe_validation_error(e)}") from e
    finally:
        _config_file.reset(token)


@lru_cache
def get_settings() -> PipelineConfig:
    """Get cached settings for the HTTP service."""
    return load_config()
