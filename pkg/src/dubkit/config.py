"""Service configuration: one YAML file plus ``DUBKIT_``-prefixed
environment overrides, validated up front so startup fails with the exact
offending field."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal, Mapping

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .alignment import SpeechRateModel, StretchPolicy
from .errors import ConfigError
from .pipeline import PipelineSettings

ENV_PREFIX = "DUBKIT_"


class EndpointConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base_url: str
    token: str | None = None
    timeout_s: float = Field(default=60.0, gt=0)
    retries: int = Field(default=2, ge=0)


class StretchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    f_min: float = 0.80
    f_max: float = 1.25
    max_borrow_ms: int = Field(default=500, ge=0)
    min_inter_gap_ms: int = Field(default=50, ge=0)


class ServiceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    host: str = "127.0.0.1"
    port: int = Field(default=8000, ge=1, le=65535)
    max_upload_bytes: int = Field(default=2 * 1024**3, ge=1)
    artifact_root: Path = Path("dubkit-data")
    adapter_mode: Literal["mock", "external"] = "mock"
    adapters: dict[str, EndpointConfig] = Field(default_factory=dict)
    stretch: StretchConfig = Field(default_factory=StretchConfig)
    default_speech_rate: float = Field(default=4.0, gt=1.0, lt=12.0)
    speech_rates: dict[str, float] = Field(default_factory=dict)
    batch_size: int = Field(default=12, ge=1)
    max_attempts: int = Field(default=2, ge=1)
    background_gain: float = Field(default=1.0, ge=0)
    merge_gap_ms: int = Field(default=300, ge=0)
    merge_max_chars: int = Field(default=200, ge=0)
    mock_seed: int = 1234

    def stretch_policy(self) -> StretchPolicy:
        return StretchPolicy(
            f_min=self.stretch.f_min,
            f_max=self.stretch.f_max,
            max_borrow_ms=self.stretch.max_borrow_ms,
            min_inter_gap_ms=self.stretch.min_inter_gap_ms,
        )

    def rate_model(self) -> SpeechRateModel:
        return SpeechRateModel(
            default_rate=self.default_speech_rate, rates=dict(self.speech_rates)
        )

    def pipeline_settings(self) -> PipelineSettings:
        return PipelineSettings(
            stretch_policy=self.stretch_policy(),
            rates=self.rate_model(),
            merge_gap_ms=self.merge_gap_ms,
            merge_max_chars=self.merge_max_chars,
            batch_size=self.batch_size,
            max_attempts=self.max_attempts,
            background_gain=self.background_gain,
        )


def _set_nested(target: dict, path: list[str], value: str) -> None:
    cursor = target
    for key in path[:-1]:
        existing = cursor.get(key)
        if not isinstance(existing, dict):
            existing = {}
            cursor[key] = existing
        cursor = existing
    cursor[path[-1]] = value


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ServiceConfig:
    """YAML file merged with ``DUBKIT_*`` environment variables; nested keys
    use double underscores (``DUBKIT_STRETCH__F_MIN=0.7``)."""
    data: dict = {}
    if path is not None:
        raw = Path(path).read_text(encoding="utf-8")
        loaded = yaml.safe_load(raw)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"config root must be a mapping, got {type(loaded).__name__}")
        data = loaded
    source = env if env is not None else os.environ
    for name, value in sorted(source.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        parts = name[len(ENV_PREFIX):].lower().split("__")
        _set_nested(data, parts, value)
    try:
        config = ServiceConfig(**data)
    except ValidationError as exc:
        lines = [
            ".".join(str(piece) for piece in issue["loc"]) + ": " + issue["msg"]
            for issue in exc.errors()
        ]
        raise ConfigError("invalid configuration: " + "; ".join(lines)) from exc
    try:
        config.stretch_policy()
        config.rate_model()
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return config
