"""Dubbing pipeline for academic video.

Turns a source lecture video into a dubbed one: separates vocals from
background, transcribes with word timestamps, translates with tone control
while preserving segment structure, synthesizes per-speaker voice clips
fitted to the original timing, lip-syncs detected face intervals, and
remuxes the result. Every neural backend sits behind a pluggable adapter;
deterministic mocks ship with the package.
"""

__version__ = "0.1.0"

from .errors import DubkitError
from .model import (
    TimeInterval,
    ToneMode,
    Transcript,
    TranscriptSegment,
    TrackKind,
    WordTiming,
    validate_transcript,
)
from .subtitles import SubtitleFormat, emit_subtitles, parse_subtitles
from .alignment import PlacementPlan, SpeechRateModel, StretchPolicy, plan_placement
from .translation import TranslationOptions, translate_segments
from .pipeline import PipelineRunner, PipelineSettings
from .storage import ArtifactStore, ProjectRepository
from .config import ServiceConfig, load_config

__all__ = [
    "__version__",
    "DubkitError",
    "TimeInterval",
    "ToneMode",
    "Transcript",
    "TranscriptSegment",
    "TrackKind",
    "WordTiming",
    "validate_transcript",
    "SubtitleFormat",
    "emit_subtitles",
    "parse_subtitles",
    "PlacementPlan",
    "SpeechRateModel",
    "StretchPolicy",
    "plan_placement",
    "TranslationOptions",
    "translate_segments",
    "PipelineRunner",
    "PipelineSettings",
    "ArtifactStore",
    "ProjectRepository",
    "ServiceConfig",
    "load_config",
]
