"""Core domain model: time intervals, transcripts, tracks, and projects.

All time arithmetic is integer milliseconds. Domain values are immutable
dataclasses; pipeline code evolves a project with ``dataclasses.replace``.
The canonical transcript JSON produced here is the interchange format
shared by the subtitle codecs, the engine adapters, and the HTTP service.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

from .errors import CanonicalJsonError, InvalidIntervalError, TranscriptInvalidError

RawInterval = Union["TimeInterval", tuple]


@dataclass(frozen=True, slots=True)
class TimeInterval:
    """Half-open interval [start_ms, end_ms) in integer milliseconds."""

    start_ms: int
    end_ms: int

    def __post_init__(self):
        if not isinstance(self.start_ms, int) or not isinstance(self.end_ms, int):
            raise InvalidIntervalError(
                f"interval bounds must be integers, got ({self.start_ms!r}, {self.end_ms!r})"
            )
        if self.start_ms < 0:
            raise InvalidIntervalError(f"interval start {self.start_ms} is negative")
        if self.start_ms >= self.end_ms:
            raise InvalidIntervalError(
                f"interval start {self.start_ms} must be before end {self.end_ms}"
            )

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    def overlaps(self, other: "TimeInterval") -> bool:
        return self.start_ms < other.end_ms and other.start_ms < self.end_ms

    def touches(self, other: "TimeInterval") -> bool:
        """True when the intervals overlap or share an endpoint."""
        return self.start_ms <= other.end_ms and other.start_ms <= self.end_ms

    def envelope(self, other: "TimeInterval") -> "TimeInterval":
        return TimeInterval(min(self.start_ms, other.start_ms), max(self.end_ms, other.end_ms))

    def intersect(self, other: "TimeInterval") -> "TimeInterval | None":
        start = max(self.start_ms, other.start_ms)
        end = min(self.end_ms, other.end_ms)
        if start >= end:
            return None
        return TimeInterval(start, end)

    def contains(self, other: "TimeInterval") -> bool:
        return self.start_ms <= other.start_ms and other.end_ms <= self.end_ms


def normalize_intervals(raw: Iterable[RawInterval]) -> list[TimeInterval]:
    """Sort raw intervals and coalesce overlapping or touching neighbours.

    Accepts ``TimeInterval`` values or plain ``(start_ms, end_ms)`` pairs,
    as produced by detector backends. Invalid pairs raise
    ``InvalidIntervalError`` naming the offending index.
    """
    items: list[TimeInterval] = []
    for index, entry in enumerate(raw):
        if isinstance(entry, TimeInterval):
            items.append(entry)
            continue
        try:
            start, end = entry
            items.append(TimeInterval(int(start), int(end)))
        except (InvalidIntervalError, TypeError, ValueError) as exc:
            raise InvalidIntervalError(f"interval {index} is invalid: {exc}", index=index) from exc
    items.sort(key=lambda iv: (iv.start_ms, iv.end_ms))
    merged: list[TimeInterval] = []
    for interval in items:
        if merged and interval.start_ms <= merged[-1].end_ms:
            merged[-1] = merged[-1].envelope(interval)
        else:
            merged.append(interval)
    return merged


def filter_pad_intervals(
    intervals: Sequence[TimeInterval],
    min_duration_ms: int,
    pad_ms: int,
    bounds: TimeInterval,
) -> list[TimeInterval]:
    """Drop intervals shorter than ``min_duration_ms``, pad the survivors on
    both sides, clamp them to ``bounds``, and re-normalize.

    Expects normalized input (see ``normalize_intervals``).
    """
    if min_duration_ms < 0 or pad_ms < 0:
        raise ValueError("min_duration_ms and pad_ms must be non-negative")
    padded: list[TimeInterval] = []
    for interval in intervals:
        if interval.duration_ms < min_duration_ms:
            continue
        start = max(bounds.start_ms, interval.start_ms - pad_ms)
        end = min(bounds.end_ms, interval.end_ms + pad_ms)
        if start < end:
            padded.append(TimeInterval(start, end))
    return normalize_intervals(padded)


@dataclass(frozen=True, slots=True)
class WordTiming:
    word: str
    interval: TimeInterval

    def __post_init__(self):
        if not self.word.strip():
            raise ValueError("word must be non-empty after trimming")


@dataclass(frozen=True, slots=True)
class TranscriptSegment:
    id: str
    speaker: str
    interval: TimeInterval
    text: str
    words: tuple[WordTiming, ...] = ()

    def __post_init__(self):
        if not isinstance(self.words, tuple):
            object.__setattr__(self, "words", tuple(self.words))


@dataclass(frozen=True, slots=True)
class Transcript:
    language: str
    segments: tuple[TranscriptSegment, ...] = ()

    def __post_init__(self):
        if not isinstance(self.segments, tuple):
            object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def speakers(self) -> list[str]:
        """Distinct speaker labels in first-appearance order."""
        seen: dict[str, None] = {}
        for segment in self.segments:
            seen.setdefault(segment.speaker, None)
        return list(seen)


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    rule: str
    segment_ids: tuple[str, ...]
    detail: str


RULE_SEGMENTS_SORTED = "segments-sorted"
RULE_SPEAKER_OVERLAP = "same-speaker-overlap"
RULE_DUPLICATE_ID = "duplicate-segment-id"
RULE_WORDS_ORDERED = "words-ordered"
RULE_WORDS_OUTSIDE = "words-outside-segment"
RULE_WORDS_TEXT = "words-text-mismatch"


def _strip_punctuation(text: str) -> str:
    kept = []
    for ch in text:
        if unicodedata.category(ch).startswith("P"):
            continue
        kept.append(ch)
    return " ".join("".join(kept).split())


def validate_transcript(transcript: Transcript) -> list[ValidationIssue]:
    """Check transcript invariants; an empty report means the transcript is valid.

    The report order is deterministic: segments in list order, and for each
    segment the rules in a fixed sequence.
    """
    issues: list[ValidationIssue] = []
    seen_ids: dict[str, int] = {}
    last_end_by_speaker: dict[str, tuple[int, str]] = {}
    prev_start: int | None = None
    for position, segment in enumerate(transcript.segments):
        if segment.id in seen_ids:
            issues.append(
                ValidationIssue(
                    RULE_DUPLICATE_ID,
                    (segment.id,),
                    f"segment id {segment.id!r} appears more than once",
                )
            )
        else:
            seen_ids[segment.id] = position

        if prev_start is not None and segment.interval.start_ms < prev_start:
            issues.append(
                ValidationIssue(
                    RULE_SEGMENTS_SORTED,
                    (segment.id,),
                    f"segment {segment.id!r} starts before its predecessor",
                )
            )
        prev_start = segment.interval.start_ms

        previous = last_end_by_speaker.get(segment.speaker)
        if previous is not None:
            max_end, holder = previous
            if segment.interval.start_ms < max_end:
                issues.append(
                    ValidationIssue(
                        RULE_SPEAKER_OVERLAP,
                        (holder, segment.id),
                        f"segments {holder!r} and {segment.id!r} overlap for speaker {segment.speaker!r}",
                    )
                )
        if previous is None or segment.interval.end_ms > previous[0]:
            last_end_by_speaker[segment.speaker] = (segment.interval.end_ms, segment.id)

        issues.extend(_validate_words(segment))
    return issues


def _validate_words(segment: TranscriptSegment) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    if not segment.words:
        return issues
    ordered = True
    for prev, word in zip(segment.words, segment.words[1:]):
        if word.interval.start_ms < prev.interval.end_ms:
            ordered = False
            break
    if not ordered:
        issues.append(
            ValidationIssue(
                RULE_WORDS_ORDERED,
                (segment.id,),
                f"word timings in segment {segment.id!r} overlap or are out of order",
            )
        )
    inside = all(segment.interval.contains(word.interval) for word in segment.words)
    if not inside:
        issues.append(
            ValidationIssue(
                RULE_WORDS_OUTSIDE,
                (segment.id,),
                f"word timings in segment {segment.id!r} extend outside the segment interval",
            )
        )
    joined = _strip_punctuation(" ".join(word.word for word in segment.words))
    if joined != _strip_punctuation(segment.text):
        issues.append(
            ValidationIssue(
                RULE_WORDS_TEXT,
                (segment.id,),
                f"words of segment {segment.id!r} disagree with its text",
            )
        )
    return issues


def merge_adjacent_segments(
    transcript: Transcript, max_gap_ms: int, max_chars: int
) -> Transcript:
    """Merge same-speaker neighbouring segments separated by at most
    ``max_gap_ms`` when the joined text stays within ``max_chars``.

    The merged segment keeps the first constituent's id, joins texts with a
    single space, and takes the envelope of the intervals. Word timings are
    concatenated only when every constituent carries them; otherwise they
    are dropped so the merged segment stays self-consistent.
    """
    report = validate_transcript(transcript)
    if report:
        raise TranscriptInvalidError("cannot merge an invalid transcript", report=report)
    merged: list[TranscriptSegment] = []
    for segment in transcript.segments:
        if merged:
            last = merged[-1]
            gap = segment.interval.start_ms - last.interval.end_ms
            combined = len(last.text) + 1 + len(segment.text)
            if (
                last.speaker == segment.speaker
                and 0 <= gap <= max_gap_ms
                and combined <= max_chars
            ):
                words = last.words + segment.words if last.words and segment.words else ()
                merged[-1] = TranscriptSegment(
                    id=last.id,
                    speaker=last.speaker,
                    interval=last.interval.envelope(segment.interval),
                    text=last.text + " " + segment.text,
                    words=words,
                )
                continue
        merged.append(segment)
    return Transcript(language=transcript.language, segments=tuple(merged))


class TrackKind(str, Enum):
    VIDEO = "video"
    VOCALS = "vocals"
    BACKGROUND = "background"
    TRANSCRIPT = "transcript"
    TRANSLATED_TRANSCRIPT = "translated_transcript"
    DUBBED_AUDIO = "dubbed_audio"
    LIPSYNCED_VIDEO = "lipsynced_video"


class ToneMode(str, Enum):
    FORMAL = "formal"
    INFORMAL = "informal"
    FRIENDLY = "friendly"


@dataclass(frozen=True, slots=True)
class Track:
    kind: TrackKind
    artifact: str
    produced_by: str
    media_type: str
    enabled: bool = True


@dataclass(frozen=True, slots=True)
class SpeakerLabel:
    id: str
    reference_clip: str | None = None


@dataclass(frozen=True, slots=True)
class StageState:
    """Lifecycle state of a project; ``failed`` carries the failing stage."""

    name: str
    failed_stage: str | None = None
    reason: str | None = None

    @classmethod
    def failed(cls, stage: str, reason: str) -> "StageState":
        return cls("failed", failed_stage=stage, reason=reason)

    @property
    def is_failed(self) -> bool:
        return self.name == "failed"

    def describe(self) -> str:
        if self.is_failed:
            return f"failed({self.failed_stage}: {self.reason})"
        return self.name


STATE_NEW = StageState("new")
STATE_ANALYZED = StageState("analyzed")
STATE_TRANSLATED = StageState("translated")
STATE_CONVERTED = StageState("converted")
STATE_LIPSYNCED = StageState("lipsynced")
STATE_EXPORTED = StageState("exported")

STATE_ORDER = ("new", "analyzed", "translated", "converted", "lipsynced", "exported")


@dataclass(frozen=True, slots=True)
class Project:
    id: str
    source_asset: str
    target_language: str
    tone: ToneMode
    multi_speaker: bool
    video_duration_ms: int
    source_language: str | None = None
    stage: StageState = STATE_NEW
    tracks: Mapping[TrackKind, Track] = field(default_factory=dict)
    speakers: tuple[SpeakerLabel, ...] = ()
    placement_plan: str | None = None
    export_artifact: str | None = None

    def __post_init__(self):
        if self.source_language is not None and self.source_language == self.target_language:
            raise ValueError("source and target language must differ")
        if self.video_duration_ms <= 0:
            raise ValueError("video duration must be positive")

    def track(self, kind: TrackKind) -> Track | None:
        return self.tracks.get(kind)


# --- canonical transcript JSON ---------------------------------------------

_SEGMENT_KEYS = ("id", "speaker", "start_ms", "end_ms", "text", "words")
_WORD_KEYS = ("word", "start_ms", "end_ms")


def transcript_to_dict(transcript: Transcript) -> dict:
    return {
        "language": transcript.language,
        "segments": [
            {
                "id": segment.id,
                "speaker": segment.speaker,
                "start_ms": segment.interval.start_ms,
                "end_ms": segment.interval.end_ms,
                "text": segment.text,
                "words": [
                    {
                        "word": word.word,
                        "start_ms": word.interval.start_ms,
                        "end_ms": word.interval.end_ms,
                    }
                    for word in segment.words
                ],
            }
            for segment in transcript.segments
        ],
    }


def transcript_to_json(transcript: Transcript) -> str:
    return json.dumps(transcript_to_dict(transcript), ensure_ascii=False, indent=2) + "\n"


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise CanonicalJsonError(f"missing required field {path}.{key}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed: Sequence[str], path: str, strict: bool):
    if not strict:
        return
    for key in mapping:
        if key not in allowed:
            raise CanonicalJsonError(f"unknown field {path}.{key}")


def transcript_from_dict(data: dict, strict: bool = True) -> Transcript:
    if not isinstance(data, dict):
        raise CanonicalJsonError("transcript document must be a JSON object")
    _reject_unknown(data, ("language", "segments"), "$", strict)
    language = _require(data, "language", "$")
    raw_segments = _require(data, "segments", "$")
    if not isinstance(language, str) or not isinstance(raw_segments, list):
        raise CanonicalJsonError("transcript fields have wrong types")
    segments = []
    for i, raw in enumerate(raw_segments):
        path = f"$.segments[{i}]"
        if not isinstance(raw, dict):
            raise CanonicalJsonError(f"{path} must be an object")
        _reject_unknown(raw, _SEGMENT_KEYS, path, strict)
        words = []
        for j, raw_word in enumerate(raw.get("words") or []):
            word_path = f"{path}.words[{j}]"
            if not isinstance(raw_word, dict):
                raise CanonicalJsonError(f"{word_path} must be an object")
            _reject_unknown(raw_word, _WORD_KEYS, word_path, strict)
            try:
                words.append(
                    WordTiming(
                        word=str(_require(raw_word, "word", word_path)),
                        interval=TimeInterval(
                            _require(raw_word, "start_ms", word_path),
                            _require(raw_word, "end_ms", word_path),
                        ),
                    )
                )
            except (InvalidIntervalError, ValueError) as exc:
                raise CanonicalJsonError(f"{word_path} is invalid: {exc}") from exc
        try:
            segments.append(
                TranscriptSegment(
                    id=str(_require(raw, "id", path)),
                    speaker=str(_require(raw, "speaker", path)),
                    interval=TimeInterval(
                        _require(raw, "start_ms", path), _require(raw, "end_ms", path)
                    ),
                    text=str(_require(raw, "text", path)),
                    words=tuple(words),
                )
            )
        except InvalidIntervalError as exc:
            raise CanonicalJsonError(f"{path} has an invalid interval: {exc}") from exc
    return Transcript(language=language, segments=tuple(segments))


def transcript_from_json(text: str, strict: bool = True) -> Transcript:
    try:
        data = json.loads(text.lstrip("﻿"))
    except json.JSONDecodeError as exc:
        raise CanonicalJsonError(f"not valid JSON: {exc}") from exc
    return transcript_from_dict(data, strict=strict)
