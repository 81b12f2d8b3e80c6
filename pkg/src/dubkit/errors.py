"""Exception types shared across the package.

Every error carries a stable machine code so the HTTP service and the CLI
can report failures without string-matching exception text.
"""

from __future__ import annotations


class DubkitError(Exception):
    """Base class for all package errors."""

    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class InvalidIntervalError(DubkitError):
    code = "INVALID_INTERVAL"


class TranscriptInvalidError(DubkitError):
    code = "TRANSCRIPT_INVALID"

    def __init__(self, message: str, report=None, **details):
        super().__init__(message, **details)
        self.report = list(report or [])


class CanonicalJsonError(DubkitError):
    code = "CANONICAL_JSON"


class MalformedCueError(DubkitError):
    code = "MALFORMED_CUE"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}", line=line, reason=reason)
        self.line = line
        self.reason = reason


class EmptyFileError(DubkitError):
    code = "EMPTY_FILE"


class TimestampOverflowError(DubkitError):
    code = "TIMESTAMP_OVERFLOW"


class SeparatorCollisionError(DubkitError):
    code = "SEPARATOR_COLLISION"


class MissingAnswerMarkerError(DubkitError):
    code = "MISSING_ANSWER_MARKER"


class CountMismatchError(DubkitError):
    code = "COUNT_MISMATCH"

    def __init__(self, got: int, expected: int):
        super().__init__(f"expected {expected} segments, got {got}", got=got, expected=expected)
        self.got = got
        self.expected = expected


class EmptySegmentError(DubkitError):
    code = "EMPTY_SEGMENT"

    def __init__(self, index: int):
        super().__init__(f"segment {index} is empty", index=index)
        self.index = index


class TranslationFailedError(DubkitError):
    code = "TRANSLATION_FAILED"


class MissingDurationError(DubkitError):
    code = "MISSING_DURATION"

    def __init__(self, segment_id: str):
        super().__init__(f"no synthesized duration for segment {segment_id}", segment_id=segment_id)
        self.segment_id = segment_id


class PlanningError(DubkitError):
    code = "PLANNING"


class AudioError(DubkitError):
    code = "AUDIO"


class MissingClipError(DubkitError):
    code = "MISSING_CLIP"

    def __init__(self, segment_id: str):
        super().__init__(f"no synthesized clip for segment {segment_id}", segment_id=segment_id)
        self.segment_id = segment_id


class MediaError(DubkitError):
    code = "MEDIA"


class AdapterUnavailableError(DubkitError):
    code = "ADAPTER_UNAVAILABLE"


class OutOfOrderError(DubkitError):
    code = "OUT_OF_ORDER"

    def __init__(self, requested: str, state: str):
        super().__init__(
            f"stage '{requested}' cannot run from state '{state}'",
            requested=requested,
            state=state,
        )
        self.requested = requested
        self.state = state


class MissingTrackError(DubkitError):
    code = "MISSING_TRACK"

    def __init__(self, kind: str):
        super().__init__(f"project has no '{kind}' track", kind=kind)
        self.kind = kind


class StageExecutionError(DubkitError):
    code = "STAGE_FAILED"


class MissingArtifactError(DubkitError):
    code = "MISSING_ARTIFACT"


class ConfigError(DubkitError):
    code = "CONFIG"
