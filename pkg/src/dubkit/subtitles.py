"""SRT, WebVTT, and canonical-JSON transcript codecs.

Emission is byte-deterministic so downloads and golden files are stable:
LF line endings, millisecond timestamps zero-padded to three digits, hours
to two. SRT has no speaker channel, so multi-speaker transcripts emit a
``[S1] `` text prefix that the parser strips; VTT uses ``<v Name>`` voice
spans. Word timings are not representable in either format and are dropped
on emit; canonical JSON is the lossless format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyFileError, MalformedCueError, TimestampOverflowError
from .model import (
    TimeInterval,
    Transcript,
    TranscriptSegment,
    transcript_from_json,
    transcript_to_json,
)

MAX_TIMESTAMP_MS = 99 * 3600_000 + 59 * 60_000 + 59_000 + 999

_TS_RE = re.compile(r"^(?:(\d{1,3}):)?(\d{1,2}):(\d{1,2})[.,](\d{3})$")
_SRT_SPEAKER_RE = re.compile(r"^\[([^\[\]]+)\] (.*)$", re.DOTALL)
_VTT_VOICE_RE = re.compile(r"^<v(?:\.[^ >]*)?\s+([^>]+)>(.*)$", re.DOTALL)


class SubtitleFormat(str, Enum):
    SRT = "srt"
    VTT = "vtt"
    CANONICAL_JSON = "json"


@dataclass(frozen=True, slots=True)
class ParseWarning:
    line: int
    reason: str


@dataclass(frozen=True, slots=True)
class ParseResult:
    transcript: Transcript
    warnings: tuple[ParseWarning, ...] = ()


@dataclass
class _Cue:
    start_ms: int
    end_ms: int
    speaker: str
    text: str


def _format_timestamp(ms: int, separator: str) -> str:
    if ms > MAX_TIMESTAMP_MS:
        raise TimestampOverflowError(f"timestamp {ms} ms exceeds 99:59:59{separator}999")
    hours, rest = divmod(ms, 3600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}{separator}{millis:03d}"


def _parse_timestamp(token: str) -> int | None:
    match = _TS_RE.match(token.strip())
    if not match:
        return None
    hours = int(match.group(1)) if match.group(1) else 0
    minutes, seconds, millis = int(match.group(2)), int(match.group(3)), int(match.group(4))
    if minutes > 59 or seconds > 59:
        return None
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis


def _uses_speaker_tags(transcript: Transcript) -> bool:
    """Tag speakers when there are several, or when the sole speaker is not
    the default "S1" — otherwise re-parsing would silently relabel it."""
    speakers = {segment.speaker for segment in transcript.segments}
    return len(speakers) > 1 or bool(speakers - {"S1"})


def emit_subtitles(transcript: Transcript, fmt: SubtitleFormat) -> str:
    if fmt == SubtitleFormat.CANONICAL_JSON:
        return transcript_to_json(transcript)
    if fmt == SubtitleFormat.SRT:
        return _emit_srt(transcript)
    if fmt == SubtitleFormat.VTT:
        return _emit_vtt(transcript)
    raise ValueError(f"unknown subtitle format: {fmt!r}")


def _emit_srt(transcript: Transcript) -> str:
    tagged = _uses_speaker_tags(transcript)
    blocks = []
    for index, segment in enumerate(transcript.segments, start=1):
        start = _format_timestamp(segment.interval.start_ms, ",")
        end = _format_timestamp(segment.interval.end_ms, ",")
        text = f"[{segment.speaker}] {segment.text}" if tagged else segment.text
        blocks.append(f"{index}\n{start} --> {end}\n{text}\n\n")
    return "".join(blocks)


def _emit_vtt(transcript: Transcript) -> str:
    tagged = _uses_speaker_tags(transcript)
    parts = ["WEBVTT\n"]
    for segment in transcript.segments:
        start = _format_timestamp(segment.interval.start_ms, ".")
        end = _format_timestamp(segment.interval.end_ms, ".")
        text = f"<v {segment.speaker}>{segment.text}</v>" if tagged else segment.text
        parts.append(f"\n{start} --> {end}\n{text}\n")
    return "".join(parts)


def parse_subtitles(text: str, fmt: SubtitleFormat, lenient: bool = False) -> ParseResult:
    """Parse subtitle text into a transcript.

    Strict mode raises ``MalformedCueError`` on the first bad cue and
    ``EmptyFileError`` when no cue parses; lenient mode skips bad cues and
    records warnings instead. Parsed SRT/VTT transcripts carry language
    "und" (the formats store none) and regenerated sequential segment ids.
    """
    text = text.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n")
    if fmt == SubtitleFormat.CANONICAL_JSON:
        return ParseResult(transcript=transcript_from_json(text, strict=not lenient))
    if fmt == SubtitleFormat.SRT:
        cues, warnings = _parse_srt(text, lenient)
    elif fmt == SubtitleFormat.VTT:
        cues, warnings = _parse_vtt(text, lenient)
    else:
        raise ValueError(f"unknown subtitle format: {fmt!r}")
    if not cues and not lenient:
        raise EmptyFileError("no cues found")
    segments = tuple(
        TranscriptSegment(
            id=f"c{index:04d}",
            speaker=cue.speaker,
            interval=TimeInterval(cue.start_ms, cue.end_ms),
            text=cue.text,
        )
        for index, cue in enumerate(cues, start=1)
    )
    return ParseResult(
        transcript=Transcript(language="und", segments=segments), warnings=tuple(warnings)
    )


class _Malformed(Exception):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason


def _fail_or_warn(lenient: bool, warnings: list[ParseWarning], line: int, reason: str):
    if not lenient:
        raise MalformedCueError(line, reason)
    warnings.append(ParseWarning(line=line, reason=reason))


def _blocks(lines: list[str]):
    """Yield (first_line_number, block_lines) for runs of non-blank lines."""
    block: list[str] = []
    start = 0
    for number, line in enumerate(lines, start=1):
        if line.strip():
            if not block:
                start = number
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _parse_cue_block(line_number: int, block: list[str], allow_index: bool) -> _Cue:
    cursor = 0
    if allow_index and "-->" not in block[0]:
        if not block[0].strip().isdigit():
            raise _Malformed(line_number, f"expected cue index, got {block[0]!r}")
        cursor = 1
    elif "-->" not in block[0]:
        # VTT: an optional cue identifier line precedes the timing line
        cursor = 1
    if cursor >= len(block) or "-->" not in block[cursor]:
        raise _Malformed(line_number + cursor, "expected timing line with '-->'")
    timing = block[cursor]
    left, _, right = timing.partition("-->")
    start = _parse_timestamp(left)
    # drop cue settings (e.g. "align:start") after the end timestamp
    end = _parse_timestamp(right.strip().split(" ")[0])
    if start is None or end is None:
        raise _Malformed(line_number + cursor, f"bad timestamps in {timing.strip()!r}")
    if start >= end:
        raise _Malformed(line_number + cursor, f"cue start {start} is not before end {end}")
    text_lines = block[cursor + 1 :]
    if not [line for line in text_lines if line.strip()]:
        raise _Malformed(line_number + cursor, "cue has no text")
    return _Cue(start_ms=start, end_ms=end, speaker="S1", text="\n".join(text_lines).strip("\n"))


def _parse_srt(text: str, lenient: bool) -> tuple[list[_Cue], list[ParseWarning]]:
    cues: list[_Cue] = []
    warnings: list[ParseWarning] = []
    for line_number, block in _blocks(text.split("\n")):
        try:
            cue = _parse_cue_block(line_number, block, allow_index=True)
        except _Malformed as exc:
            _fail_or_warn(lenient, warnings, exc.line, exc.reason)
            continue
        match = _SRT_SPEAKER_RE.match(cue.text)
        if match:
            cue.speaker, cue.text = match.group(1), match.group(2)
        cues.append(cue)
    return cues, warnings


def _parse_vtt(text: str, lenient: bool) -> tuple[list[_Cue], list[ParseWarning]]:
    cues: list[_Cue] = []
    warnings: list[ParseWarning] = []
    lines = text.split("\n")
    saw_header = False
    for line_number, block in _blocks(lines):
        if not saw_header:
            if block[0].startswith("WEBVTT"):
                saw_header = True
                # header block may carry metadata lines; a same-block cue is
                # unusual but tolerated when the timing line follows directly
                rest = [line for line in block[1:] if "-->" in line]
                if not rest:
                    continue
                offset = block.index(rest[0])
                block = block[offset:]
                line_number += offset
            else:
                _fail_or_warn(lenient, warnings, line_number, "missing WEBVTT header")
                saw_header = True
        first = block[0].split(" ")[0]
        if first in ("NOTE", "STYLE", "REGION"):
            continue
        if not any("-->" in line for line in block):
            _fail_or_warn(lenient, warnings, line_number, "block has no timing line")
            continue
        try:
            cue = _parse_cue_block(line_number, block, allow_index=False)
        except _Malformed as exc:
            _fail_or_warn(lenient, warnings, exc.line, exc.reason)
            continue
        match = _VTT_VOICE_RE.match(cue.text)
        if match:
            cue.speaker = match.group(1)
            body = match.group(2)
            if body.endswith("</v>"):
                body = body[: -len("</v>")]
            cue.text = body
        cues.append(cue)
    return cues, warnings


FORMAT_EXTENSIONS = {
    SubtitleFormat.SRT: ".srt",
    SubtitleFormat.VTT: ".vtt",
    SubtitleFormat.CANONICAL_JSON: ".transcript.json",
}


def format_for_path(path: str) -> SubtitleFormat:
    lowered = path.lower()
    if lowered.endswith(".srt"):
        return SubtitleFormat.SRT
    if lowered.endswith(".vtt"):
        return SubtitleFormat.VTT
    if lowered.endswith(".json"):
        return SubtitleFormat.CANONICAL_JSON
    raise ValueError(f"cannot infer subtitle format from {path!r}")
