"""Duration alignment: syllable estimation, speech-rate modeling, variant
selection, clamped stretch factors, and gap-borrowing placement planning.

The syllable rules are deliberately crude, deterministic heuristics:
Vietnamese counts one syllable per whitespace token; tokens written in a
non-Latin script count one syllable per character; Latin tokens count
maximal vowel-letter runs (``aeiouy`` plus accented forms, resolved by
NFD base character), with a floor of one per alphabetic token and one
extra syllable per digit (spoken-form length).
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import MissingDurationError, PlanningError, TranscriptInvalidError
from .model import TimeInterval, Transcript, validate_transcript

_BASE_VOWELS = set("aeiouy")
_EXTRA_VOWELS = set("øæœ")  # ø æ œ have no NFD decomposition


def _is_vowel(ch: str) -> bool:
    if ch in _EXTRA_VOWELS:
        return True
    base = unicodedata.normalize("NFD", ch)[0]
    return base in _BASE_VOWELS


def _is_latin(ch: str) -> bool:
    try:
        return unicodedata.name(ch).startswith("LATIN")
    except ValueError:
        return False


def _latin_token_syllables(token: str) -> int:
    count = 0
    groups = 0
    in_group = False
    has_letter = False
    for ch in token:
        if ch.isdigit():
            count += 1
            in_group = False
        elif ch.isalpha():
            has_letter = True
            if _is_vowel(ch):
                if not in_group:
                    groups += 1
                in_group = True
            else:
                in_group = False
        else:
            in_group = False
    if has_letter and groups == 0:
        groups = 1
    return count + groups


def estimate_syllables(text: str, language: str) -> int:
    """Deterministic syllable count >= 0 for duration estimation."""
    primary = language.split("-")[0].lower() if language else ""
    total = 0
    for token in text.split():
        if primary == "vi":
            total += 1
            continue
        if any(ch.isalpha() and not _is_latin(ch) for ch in token):
            total += sum(1 for ch in token if not ch.isspace())
        else:
            total += _latin_token_syllables(token.lower())
    return total


@dataclass(frozen=True, slots=True)
class SpeechRateModel:
    """Syllables per second by language; rates must lie in (1.0, 12.0)."""

    default_rate: float = 4.0
    rates: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, rate in [("default", self.default_rate), *self.rates.items()]:
            if not 1.0 < rate < 12.0:
                raise ValueError(f"speech rate for {name!r} must be in (1.0, 12.0), got {rate}")

    def rate_for(self, language: str | None) -> float:
        if not language:
            return self.default_rate
        return self.rates.get(language.split("-")[0].lower(), self.default_rate)


def estimate_speech_duration(text: str, language: str, rates: SpeechRateModel) -> int:
    syllables = estimate_syllables(text, language)
    if syllables == 0:
        return 0
    return round(1000 * syllables / rates.rate_for(language))


def select_length_variant(
    candidates: Sequence[str], slot_ms: int, language: str, rates: SpeechRateModel
) -> int:
    """Index of the candidate whose estimated duration is nearest the slot;
    ties break to the lowest index."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    best = 0
    best_distance = abs(estimate_speech_duration(candidates[0], language, rates) - slot_ms)
    for index in range(1, len(candidates)):
        distance = abs(estimate_speech_duration(candidates[index], language, rates) - slot_ms)
        if distance < best_distance:
            best, best_distance = index, distance
    return best


@dataclass(frozen=True, slots=True)
class StretchPolicy:
    f_min: float = 0.80
    f_max: float = 1.25
    max_borrow_ms: int = 500
    min_inter_gap_ms: int = 50

    def __post_init__(self):
        if not 0 < self.f_min <= 1 <= self.f_max:
            raise ValueError(f"stretch bounds must satisfy 0 < f_min <= 1 <= f_max, got {self}")
        if self.max_borrow_ms < 0 or self.min_inter_gap_ms < 0:
            raise ValueError("borrow and gap limits must be non-negative")


class PlacementFlag(str, Enum):
    CLAMPED = "clamped"
    BORROWED = "borrowed"
    OVERSTRETCHED = "overstretched"


def stretch_factor(
    synth_duration_ms: int, slot_duration_ms: int, policy: StretchPolicy
) -> tuple[float, frozenset[PlacementFlag]]:
    """Clamped time-stretch factor; factor > 1 speeds speech up so the
    stretched duration is synth/factor."""
    if synth_duration_ms <= 0 or slot_duration_ms <= 0:
        raise ValueError("durations must be positive")
    raw = synth_duration_ms / slot_duration_ms
    factor = min(max(raw, policy.f_min), policy.f_max)
    flags = frozenset() if factor == raw else frozenset({PlacementFlag.CLAMPED})
    return factor, flags


@dataclass(frozen=True, slots=True)
class PlacementEntry:
    segment_id: str
    speaker: str
    source: TimeInterval
    target: TimeInterval
    stretch_factor: float
    flags: frozenset[PlacementFlag] = frozenset()


@dataclass(frozen=True, slots=True)
class PlacementPlan:
    entries: tuple[PlacementEntry, ...] = ()

    def __post_init__(self):
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(self.entries))

    def entry_for(self, segment_id: str) -> PlacementEntry | None:
        for entry in self.entries:
            if entry.segment_id == segment_id:
                return entry
        return None

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "segment_id": entry.segment_id,
                    "speaker": entry.speaker,
                    "source": {"start_ms": entry.source.start_ms, "end_ms": entry.source.end_ms},
                    "target": {"start_ms": entry.target.start_ms, "end_ms": entry.target.end_ms},
                    "stretch_factor": entry.stretch_factor,
                    "flags": sorted(flag.value for flag in entry.flags),
                }
                for entry in self.entries
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PlacementPlan":
        entries = tuple(
            PlacementEntry(
                segment_id=raw["segment_id"],
                speaker=raw["speaker"],
                source=TimeInterval(raw["source"]["start_ms"], raw["source"]["end_ms"]),
                target=TimeInterval(raw["target"]["start_ms"], raw["target"]["end_ms"]),
                stretch_factor=raw["stretch_factor"],
                flags=frozenset(PlacementFlag(flag) for flag in raw["flags"]),
            )
            for raw in data["entries"]
        )
        return cls(entries=entries)


def plan_placement(
    transcript: Transcript,
    synth_durations_ms: Mapping[str, int],
    video_duration_ms: int,
    policy: StretchPolicy,
) -> PlacementPlan:
    """Place synthesized clips onto the fixed video timeline.

    Per speaker in time order: stretch toward the source slot within policy
    bounds; when the clamped clip still overruns, borrow from the silence
    gap to the next same-speaker segment (or end-of-video slack for the
    last one) up to max_borrow_ms while keeping min_inter_gap_ms clear;
    when borrowing is still insufficient, exceed f_max and flag
    Overstretched. Every target starts at its source start.
    """
    report = validate_transcript(transcript)
    if report:
        raise TranscriptInvalidError("cannot plan over an invalid transcript", report=report)
    if video_duration_ms <= 0:
        raise PlanningError("video duration must be positive")

    by_speaker: dict[str, list] = {}
    for segment in transcript.segments:
        if segment.id not in synth_durations_ms:
            raise MissingDurationError(segment.id)
        if synth_durations_ms[segment.id] <= 0:
            raise PlanningError(
                f"synthesized duration for segment {segment.id!r} must be positive"
            )
        if segment.interval.end_ms > video_duration_ms:
            raise PlanningError(
                f"segment {segment.id!r} extends past the video duration"
            )
        by_speaker.setdefault(segment.speaker, []).append(segment)

    placements: dict[str, PlacementEntry] = {}
    for speaker, segments in by_speaker.items():
        for index, segment in enumerate(segments):
            synth = synth_durations_ms[segment.id]
            slot = segment.interval.duration_ms
            factor, flags = stretch_factor(synth, slot, policy)
            stretched = max(1, round(synth / factor))
            if stretched > slot:
                if index + 1 < len(segments):
                    gap = segments[index + 1].interval.start_ms - segment.interval.end_ms
                    borrowable = min(policy.max_borrow_ms, gap - policy.min_inter_gap_ms)
                else:
                    borrowable = min(
                        policy.max_borrow_ms, video_duration_ms - segment.interval.end_ms
                    )
                borrowable = max(0, borrowable)
                if stretched - slot <= borrowable:
                    target_len = stretched
                    flags = flags | {PlacementFlag.BORROWED}
                else:
                    target_len = slot + borrowable
                    factor = synth / target_len
                    # the clamp did not survive; report the overrun instead
                    flags = frozenset({PlacementFlag.OVERSTRETCHED}) | (
                        {PlacementFlag.BORROWED} if borrowable > 0 else frozenset()
                    )
            else:
                target_len = stretched
            start = segment.interval.start_ms
            placements[segment.id] = PlacementEntry(
                segment_id=segment.id,
                speaker=speaker,
                source=segment.interval,
                target=TimeInterval(start, start + target_len),
                stretch_factor=factor,
                flags=frozenset(flags),
            )

    return PlacementPlan(
        entries=tuple(placements[segment.id] for segment in transcript.segments)
    )
