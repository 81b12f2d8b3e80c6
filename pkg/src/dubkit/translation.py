"""Structure-preserving, tone-controlled translation orchestration.

Prompts carry the batch as separator-joined segments and demand the same
structure back; responses are validated strictly and repaired by retrying
the batch, then bisecting it down to singletons. A singleton that still
fails falls back to the source text, flagged untranslated, so the pipeline
stays total and the segment count is always preserved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Protocol

from .alignment import estimate_syllables
from .errors import (
    CountMismatchError,
    EmptySegmentError,
    MissingAnswerMarkerError,
    SeparatorCollisionError,
    TranscriptInvalidError,
    TranslationFailedError,
)
from .model import ToneMode, Transcript, validate_transcript

logger = logging.getLogger(__name__)

DEFAULT_SEPARATOR = "|||"
ROLE_LINE = "You are a professional dubbing translator."
ANSWER_MARKER = "ANSWER:"
PAYLOAD_HEADER = "SEGMENTS:"
TEMPLATE_VERSION = "dubkit-prompt-1"

_TONE_FRAGMENTS = {
    ToneMode.FORMAL: (
        "Use a formal academic register: full forms, no contractions, and "
        "honorifics where the target language has them."
    ),
    ToneMode.INFORMAL: (
        "Use an informal conversational register: contractions and everyday "
        "phrasing are welcome."
    ),
    ToneMode.FRIENDLY: (
        "Use a warm, inclusive classroom address, as a friendly teacher "
        "speaking directly to students."
    ),
}


class Translator(Protocol):
    name: str
    version: str

    def complete(self, prompt: str) -> str: ...


def tone_profile(tone: ToneMode) -> str:
    return _TONE_FRAGMENTS[tone]


def escape_separator(text: str, separator: str = DEFAULT_SEPARATOR) -> str:
    return text.replace(separator, " ".join(separator))


def unescape_separator(text: str, separator: str = DEFAULT_SEPARATOR) -> str:
    return text.replace(" ".join(separator), separator)


@dataclass(frozen=True, slots=True)
class PromptItem:
    segment_id: str
    text: str
    slot_ms: int
    syllable_count: int


@dataclass(frozen=True, slots=True)
class PromptSpec:
    tone: ToneMode
    source_language: str
    target_language: str
    batch: tuple[PromptItem, ...]
    separator: str = DEFAULT_SEPARATOR
    role_line: str = ROLE_LINE
    syllable_hint: bool = True
    cot: bool = True

    def __post_init__(self):
        if not self.batch:
            raise ValueError("prompt batch must be non-empty")
        for item in self.batch:
            if self.separator in item.text:
                raise SeparatorCollisionError(
                    f"segment {item.segment_id!r} contains the separator after escaping"
                )


def build_prompt(spec: PromptSpec) -> str:
    """Deterministic prompt bytes for a given spec."""
    lines = [
        spec.role_line,
        "",
        f"Translate each segment from {spec.source_language} to {spec.target_language} "
        "for spoken dubbing.",
        f'The input is a series of short segments separated by "{spec.separator}".',
        f'Return exactly one translation per segment, joined by "{spec.separator}", '
        "in the same order.",
        "The output must follow the same structure as the input.",
        "",
        tone_profile(spec.tone),
    ]
    if spec.syllable_hint:
        counts = ", ".join(str(item.syllable_count) for item in spec.batch)
        lines += [
            "",
            f"Syllable counts per segment: {counts}.",
            "Aim for a similar syllable count in each translation so it fits "
            "the original timing.",
        ]
    if spec.cot:
        lines += [
            "",
            "First analyze the text's tone, rhythm, and natural spoken equivalents.",
            f'Then write only the final translations after a line containing exactly '
            f'"{ANSWER_MARKER}".',
        ]
    lines += [
        "",
        PAYLOAD_HEADER,
        spec.separator.join(item.text for item in spec.batch),
    ]
    return "\n".join(lines)


def parse_llm_response(
    raw: str, expected_count: int, separator: str = DEFAULT_SEPARATOR, cot: bool = False
) -> list[str]:
    """Split a model response into exactly ``expected_count`` trimmed,
    non-empty translations, discarding any reasoning before the final
    answer marker in CoT mode."""
    if expected_count < 1:
        raise ValueError("expected_count must be >= 1")
    text = raw
    if cot:
        marker = text.rfind(ANSWER_MARKER)
        if marker < 0:
            raise MissingAnswerMarkerError(f"response lacks the {ANSWER_MARKER!r} marker")
        text = text[marker + len(ANSWER_MARKER) :]
    parts = [part.strip() for part in text.split(separator)]
    if len(parts) != expected_count:
        raise CountMismatchError(got=len(parts), expected=expected_count)
    for index, part in enumerate(parts):
        if not part:
            raise EmptySegmentError(index)
    return [unescape_separator(part, separator) for part in parts]


@dataclass(frozen=True, slots=True)
class TranslationOptions:
    tone: ToneMode
    source_language: str
    target_language: str
    batch_size: int = 12
    max_attempts: int = 2
    syllable_hint: bool = True
    cot: bool = True
    separator: str = DEFAULT_SEPARATOR
    fallback_to_source: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True, slots=True)
class TranslationResult:
    texts: Mapping[str, str]
    untranslated: frozenset[str] = frozenset()
    adapter_calls: int = 0
    batch_sizes: tuple[int, ...] = ()
    template_version: str = TEMPLATE_VERSION


def translate_segments(
    transcript: Transcript, opts: TranslationOptions, translator: Translator
) -> TranslationResult:
    """Translate every segment, preserving ids and order.

    Segments are batched in time order up to ``opts.batch_size``. Each batch
    is attempted up to ``opts.max_attempts`` times (transport and structure
    failures both count); a batch that keeps failing is bisected and the
    halves processed recursively, bottoming out at singletons. Total adapter
    calls are bounded by max_attempts × (2n − 1).
    """
    report = validate_transcript(transcript)
    if report:
        raise TranscriptInvalidError("cannot translate an invalid transcript", report=report)

    texts: dict[str, str] = {}
    untranslated: set[str] = set()
    calls = 0
    batch_sizes: list[int] = []

    def attempt_batch(segments) -> list[str] | None:
        nonlocal calls
        spec = PromptSpec(
            tone=opts.tone,
            source_language=opts.source_language,
            target_language=opts.target_language,
            batch=tuple(
                PromptItem(
                    segment_id=segment.id,
                    text=escape_separator(segment.text, opts.separator),
                    slot_ms=segment.interval.duration_ms,
                    syllable_count=estimate_syllables(segment.text, opts.source_language),
                )
                for segment in segments
            ),
            separator=opts.separator,
            syllable_hint=opts.syllable_hint,
            cot=opts.cot,
        )
        prompt = build_prompt(spec)
        for _ in range(opts.max_attempts):
            calls += 1
            batch_sizes.append(len(segments))
            try:
                raw = translator.complete(prompt)
            except Exception as exc:
                logger.debug("translator transport failure on batch of %d: %s", len(segments), exc)
                continue
            try:
                return parse_llm_response(raw, len(segments), opts.separator, opts.cot)
            except (CountMismatchError, EmptySegmentError, MissingAnswerMarkerError) as exc:
                logger.debug("structure violation on batch of %d: %s", len(segments), exc)
        return None

    def process(segments) -> None:
        outputs = attempt_batch(segments)
        if outputs is not None:
            for segment, output in zip(segments, outputs):
                texts[segment.id] = output
            return
        if len(segments) == 1:
            segment = segments[0]
            if not opts.fallback_to_source:
                raise TranslationFailedError(
                    f"segment {segment.id!r} failed after {opts.max_attempts} attempts",
                    segment_id=segment.id,
                )
            texts[segment.id] = segment.text
            untranslated.add(segment.id)
            return
        middle = len(segments) // 2
        process(segments[:middle])
        process(segments[middle:])

    segments = list(transcript.segments)
    for start in range(0, len(segments), opts.batch_size):
        process(segments[start : start + opts.batch_size])

    return TranslationResult(
        texts=texts,
        untranslated=frozenset(untranslated),
        adapter_calls=calls,
        batch_sizes=tuple(batch_sizes),
    )
