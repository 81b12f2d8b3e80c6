"""Deterministic in-process engine adapters.

Every adapter here is a pure function of (config seed, call inputs), so any
pipeline run that uses the mock set is byte-reproducible. They stand in for
the neural backends during tests and demos; the behaviors are intentionally
simple but honor the same contracts the real adapters must.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..alignment import SpeechRateModel, estimate_syllables
from ..model import TimeInterval, Transcript, TranscriptSegment, WordTiming
from ..translation import DEFAULT_SEPARATOR, ANSWER_MARKER
from . import DiarizationResult
from .audio import AudioBuffer, tone
from .stubmedia import read_stub_video

_PAYLOAD_MARKER = "\nSEGMENTS:\n"

_LECTURE_WORDS = (
    "the", "lecture", "covers", "signal", "processing", "today", "we",
    "derive", "fourier", "transforms", "students", "should", "review",
    "sampling", "theory", "before", "next", "class", "consider", "this",
    "matrix", "its", "eigenvalues", "define", "stability", "now", "examine",
    "convergence", "proof", "carefully", "note", "boundary", "conditions",
)

MIN_REFERENCE_MS = 3000


@dataclass(frozen=True)
class MockEngineConfig:
    """Knobs shared by the mock adapters; defaults suit the test fixtures."""

    seed: int = 1234
    detected_language: str = "en"
    vocal_cutoff_hz: float = 1000.0
    tone_frequencies: tuple[float, ...] = (440.0, 660.0, 880.0, 1100.0, 1320.0)
    face_intervals: tuple[TimeInterval, ...] | None = None
    transcripts: Mapping[str, Transcript] = field(default_factory=dict)
    separator: str = DEFAULT_SEPARATOR
    rates: SpeechRateModel = field(default_factory=SpeechRateModel)


def _digest(audio: AudioBuffer) -> str:
    h = hashlib.sha256()
    h.update(str(audio.sample_rate).encode("ascii"))
    h.update(b":")
    h.update(audio.samples.tobytes())
    return h.hexdigest()


class MockSourceSeparator:
    """Splits by frequency band: content at or below the cutoff is "vocals"."""

    name = "mock-separator"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        self._cutoff = config.vocal_cutoff_hz

    def separate(self, audio: AudioBuffer) -> tuple[AudioBuffer, AudioBuffer]:
        if len(audio) == 0:
            return audio, audio
        x = audio.samples.astype(np.float64)
        spectrum = np.fft.rfft(x)
        freqs = np.fft.rfftfreq(len(x), d=1.0 / audio.sample_rate)
        spectrum[freqs > self._cutoff] = 0.0
        low = np.fft.irfft(spectrum, n=len(x))
        vocals = np.clip(np.round(low), -32768, 32767).astype(np.int16)
        residual = x - vocals.astype(np.float64)
        background = np.clip(np.round(residual), -32768, 32767).astype(np.int16)
        rate = audio.sample_rate
        return AudioBuffer(vocals, rate), AudioBuffer(background, rate)


class MockTranscriber:
    """Returns a fixture transcript keyed by the vocals hash, else generates
    one deterministically from (seed, hash)."""

    name = "mock-transcriber"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        self._config = config

    def transcribe(self, vocals: AudioBuffer) -> Transcript:
        digest = _digest(vocals)
        fixture = self._config.transcripts.get(digest)
        if fixture is not None:
            return fixture
        return self._generate(digest, vocals.duration_ms)

    def _generate(self, digest: str, duration_ms: int) -> Transcript:
        rng = random.Random(f"{self._config.seed}:{digest}")
        segments = []
        cursor = rng.randrange(200, 501)
        while True:
            length = rng.randrange(1200, 2601)
            if cursor + length > duration_ms:
                break
            count = rng.randrange(3, 7)
            tokens = [rng.choice(_LECTURE_WORDS) for _ in range(count)]
            interval = TimeInterval(cursor, cursor + length)
            bounds = [
                cursor + round(i * length / count) for i in range(count + 1)
            ]
            words = tuple(
                WordTiming(tok, TimeInterval(bounds[i], bounds[i + 1]))
                for i, tok in enumerate(tokens)
            )
            segments.append(
                TranscriptSegment(
                    id=f"seg{len(segments):03d}",
                    speaker="S1",
                    interval=interval,
                    text=" ".join(tokens),
                    words=words,
                )
            )
            cursor += length + rng.randrange(200, 501)
        return Transcript(self._config.detected_language, tuple(segments))


class MockDiarizer:
    """Alternates S1/S2 across segments when multi-speaker, else labels
    everything S1; reference clip is the speaker's longest segment grown to
    the 3 s floor inside the vocals."""

    name = "mock-diarizer"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        del config

    def diarize(
        self, vocals: AudioBuffer, transcript: Transcript, multi_speaker: bool
    ) -> DiarizationResult:
        labels: dict[str, str] = {}
        by_speaker: dict[str, list[TranscriptSegment]] = {}
        for index, segment in enumerate(transcript.segments):
            label = "S2" if multi_speaker and index % 2 else "S1"
            labels[segment.id] = label
            by_speaker.setdefault(label, []).append(segment)
        clips = {
            label: self._reference_clip(vocals, segments)
            for label, segments in by_speaker.items()
        }
        return DiarizationResult(segment_speakers=labels, reference_clips=clips)

    @staticmethod
    def _reference_clip(
        vocals: AudioBuffer, segments: list[TranscriptSegment]
    ) -> AudioBuffer:
        best = segments[0]
        for segment in segments[1:]:
            if segment.interval.duration_ms > best.interval.duration_ms:
                best = segment
        total = vocals.duration_ms
        if total <= MIN_REFERENCE_MS:
            return vocals.slice_ms(0, total)
        start, end = best.interval.start_ms, best.interval.end_ms
        shortfall = MIN_REFERENCE_MS - (end - start)
        if shortfall > 0:
            end = min(total, end + shortfall)
            start = max(0, start - (MIN_REFERENCE_MS - (end - start)))
        return vocals.slice_ms(start, end)


class MockTranslator:
    """Reverses each segment's word order and tags it ``[tgt]`` so the
    "translation" is structure-preserving but visibly different."""

    name = "mock-translator"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        self._separator = config.separator

    def complete(self, prompt: str) -> str:
        at = prompt.find(_PAYLOAD_MARKER)
        payload = prompt[at + len(_PAYLOAD_MARKER):] if at >= 0 else prompt
        parts = payload.split(self._separator)
        translated = self._separator.join(
            "[tgt] " + " ".join(reversed(part.split())) for part in parts
        )
        if ANSWER_MARKER in prompt:
            return f"Reordered {len(parts)} segments.\n{ANSWER_MARKER} {translated}"
        return translated


class MockVoiceSynthesizer:
    """Emits a fixed-frequency tone per distinct reference clip; duration is
    round(1000 * syllables / rate) so placement math is predictable."""

    name = "mock-synthesizer"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        self._frequencies = config.tone_frequencies
        self._rates = config.rates
        self._assigned: dict[str, float] = {}

    def frequency_for(self, reference: AudioBuffer) -> float:
        key = _digest(reference)
        if key not in self._assigned:
            pick = self._frequencies[len(self._assigned) % len(self._frequencies)]
            self._assigned[key] = pick
        return self._assigned[key]

    def synthesize(
        self, text: str, language: str, reference: AudioBuffer
    ) -> AudioBuffer:
        syllables = estimate_syllables(text, language)
        duration_ms = round(1000 * syllables / self._rates.rate_for(language))
        frequency = self.frequency_for(reference)
        return tone(frequency, duration_ms, reference.sample_rate)


class MockFaceDetector:
    """Fixture intervals when configured, else two windows derived from the
    probed duration."""

    name = "mock-face-detector"
    version = "1"

    def __init__(self, config: MockEngineConfig):
        self._fixture = config.face_intervals

    def detect(self, video: bytes) -> list[TimeInterval]:
        if self._fixture is not None:
            return list(self._fixture)
        header, _ = read_stub_video(video)
        duration = int(header["duration_ms"])
        return [
            TimeInterval(round(0.10 * duration), round(0.45 * duration)),
            TimeInterval(round(0.55 * duration), round(0.90 * duration)),
        ]


class MockLipSyncer:
    """Copies the requested range unchanged; reinsertion therefore leaves the
    video bytes identical."""

    name = "mock-lip-syncer"
    version = "1"

    def __init__(self, media=None):
        from .stubmedia import MockMediaToolkit

        self._media = media if media is not None else MockMediaToolkit()

    def sync(self, video: bytes, interval: TimeInterval, audio: AudioBuffer) -> bytes:
        del audio
        return self._media.extract_range(video, interval)


def mock_adapter_set(config: MockEngineConfig | None = None):
    """Builds the full adapter set backed by the mocks above."""

    from . import EngineAdapterSet
    from .stubmedia import MockMediaToolkit

    cfg = config if config is not None else MockEngineConfig()
    media = MockMediaToolkit()
    return EngineAdapterSet(
        separator=MockSourceSeparator(cfg),
        transcriber=MockTranscriber(cfg),
        diarizer=MockDiarizer(cfg),
        translator=MockTranslator(cfg),
        synthesizer=MockVoiceSynthesizer(cfg),
        face_detector=MockFaceDetector(cfg),
        lip_syncer=MockLipSyncer(media),
        media=media,
    )
