"""Adapter boundary for every neural/media capability, plus the built-in
PCM operations the pipeline needs regardless of backend.

Each adapter is identified by a (name, version) pair recorded in stage
runs. Deterministic mock implementations live in ``dubkit.engines.mocks``;
thin HTTP clients for real backends live in ``dubkit.engines.http``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, runtime_checkable

from ..model import TimeInterval, Transcript
from .audio import AudioBuffer


@runtime_checkable
class SourceSeparator(Protocol):
    name: str
    version: str

    def separate(self, audio: AudioBuffer) -> tuple[AudioBuffer, AudioBuffer]:
        """Split mixed audio into (vocals, background)."""
        ...


@runtime_checkable
class Transcriber(Protocol):
    name: str
    version: str

    def transcribe(self, vocals: AudioBuffer) -> Transcript:
        """Transcript with word timings; ``language`` is the detected one."""
        ...


@dataclass(frozen=True, slots=True)
class DiarizationResult:
    segment_speakers: Mapping[str, str]
    reference_clips: Mapping[str, AudioBuffer]


@runtime_checkable
class Diarizer(Protocol):
    name: str
    version: str

    def diarize(
        self, vocals: AudioBuffer, transcript: Transcript, multi_speaker: bool
    ) -> DiarizationResult: ...


@runtime_checkable
class Translator(Protocol):
    name: str
    version: str

    def complete(self, prompt: str) -> str: ...


@runtime_checkable
class VoiceSynthesizer(Protocol):
    name: str
    version: str

    def synthesize(self, text: str, language: str, reference: AudioBuffer) -> AudioBuffer: ...


@runtime_checkable
class FaceDetector(Protocol):
    name: str
    version: str

    def detect(self, video: bytes) -> list[TimeInterval]: ...


@runtime_checkable
class LipSyncer(Protocol):
    name: str
    version: str

    def sync(self, video: bytes, interval: TimeInterval, audio: AudioBuffer) -> bytes:
        """Return the re-rendered clip for ``interval`` of ``video``."""
        ...


@runtime_checkable
class MediaToolkit(Protocol):
    name: str
    version: str

    def probe_duration_ms(self, media: bytes) -> int: ...

    def demux_audio(self, media: bytes) -> AudioBuffer: ...

    def extract_range(self, media: bytes, interval: TimeInterval) -> bytes: ...

    def replace_ranges(
        self, media: bytes, replacements: list[tuple[TimeInterval, bytes]]
    ) -> bytes: ...

    def mux(self, media: bytes, audio: AudioBuffer) -> bytes: ...


@dataclass(frozen=True, slots=True)
class EngineAdapterSet:
    separator: SourceSeparator
    transcriber: Transcriber
    diarizer: Diarizer
    translator: Translator
    synthesizer: VoiceSynthesizer
    face_detector: FaceDetector
    lip_syncer: LipSyncer
    media: MediaToolkit

    def versions(self) -> dict[str, str]:
        return {
            adapter.name: adapter.version
            for adapter in (
                self.separator,
                self.transcriber,
                self.diarizer,
                self.translator,
                self.synthesizer,
                self.face_detector,
                self.lip_syncer,
                self.media,
            )
        }
