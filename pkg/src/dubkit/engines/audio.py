"""Mono 16-bit PCM audio buffers and the pure signal operations the
pipeline performs itself: overlap-add time-stretching, gain mixing, and
rendering placement plans onto a silent canvas.

All operations are deterministic; accumulation happens in float64 or int32
and saturates at the 16-bit bounds on the way out.
"""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass

import numpy as np

from ..errors import AudioError, MissingClipError
from ..model import TimeInterval

DEFAULT_SAMPLE_RATE = 24_000
_WINDOW_SECONDS = 0.025


def samples_for_ms(ms: int, rate: int) -> int:
    return round(ms * rate / 1000)


@dataclass(frozen=True)
class AudioBuffer:
    """Immutable mono PCM buffer; samples are int16 and read-only."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype="<i2").reshape(-1).copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise AudioError(f"sample rate must be positive, got {self.sample_rate}")

    def __eq__(self, other):
        if not isinstance(other, AudioBuffer):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def channels(self) -> int:
        return 1

    @property
    def duration_ms(self) -> int:
        return round(1000 * len(self.samples) / self.sample_rate)

    @classmethod
    def silence(cls, duration_ms: int, sample_rate: int = DEFAULT_SAMPLE_RATE) -> "AudioBuffer":
        return cls(np.zeros(samples_for_ms(duration_ms, sample_rate), dtype="<i2"), sample_rate)

    def slice_ms(self, start_ms: int, end_ms: int) -> "AudioBuffer":
        lo = samples_for_ms(start_ms, self.sample_rate)
        hi = samples_for_ms(end_ms, self.sample_rate)
        return AudioBuffer(self.samples[lo:hi], self.sample_rate)

    def to_wav_bytes(self) -> bytes:
        out = io.BytesIO()
        with wave.open(out, "wb") as fh:
            fh.setnchannels(1)
            fh.setsampwidth(2)
            fh.setframerate(self.sample_rate)
            fh.writeframes(self.samples.tobytes())
        return out.getvalue()

    @classmethod
    def from_wav_bytes(cls, data: bytes) -> "AudioBuffer":
        with wave.open(io.BytesIO(data), "rb") as fh:
            if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
                raise AudioError("expected mono 16-bit PCM WAV")
            rate = fh.getframerate()
            frames = fh.readframes(fh.getnframes())
        return cls(np.frombuffer(frames, dtype="<i2"), rate)


def tone(
    frequency_hz: float,
    duration_ms: int,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    amplitude: float = 0.3,
) -> AudioBuffer:
    """Cosine test tone; the first sample is at full amplitude so energy
    starts exactly at the buffer boundary."""
    count = samples_for_ms(duration_ms, sample_rate)
    index = np.arange(count, dtype=np.float64)
    wave_values = np.cos(2.0 * math.pi * frequency_hz * index / sample_rate)
    return AudioBuffer(
        np.round(wave_values * amplitude * 32767.0).astype("<i2"), sample_rate
    )


def time_stretch(audio: AudioBuffer, factor: float) -> AudioBuffer:
    """Overlap-add time-scale modification over 25 ms windows with 50%
    overlap. ``factor`` > 1 shortens the audio (speeds it up); output length
    is round(len/factor). Factor 1.0 returns the input unchanged."""
    if not 0.25 < factor < 4.0:
        raise AudioError(f"stretch factor {factor} outside (0.25, 4.0)")
    if factor == 1.0:
        return audio
    in_samples = audio.samples.astype(np.float64)
    n_in = len(in_samples)
    n_out = round(n_in / factor)
    if n_out == 0 or n_in == 0:
        return AudioBuffer(np.zeros(n_out, dtype="<i2"), audio.sample_rate)

    window_len = round(audio.sample_rate * _WINDOW_SECONDS)
    window_len += window_len % 2
    if n_in < window_len or n_out < window_len:
        # too short for overlap-add; nearest-sample resample keeps the law
        positions = np.minimum((np.arange(n_out) * factor).round().astype(int), n_in - 1)
        return AudioBuffer(in_samples[positions].astype("<i2"), audio.sample_rate)

    hop = window_len // 2
    window = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(window_len) / window_len)
    acc = np.zeros(n_out, dtype=np.float64)
    norm = np.zeros(n_out, dtype=np.float64)
    for out_pos in range(0, n_out - window_len + hop, hop):
        out_end = min(out_pos + window_len, n_out)
        length = out_end - out_pos
        in_pos = min(max(round(out_pos * factor), 0), n_in - window_len)
        acc[out_pos:out_end] += in_samples[in_pos : in_pos + length] * window[:length]
        norm[out_pos:out_end] += window[:length]
    filled = norm > 1e-9
    acc[filled] /= norm[filled]
    return AudioBuffer(
        np.clip(np.round(acc), -32768, 32767).astype("<i2"), audio.sample_rate
    )


def mix_tracks(a: AudioBuffer, b: AudioBuffer, gain_a: float, gain_b: float) -> AudioBuffer:
    """Gain-weighted sum; the shorter input is zero-padded and the sum
    saturates at the 16-bit bounds."""
    if a.sample_rate != b.sample_rate:
        raise AudioError(f"sample rate mismatch: {a.sample_rate} vs {b.sample_rate}")
    length = max(len(a), len(b))
    mixed = np.zeros(length, dtype=np.float64)
    mixed[: len(a)] += a.samples.astype(np.float64) * gain_a
    mixed[: len(b)] += b.samples.astype(np.float64) * gain_b
    return AudioBuffer(
        np.clip(np.round(mixed), -32768, 32767).astype("<i2"), a.sample_rate
    )


def render_dub_track(plan, clips, video_duration_ms: int, rate: int) -> AudioBuffer:
    """Render a placement plan onto silence of the full video duration.

    Each clip is stretched by its plan factor and written at its target
    start; overlapping writes (cross-speaker only in valid plans) sum
    with saturation.
    """
    canvas = np.zeros(samples_for_ms(video_duration_ms, rate), dtype=np.int32)
    for entry in plan.entries:
        clip = clips.get(entry.segment_id)
        if clip is None:
            raise MissingClipError(entry.segment_id)
        if clip.sample_rate != rate:
            raise AudioError(
                f"clip for {entry.segment_id!r} has rate {clip.sample_rate}, expected {rate}"
            )
        stretched = time_stretch(clip, entry.stretch_factor)
        start = samples_for_ms(entry.target.start_ms, rate)
        end = min(start + len(stretched), len(canvas))
        canvas[start:end] += stretched.samples[: end - start].astype(np.int32)
    return AudioBuffer(np.clip(canvas, -32768, 32767).astype("<i2"), rate)
