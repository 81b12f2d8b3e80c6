"""Frame-less stub "video" container used by the mock toolkit and tests.

Layout: magic line, one JSON header line ``{"duration_ms", "sample_rate",
"label"}``, then the raw little-endian int16 PCM payload. It carries
everything the pipeline contracts need (duration metadata plus an attached
audio payload) without any codec dependency. Real-backend mode talks to an
external transcoder instead.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import MediaError
from ..model import TimeInterval
from .audio import AudioBuffer, samples_for_ms

MAGIC = b"DUBSTUB1\n"


def write_stub_video(duration_ms: int, audio: AudioBuffer, label: str = "") -> bytes:
    if duration_ms <= 0:
        raise MediaError(f"duration must be positive, got {duration_ms}")
    header = {
        "duration_ms": duration_ms,
        "sample_rate": audio.sample_rate,
        "label": label,
    }
    return (
        MAGIC
        + json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
        + b"\n"
        + audio.samples.tobytes()
    )


def read_stub_video(data: bytes) -> tuple[dict, AudioBuffer]:
    if not data.startswith(MAGIC):
        raise MediaError("not a stub video container")
    newline = data.index(b"\n", len(MAGIC))
    try:
        header = json.loads(data[len(MAGIC) : newline])
    except json.JSONDecodeError as exc:
        raise MediaError(f"corrupt stub header: {exc}") from exc
    payload = data[newline + 1 :]
    if len(payload) % 2:
        raise MediaError("stub payload is not 16-bit aligned")
    audio = AudioBuffer(np.frombuffer(payload, dtype="<i2"), header["sample_rate"])
    return header, audio


class MockMediaToolkit:
    """Media toolkit over the stub container; byte-deterministic."""

    name = "mock-media"
    version = "1"

    def probe_duration_ms(self, media: bytes) -> int:
        header, _ = read_stub_video(media)
        return int(header["duration_ms"])

    def demux_audio(self, media: bytes) -> AudioBuffer:
        _, audio = read_stub_video(media)
        return audio

    def extract_range(self, media: bytes, interval: TimeInterval) -> bytes:
        header, audio = read_stub_video(media)
        if interval.end_ms > header["duration_ms"]:
            raise MediaError(
                f"range {interval} exceeds media duration {header['duration_ms']}"
            )
        clip = audio.slice_ms(interval.start_ms, interval.end_ms)
        return write_stub_video(interval.duration_ms, clip, label=header.get("label", ""))

    def replace_ranges(
        self, media: bytes, replacements: list[tuple[TimeInterval, bytes]]
    ) -> bytes:
        header, audio = read_stub_video(media)
        rate = audio.sample_rate
        samples = audio.samples.copy()
        last_end = -1
        for interval, clip_bytes in sorted(replacements, key=lambda r: r[0].start_ms):
            if interval.start_ms < last_end:
                raise MediaError("replacement ranges overlap")
            last_end = interval.end_ms
            if interval.end_ms > header["duration_ms"]:
                raise MediaError(f"replacement {interval} exceeds media duration")
            clip_header, clip_audio = read_stub_video(clip_bytes)
            lo = samples_for_ms(interval.start_ms, rate)
            hi = samples_for_ms(interval.end_ms, rate)
            if clip_header["duration_ms"] != interval.duration_ms:
                raise MediaError(
                    f"clip duration {clip_header['duration_ms']} does not match "
                    f"range {interval.duration_ms}"
                )
            if len(clip_audio) != hi - lo:
                raise MediaError("clip payload length does not match the range")
            samples[lo:hi] = clip_audio.samples
        return write_stub_video(
            int(header["duration_ms"]),
            AudioBuffer(samples, rate),
            label=header.get("label", ""),
        )

    def mux(self, media: bytes, audio: AudioBuffer) -> bytes:
        header, _ = read_stub_video(media)
        return write_stub_video(int(header["duration_ms"]), audio, label="muxed")
