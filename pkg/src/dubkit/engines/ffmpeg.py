"""Media toolkit backed by the system ffmpeg/ffprobe binaries.

Used only when the service is configured for external adapters; the default
suite never shells out. Media moves through temporary files because the CLI
tools want paths, not pipes.
"""

from __future__ import annotations

import json
import subprocess
import tempfile
from pathlib import Path

import numpy as np

from ..errors import MediaError
from ..model import TimeInterval
from .audio import DEFAULT_SAMPLE_RATE, AudioBuffer


def _run(args: list[str]) -> bytes:
    try:
        result = subprocess.run(args, capture_output=True, check=True)
    except FileNotFoundError as exc:
        raise MediaError(f"{args[0]} not found on PATH") from exc
    except subprocess.CalledProcessError as exc:
        detail = exc.stderr.decode("utf-8", "replace").strip()[-400:]
        raise MediaError(f"{args[0]} failed: {detail}") from exc
    return result.stdout


class FfmpegMediaToolkit:
    name = "ffmpeg-media"
    version = "system"

    def __init__(self, sample_rate: int = DEFAULT_SAMPLE_RATE):
        self._rate = sample_rate

    def probe_duration_ms(self, media: bytes) -> int:
        with tempfile.NamedTemporaryFile(suffix=".mp4") as handle:
            handle.write(media)
            handle.flush()
            out = _run(
                [
                    "ffprobe", "-v", "error", "-show_entries", "format=duration",
                    "-of", "json", handle.name,
                ]
            )
        duration = json.loads(out)["format"]["duration"]
        return round(float(duration) * 1000)

    def demux_audio(self, media: bytes) -> AudioBuffer:
        with tempfile.NamedTemporaryFile(suffix=".mp4") as handle:
            handle.write(media)
            handle.flush()
            pcm = _run(
                [
                    "ffmpeg", "-v", "error", "-i", handle.name, "-vn",
                    "-ac", "1", "-ar", str(self._rate),
                    "-f", "s16le", "-",
                ]
            )
        return AudioBuffer(np.frombuffer(pcm, dtype="<i2"), self._rate)

    def extract_range(self, media: bytes, interval: TimeInterval) -> bytes:
        with tempfile.TemporaryDirectory() as tmp:
            src = Path(tmp, "in.mp4")
            dst = Path(tmp, "out.mp4")
            src.write_bytes(media)
            _run(
                [
                    "ffmpeg", "-v", "error",
                    "-ss", f"{interval.start_ms / 1000:.3f}",
                    "-to", f"{interval.end_ms / 1000:.3f}",
                    "-i", str(src), "-c", "copy", str(dst),
                ]
            )
            return dst.read_bytes()

    def replace_ranges(
        self, media: bytes, replacements: list[tuple[TimeInterval, bytes]]
    ) -> bytes:
        # Concat-based splice: original kept outside the ranges, clips inside.
        ordered = sorted(replacements, key=lambda r: r[0].start_ms)
        with tempfile.TemporaryDirectory() as tmp:
            src = Path(tmp, "in.mp4")
            src.write_bytes(media)
            duration = self.probe_duration_ms(media)
            pieces: list[Path] = []
            cursor = 0
            for index, (interval, clip) in enumerate(ordered):
                if interval.start_ms > cursor:
                    piece = Path(tmp, f"keep{index}.mp4")
                    piece.write_bytes(
                        self.extract_range(media, TimeInterval(cursor, interval.start_ms))
                    )
                    pieces.append(piece)
                piece = Path(tmp, f"clip{index}.mp4")
                piece.write_bytes(clip)
                pieces.append(piece)
                cursor = interval.end_ms
            if cursor < duration:
                piece = Path(tmp, "tail.mp4")
                piece.write_bytes(self.extract_range(media, TimeInterval(cursor, duration)))
                pieces.append(piece)
            listing = Path(tmp, "list.txt")
            listing.write_text(
                "".join(f"file '{piece}'\n" for piece in pieces), encoding="utf-8"
            )
            dst = Path(tmp, "out.mp4")
            _run(
                [
                    "ffmpeg", "-v", "error", "-f", "concat", "-safe", "0",
                    "-i", str(listing), "-c", "copy", str(dst),
                ]
            )
            return dst.read_bytes()

    def mux(self, media: bytes, audio: AudioBuffer) -> bytes:
        with tempfile.TemporaryDirectory() as tmp:
            src = Path(tmp, "in.mp4")
            wav = Path(tmp, "dub.wav")
            dst = Path(tmp, "out.mp4")
            src.write_bytes(media)
            wav.write_bytes(audio.to_wav_bytes())
            _run(
                [
                    "ffmpeg", "-v", "error", "-i", str(src), "-i", str(wav),
                    "-map", "0:v:0", "-map", "1:a:0",
                    "-c:v", "copy", "-shortest", str(dst),
                ]
            )
            return dst.read_bytes()
