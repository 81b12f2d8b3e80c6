"""Shared test oracles and random generators.

The interval oracle works on a 1 ms boolean bitmap so it shares no code
with the interval algebra under test. Transcript generators build valid
transcripts by construction (per-speaker sorted, disjoint intervals).
"""

from __future__ import annotations

import random

import numpy as np

from dubkit.model import TimeInterval, Transcript, TranscriptSegment, WordTiming

HORIZON_MS = 10_000

WORDS = (
    "the lecture covers signal processing and sampling theory today "
    "we study how discrete systems model continuous audio phenomena "
    "students ask questions about aliasing filters and spectral leakage "
    "every example uses short clips recorded in the university studio"
).split()


# --- bitmap oracle for interval algebra -------------------------------------


def bitmap_of(pairs, horizon: int = HORIZON_MS) -> np.ndarray:
    bitmap = np.zeros(horizon, dtype=bool)
    for start, end in pairs:
        bitmap[start:end] = True
    return bitmap


def runs_of(bitmap: np.ndarray) -> list[tuple[int, int]]:
    padded = np.concatenate(([False], bitmap, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return [(int(edges[i]), int(edges[i + 1])) for i in range(0, len(edges), 2)]


def oracle_normalize(pairs, horizon: int = HORIZON_MS) -> list[tuple[int, int]]:
    """Union of intervals via the bitmap. Half-open [a,b) next to [b,c)
    leaves no gap bit, so touching intervals fuse while a 1 ms gap keeps
    them apart, exactly matching the merge rule."""
    return runs_of(bitmap_of(pairs, horizon))


def oracle_filter_pad(
    pairs, min_duration: int, pad: int, bounds: tuple[int, int], horizon: int = HORIZON_MS
) -> list[tuple[int, int]]:
    survivors = [(s, e) for s, e in pairs if e - s >= min_duration]
    padded = []
    for s, e in survivors:
        ps, pe = max(bounds[0], s - pad), min(bounds[1], e + pad)
        if ps < pe:
            padded.append((ps, pe))
    return oracle_normalize(padded, horizon=horizon)


# --- random generators -------------------------------------------------------


def random_raw_intervals(rng: random.Random, max_n: int = 12, horizon: int = HORIZON_MS):
    count = rng.randint(0, max_n)
    pairs = []
    for _ in range(count):
        start = rng.randrange(0, horizon - 1)
        length = rng.randint(1, min(2500, horizon - start))
        pairs.append((start, start + length))
    return pairs


def random_normalized_intervals(rng: random.Random, max_n: int = 10, horizon: int = HORIZON_MS):
    cursor = 0
    out = []
    for _ in range(rng.randint(0, max_n)):
        start = cursor + rng.randint(1, 900)
        length = rng.randint(1, 1200)
        if start + length >= horizon:
            break
        out.append((start, start + length))
        cursor = start + length
    return out


def words_for(text: str, interval: TimeInterval) -> tuple[WordTiming, ...]:
    tokens = text.split()
    span = interval.duration_ms
    if not tokens or span < len(tokens):
        return ()
    bounds = [interval.start_ms + round(i * span / len(tokens)) for i in range(len(tokens) + 1)]
    return tuple(
        WordTiming(word=token, interval=TimeInterval(bounds[i], bounds[i + 1]))
        for i, token in enumerate(tokens)
    )


def random_transcript(
    rng: random.Random,
    speakers=("S1", "S2"),
    max_segments: int = 8,
    language: str = "en",
    with_words: bool = True,
) -> Transcript:
    """A transcript that is valid by construction: globally sorted segments
    and disjoint intervals per speaker (cross-speaker overlap allowed)."""
    cursors = {speaker: 0 for speaker in speakers}
    segments = []
    for index in range(rng.randint(0, max_segments)):
        speaker = rng.choice(speakers)
        floor = max(cursors.values()) if rng.random() < 0.6 else cursors[speaker]
        start = max(floor, cursors[speaker]) + rng.randint(10, 700)
        duration = rng.randint(40, 2400)
        text = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6)))
        interval = TimeInterval(start, start + duration)
        words = words_for(text, interval) if with_words and rng.random() < 0.7 else ()
        segments.append(
            TranscriptSegment(
                id=f"seg{index:03d}", speaker=speaker, interval=interval, text=text, words=words
            )
        )
        cursors[speaker] = start + duration
    segments.sort(key=lambda s: s.interval.start_ms)
    return Transcript(language=language, segments=tuple(segments))


# --- media fixtures -----------------------------------------------------------


def fixture_media(duration_ms: int = 30_000) -> bytes:
    """Stub video whose audio has a time-varying low band (vocals proxy)
    plus a constant high band (background proxy)."""
    from dubkit.engines.audio import AudioBuffer, mix_tracks, tone
    from dubkit.engines.stubmedia import write_stub_video

    half = duration_ms // 2
    low = AudioBuffer(
        np.concatenate(
            [tone(300.0, half).samples, tone(440.0, duration_ms - half).samples]
        )
    )
    high = tone(2000.0, duration_ms, amplitude=0.2)
    return write_stub_video(duration_ms, mix_tracks(low, high, 1.0, 1.0), label="lecture")
