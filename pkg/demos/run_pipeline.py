"""Headless pipeline walkthrough on the mock adapters.

Builds a 30 second stub lecture (two low-frequency "speakers" over a quiet
high-frequency background), runs every stage, and prints what each stage
produced. Everything is deterministic; run it twice and the artifact ids
match.

    python3 demos/run_pipeline.py [out_dir]
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

import numpy as np

from dubkit.engines.audio import AudioBuffer, mix_tracks, tone
from dubkit.engines.mocks import mock_adapter_set
from dubkit.engines.stubmedia import read_stub_video, write_stub_video
from dubkit.model import ToneMode
from dubkit.pipeline import PipelineRunner
from dubkit.storage import ArtifactStore


def build_lecture(duration_ms: int = 30_000) -> bytes:
    half = duration_ms // 2
    voices = AudioBuffer(
        np.concatenate(
            [tone(300.0, half).samples, tone(440.0, duration_ms - half).samples]
        )
    )
    room = tone(2000.0, duration_ms, amplitude=0.2)
    return write_stub_video(duration_ms, mix_tracks(voices, room, 1.0, 1.0), label="lecture")


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    store = ArtifactStore(out_dir / "artifacts")
    runner = PipelineRunner(
        mock_adapter_set(),
        store,
        on_event=lambda e: print(f"  [{e.stage}] {e.fraction:>4.0%} {e.message}"),
    )

    print("creating project from a generated stub lecture")
    project = runner.create_project(
        build_lecture(),
        project_id="demo",
        target_language="vi",
        tone=ToneMode.FORMAL,
        multi_speaker=True,
    )
    project, runs = runner.run_all(project)
    if project.stage.is_failed:
        print(f"failed at {project.stage.failed_stage}: {project.stage.reason}")
        raise SystemExit(1)

    print("\ntracks:")
    for kind, track in project.tracks.items():
        size = len(store.get(track.artifact))
        print(f"  {kind.value:<22} {track.media_type:<18} {size:>9} bytes  {track.artifact[:12]}")

    export = store.get(project.export_artifact)
    header, audio = read_stub_video(export)
    print(f"\nexport: {len(export)} bytes, duration {header['duration_ms']} ms, "
          f"audio {audio.duration_ms} ms @ {audio.sample_rate} Hz")
    print(f"warnings: {[w for run in runs for w in run.warnings] or 'none'}")
    print(f"artifacts kept under {out_dir}")


if __name__ == "__main__":
    main()
