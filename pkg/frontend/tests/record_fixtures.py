"""Record real API responses as JSON fixtures for the UI tests.

Drives the service in-process with mock adapters and captures the project
view after every stage, the full event stream, both transcript payloads,
and the error body shapes. Re-run after changing the service:

    python3 frontend/tests/record_fixtures.py
"""

from __future__ import annotations

import dataclasses
import json
import time
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from dubkit.config import ServiceConfig
from dubkit.engines.audio import AudioBuffer, mix_tracks, tone
from dubkit.engines.mocks import mock_adapter_set
from dubkit.engines.stubmedia import write_stub_video
from dubkit.service import create_app

OUT = Path(__file__).parent / "fixtures"


def build_lecture(duration_ms: int = 30_000) -> bytes:
    half = duration_ms // 2
    voices = AudioBuffer(
        np.concatenate(
            [tone(300.0, half).samples, tone(440.0, duration_ms - half).samples]
        )
    )
    room = tone(2000.0, duration_ms, amplitude=0.2)
    return write_stub_video(duration_ms, mix_tracks(voices, room, 1.0, 1.0), label="lecture")


def wait_idle(client, project_id):
    while True:
        view = client.get(f"/projects/{project_id}").json()
        if not view["busy"]:
            return view
        time.sleep(0.02)


def record(tmp_root: Path) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    written = {}

    def dump(name, payload):
        written[name] = payload
        (OUT / f"{name}.json").write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    config = ServiceConfig(artifact_root=tmp_root / "data")
    with TestClient(create_app(config)) as client:
        created = client.post(
            "/projects",
            files={"media": ("lecture.dubstub", build_lecture(), "application/octet-stream")},
            data={"target_language": "vi", "tone": "formal", "multi_speaker": "true"},
        )
        project_id = created.json()["id"]
        dump("view_new", created.json())

        for stage in ("analysis", "translation", "conversion", "lipsync", "export"):
            client.post(f"/projects/{project_id}/stages/{stage}")
            view = wait_idle(client, project_id)
            dump(f"view_{view['stage']['name']}", view)

        events = []
        with client.stream("GET", f"/projects/{project_id}/events") as stream:
            for line in stream.iter_lines():
                if line.startswith("data: "):
                    events.append(json.loads(line[len("data: "):]))
        dump("events_full", events)

        dump("track_transcript",
             client.get(f"/projects/{project_id}/tracks/transcript").json())
        dump("track_translated_transcript",
             client.get(f"/projects/{project_id}/tracks/translated_transcript").json())

    # out-of-order needs a fresh project still in its initial state
    with TestClient(create_app(ServiceConfig(artifact_root=tmp_root / "data2"))) as client:
        created = client.post(
            "/projects",
            files={"media": ("lecture.dubstub", build_lecture(), "application/octet-stream")},
            data={"target_language": "vi"},
        )
        fresh_id = created.json()["id"]
        dump("error_out_of_order",
             client.post(f"/projects/{fresh_id}/stages/conversion").json())
        dump("error_unknown_stage",
             client.post(f"/projects/{fresh_id}/stages/remix").json())
        dump("error_not_found", client.get("/projects/absent").json())

    # a failed analysis so the UI has a failure snapshot
    class Boom:
        name = "boom-transcriber"
        version = "1"

        def transcribe(self, vocals):
            raise RuntimeError("transcription backend unavailable")

    adapters = dataclasses.replace(mock_adapter_set(), transcriber=Boom())
    config = ServiceConfig(artifact_root=tmp_root / "data3")
    with TestClient(create_app(config, adapters)) as client:
        created = client.post(
            "/projects",
            files={"media": ("lecture.dubstub", build_lecture(), "application/octet-stream")},
            data={"target_language": "vi"},
        )
        failed_id = created.json()["id"]
        client.post(f"/projects/{failed_id}/stages/analysis")
        dump("view_failed", wait_idle(client, failed_id))

    print(f"recorded {len(written)} fixtures into {OUT}")


if __name__ == "__main__":
    import tempfile

    record(Path(tempfile.mkdtemp()))
