"""Scripted HTTP session against a live in-process service.

Starts the API on a local port with mock adapters, uploads a generated
stub lecture, drives analysis through export, tails the progress event
stream, downloads the translated transcript as SRT, and cleans up.

    python3 demos/api_session.py
"""

from __future__ import annotations

import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from dubkit.config import ServiceConfig
from dubkit.service import create_app

from run_pipeline import build_lecture

PORT = 8765


def start_server(config: ServiceConfig) -> uvicorn.Server:
    server = uvicorn.Server(
        uvicorn.Config(create_app(config), host="127.0.0.1", port=PORT, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)
    return server


def wait_idle(client: httpx.Client, project_id: str) -> dict:
    while True:
        view = client.get(f"/projects/{project_id}").json()
        if not view["busy"]:
            return view
        time.sleep(0.05)


def main() -> None:
    config = ServiceConfig(artifact_root=Path(tempfile.mkdtemp()) / "data")
    server = start_server(config)
    base = f"http://127.0.0.1:{PORT}"
    with httpx.Client(base_url=base, timeout=30.0) as client:
        created = client.post(
            "/projects",
            files={"media": ("lecture.dubstub", build_lecture(), "application/octet-stream")},
            data={"target_language": "vi", "tone": "friendly", "multi_speaker": "true"},
        )
        created.raise_for_status()
        project_id = created.json()["id"]
        print(f"project {project_id} created "
              f"({created.json()['video_duration_ms']} ms of media)")

        for stage in ("analysis", "translation", "conversion", "lipsync", "export"):
            client.post(f"/projects/{project_id}/stages/{stage}").raise_for_status()
            view = wait_idle(client, project_id)
            print(f"{stage:<12} -> {view['stage']['name']}"
                  + (f"  warnings: {view['warnings']}" if view["warnings"] else ""))

        print("\nreplaying the event stream:")
        with client.stream("GET", f"/projects/{project_id}/events") as stream:
            shown = 0
            for line in stream.iter_lines():
                if line.startswith("data: ") and shown < 8:
                    print("  " + line[len("data: "):])
                    shown += 1

        srt = client.get(
            f"/projects/{project_id}/tracks/translated_transcript", params={"format": "srt"}
        )
        print("\ntranslated transcript as SRT (first lines):")
        print("\n".join("  " + line for line in srt.text.splitlines()[:6]))

        export = client.get(f"/projects/{project_id}/export")
        print(f"\nexport download: {len(export.content)} bytes "
              f"({export.headers['content-type']})")

        client.delete(f"/projects/{project_id}")
        print("project deleted")
    server.should_exit = True


if __name__ == "__main__":
    main()
