"""Content-addressed artifact store and on-disk project records.

Artifacts live under ``root/blobs/<aa>/<digest>`` keyed by their SHA-256, so
identical bytes are stored once and ids are stable across runs. Project
state is one JSON document per project plus an append-only JSON-lines log of
stage runs.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

from .errors import MissingArtifactError
from .model import (
    Project,
    SpeakerLabel,
    StageState,
    ToneMode,
    Track,
    TrackKind,
)


class ArtifactStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._blobs = self.root / "blobs"
        self._blobs.mkdir(parents=True, exist_ok=True)

    def _path(self, artifact_id: str) -> Path:
        return self._blobs / artifact_id[:2] / artifact_id

    def put(self, data: bytes) -> str:
        artifact_id = hashlib.sha256(data).hexdigest()
        path = self._path(artifact_id)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return artifact_id

    def get(self, artifact_id: str) -> bytes:
        path = self._path(artifact_id)
        if not path.exists():
            raise MissingArtifactError(f"artifact {artifact_id} not found")
        return path.read_bytes()

    def exists(self, artifact_id: str) -> bool:
        return self._path(artifact_id).exists()

    def path(self, artifact_id: str) -> Path:
        path = self._path(artifact_id)
        if not path.exists():
            raise MissingArtifactError(f"artifact {artifact_id} not found")
        return path

    def delete(self, artifact_id: str) -> None:
        path = self._path(artifact_id)
        if path.exists():
            path.unlink()


def project_to_dict(project: Project) -> dict:
    return {
        "id": project.id,
        "source_asset": project.source_asset,
        "source_language": project.source_language,
        "target_language": project.target_language,
        "tone": project.tone.value,
        "multi_speaker": project.multi_speaker,
        "video_duration_ms": project.video_duration_ms,
        "stage": {
            "name": project.stage.name,
            "failed_stage": project.stage.failed_stage,
            "reason": project.stage.reason,
        },
        "tracks": {
            kind.value: {
                "kind": kind.value,
                "artifact": track.artifact,
                "produced_by": track.produced_by,
                "media_type": track.media_type,
                "enabled": track.enabled,
            }
            for kind, track in project.tracks.items()
        },
        "speakers": [
            {"id": speaker.id, "reference_clip": speaker.reference_clip}
            for speaker in project.speakers
        ],
        "placement_plan": project.placement_plan,
        "export_artifact": project.export_artifact,
    }


def project_from_dict(data: dict) -> Project:
    stage = StageState(
        data["stage"]["name"],
        failed_stage=data["stage"].get("failed_stage"),
        reason=data["stage"].get("reason"),
    )
    tracks = {
        TrackKind(raw["kind"]): Track(
            kind=TrackKind(raw["kind"]),
            artifact=raw["artifact"],
            produced_by=raw["produced_by"],
            media_type=raw["media_type"],
            enabled=raw["enabled"],
        )
        for raw in data["tracks"].values()
    }
    speakers = tuple(
        SpeakerLabel(raw["id"], raw.get("reference_clip")) for raw in data["speakers"]
    )
    return Project(
        id=data["id"],
        source_asset=data["source_asset"],
        source_language=data.get("source_language"),
        target_language=data["target_language"],
        tone=ToneMode(data["tone"]),
        multi_speaker=data["multi_speaker"],
        video_duration_ms=data["video_duration_ms"],
        stage=stage,
        tracks=tracks,
        speakers=speakers,
        placement_plan=data.get("placement_plan"),
        export_artifact=data.get("export_artifact"),
    )


class ProjectRepository:
    """One directory per project: ``project.json`` plus ``runs.jsonl``."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._projects = self.root / "projects"
        self._projects.mkdir(parents=True, exist_ok=True)

    def _dir(self, project_id: str) -> Path:
        return self._projects / project_id

    def save(self, project: Project) -> None:
        folder = self._dir(project.id)
        folder.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(project_to_dict(project), ensure_ascii=False, indent=2)
        # temp file + rename so a concurrent reader never sees a partial write
        scratch = folder / "project.json.tmp"
        scratch.write_text(payload + "\n", encoding="utf-8")
        scratch.replace(folder / "project.json")

    def load(self, project_id: str) -> Project | None:
        path = self._dir(project_id) / "project.json"
        if not path.exists():
            return None
        return project_from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_ids(self) -> list[str]:
        return sorted(
            entry.name
            for entry in self._projects.iterdir()
            if (entry / "project.json").exists()
        )

    def delete(self, project_id: str) -> None:
        folder = self._dir(project_id)
        if folder.exists():
            shutil.rmtree(folder)

    def append_run(self, project_id: str, run: dict) -> None:
        folder = self._dir(project_id)
        folder.mkdir(parents=True, exist_ok=True)
        with (folder / "runs.jsonl").open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(run, ensure_ascii=False) + "\n")

    def runs(self, project_id: str) -> list[dict]:
        path = self._dir(project_id) / "runs.jsonl"
        if not path.exists():
            return []
        return [
            json.loads(line)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]

    def referenced_artifacts(self, project: Project) -> set[str]:
        ids = {project.source_asset}
        for track in project.tracks.values():
            ids.add(track.artifact)
        for speaker in project.speakers:
            if speaker.reference_clip:
                ids.add(speaker.reference_clip)
        if project.placement_plan:
            ids.add(project.placement_plan)
        if project.export_artifact:
            ids.add(project.export_artifact)
        return ids


def delete_project_and_artifacts(
    repo: ProjectRepository, store: ArtifactStore, project: Project
) -> None:
    """Removes the project record and any blob no surviving project uses."""

    doomed = repo.referenced_artifacts(project)
    repo.delete(project.id)
    for other_id in repo.list_ids():
        other = repo.load(other_id)
        if other is not None:
            doomed -= repo.referenced_artifacts(other)
            if not doomed:
                return
    for artifact_id in doomed:
        store.delete(artifact_id)


