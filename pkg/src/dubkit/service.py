"""REST facade over the pipeline.

Handlers translate HTTP to pipeline calls and back; no dubbing logic lives
here. Stages run on daemon threads with one in-flight stage per project;
progress is published on an in-process event bus and streamed as server-sent
events.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from queue import Empty, Queue

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from . import __version__
from .config import ServiceConfig
from .engines import EngineAdapterSet
from .engines.mocks import MockEngineConfig, mock_adapter_set
from .errors import ConfigError, DubkitError, MediaError, MissingTrackError, OutOfOrderError
from .model import ToneMode, TrackKind
from .pipeline import (
    STAGES,
    PipelineRunner,
    ProgressEvent,
    media_type_of,
    transition,
)
from .storage import (
    ArtifactStore,
    ProjectRepository,
    delete_project_and_artifacts,
    project_to_dict,
)
from .subtitles import SubtitleFormat

_TRANSCRIPT_KINDS = (TrackKind.TRANSCRIPT, TrackKind.TRANSLATED_TRANSCRIPT)

_FORMATS = {
    "json": SubtitleFormat.CANONICAL_JSON,
    "srt": SubtitleFormat.SRT,
    "vtt": SubtitleFormat.VTT,
}

_EXPORT_EXTENSIONS = {"video/x-dubstub": ".dubstub", "video/mp4": ".mp4"}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, **details):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class EventBus:
    """Per-project progress history plus live fan-out queues."""

    def __init__(self):
        self._lock = threading.Lock()
        self._history: dict[str, list[dict]] = {}
        self._live: dict[str, list[Queue]] = {}

    def publish(self, event: ProgressEvent) -> None:
        payload = {
            "project_id": event.project_id,
            "stage": event.stage,
            "fraction": event.fraction,
            "message": event.message,
        }
        with self._lock:
            self._history.setdefault(event.project_id, []).append(payload)
            listeners = list(self._live.get(event.project_id, []))
        for queue in listeners:
            queue.put(payload)

    def subscribe(self, project_id: str) -> tuple[list[dict], Queue]:
        queue: Queue = Queue()
        with self._lock:
            history = list(self._history.get(project_id, []))
            self._live.setdefault(project_id, []).append(queue)
        return history, queue

    def unsubscribe(self, project_id: str, queue: Queue) -> None:
        with self._lock:
            listeners = self._live.get(project_id, [])
            if queue in listeners:
                listeners.remove(queue)

    def drop(self, project_id: str) -> None:
        with self._lock:
            self._history.pop(project_id, None)
            self._live.pop(project_id, None)


@dataclass
class ServiceState:
    config: ServiceConfig
    store: ArtifactStore
    repo: ProjectRepository
    runner: PipelineRunner
    bus: EventBus
    busy: set[str] = field(default_factory=set)
    mutex: threading.Lock = field(default_factory=threading.Lock)


def build_adapters(config: ServiceConfig) -> EngineAdapterSet:
    if config.adapter_mode == "mock":
        return mock_adapter_set(
            MockEngineConfig(seed=config.mock_seed, rates=config.rate_model())
        )
    from .engines.ffmpeg import FfmpegMediaToolkit
    from .engines.http import (
        HttpDiarizer,
        HttpFaceDetector,
        HttpLipSyncer,
        HttpSourceSeparator,
        HttpTranscriber,
        HttpTranslator,
        HttpVoiceSynthesizer,
        RemoteClient,
        RemoteEndpoint,
    )

    wrappers = {
        "separator": HttpSourceSeparator,
        "transcriber": HttpTranscriber,
        "diarizer": HttpDiarizer,
        "translator": HttpTranslator,
        "synthesizer": HttpVoiceSynthesizer,
        "face_detector": HttpFaceDetector,
        "lip_syncer": HttpLipSyncer,
    }
    built = {}
    for name, wrapper in wrappers.items():
        endpoint = config.adapters.get(name)
        if endpoint is None:
            raise ConfigError(f"adapter endpoint missing for external mode: {name}")
        client = RemoteClient(
            RemoteEndpoint(
                base_url=endpoint.base_url,
                token=endpoint.token,
                timeout_s=endpoint.timeout_s,
                retries=endpoint.retries,
            )
        )
        built[name] = wrapper(client)
    return EngineAdapterSet(media=FfmpegMediaToolkit(), **built)


def parse_multipart(content_type: str, body: bytes) -> dict[str, tuple[str | None, bytes]]:
    """Minimal multipart/form-data parser: name -> (filename, payload)."""
    if "multipart/form-data" not in content_type.lower():
        raise ValueError("expected multipart/form-data")
    boundary = None
    for piece in content_type.split(";"):
        piece = piece.strip()
        if piece.lower().startswith("boundary="):
            boundary = piece[len("boundary="):].strip().strip('"')
    if not boundary:
        raise ValueError("missing multipart boundary")
    delimiter = b"--" + boundary.encode("ascii")
    chunks = body.split(delimiter)
    if len(chunks) < 2:
        raise ValueError("empty multipart body")
    fields: dict[str, tuple[str | None, bytes]] = {}
    closed = False
    for chunk in chunks[1:]:
        if chunk.startswith(b"--"):
            closed = True
            break
        if chunk.startswith(b"\r\n"):
            chunk = chunk[2:]
        head, sep, payload = chunk.partition(b"\r\n\r\n")
        if not sep:
            raise ValueError("malformed multipart section")
        if payload.endswith(b"\r\n"):
            payload = payload[:-2]
        name, filename = None, None
        for line in head.split(b"\r\n"):
            text = line.decode("utf-8", "replace")
            if text.lower().startswith("content-disposition:"):
                for param in text.split(";")[1:]:
                    key, _, value = param.strip().partition("=")
                    value = value.strip('"')
                    if key == "name":
                        name = value
                    elif key == "filename":
                        filename = value
        if name is None:
            raise ValueError("multipart section without a field name")
        fields[name] = (filename, payload)
    if not closed:
        raise ValueError("unterminated multipart body")
    return fields


def create_app(
    config: ServiceConfig | None = None, adapters: EngineAdapterSet | None = None
) -> FastAPI:
    cfg = config if config is not None else ServiceConfig()
    engine_set = adapters if adapters is not None else build_adapters(cfg)
    bus = EventBus()
    state = ServiceState(
        config=cfg,
        store=ArtifactStore(cfg.artifact_root),
        repo=ProjectRepository(cfg.artifact_root),
        runner=PipelineRunner(
            engine_set,
            ArtifactStore(cfg.artifact_root),
            settings=cfg.pipeline_settings(),
            on_event=bus.publish,
        ),
        bus=bus,
    )

    app = FastAPI(title="dubkit", version=__version__)
    app.state.dubkit = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "VALIDATION",
                "message": "invalid request",
                "details": {"errors": jsonable_encoder(exc.errors())},
            },
        )

    @app.exception_handler(DubkitError)
    async def _dubkit_error(request: Request, exc: DubkitError):
        status = 503 if exc.code == "ADAPTER_UNAVAILABLE" else 500
        return JSONResponse(status_code=status, content=exc.to_dict())

    def _load_project(project_id: str):
        project = state.repo.load(project_id)
        if project is None:
            raise ApiError(404, "NOT_FOUND", f"no project {project_id}")
        return project

    def _view(project) -> dict:
        data = project_to_dict(project)
        runs = state.repo.runs(project.id)
        latest: dict[str, dict] = {}
        for run in runs:
            latest[run["stage"]] = run
        data["warnings"] = [
            warning
            for stage in STAGES
            if stage in latest
            for warning in latest[stage].get("warnings", [])
        ]
        data["runs"] = runs
        with state.mutex:
            data["busy"] = project.id in state.busy
        return data

    @app.get("/health")
    def health():
        return {"status": "ok", "adapter_mode": cfg.adapter_mode, "version": __version__}

    @app.get("/projects")
    def list_projects():
        return {"projects": [_view(_load_project(pid)) for pid in state.repo.list_ids()]}

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        body = await request.body()
        if len(body) > cfg.max_upload_bytes:
            raise ApiError(
                422, "VALIDATION", "upload exceeds the configured size limit",
                limit_bytes=cfg.max_upload_bytes,
            )
        try:
            fields = parse_multipart(request.headers.get("content-type", ""), body)
        except ValueError as exc:
            raise ApiError(422, "VALIDATION", str(exc))
        if "media" not in fields or not fields["media"][1]:
            raise ApiError(422, "VALIDATION", "missing media file field")

        def scalar(name: str, default: str | None = None) -> str | None:
            if name not in fields:
                return default
            return fields[name][1].decode("utf-8").strip()

        target = scalar("target_language")
        if not target:
            raise ApiError(422, "VALIDATION", "target_language is required")
        tone_raw = scalar("tone", "formal")
        try:
            tone = ToneMode(tone_raw)
        except ValueError:
            raise ApiError(
                422, "VALIDATION", f"unknown tone {tone_raw!r}",
                allowed=[t.value for t in ToneMode],
            )
        multi_raw = (scalar("multi_speaker", "false") or "false").lower()
        if multi_raw not in ("true", "false", "1", "0"):
            raise ApiError(422, "VALIDATION", "multi_speaker must be true or false")
        source = scalar("source_language") or None

        try:
            project = state.runner.create_project(
                fields["media"][1],
                project_id=uuid.uuid4().hex[:12],
                target_language=target,
                tone=tone,
                multi_speaker=multi_raw in ("true", "1"),
                source_language=source,
            )
        except MediaError as exc:
            raise ApiError(422, "MEDIA", exc.message)
        except ValueError as exc:
            raise ApiError(422, "VALIDATION", str(exc))
        state.repo.save(project)
        return _view(project)

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return _view(_load_project(project_id))

    def _execute_stage(project_id: str, stage: str) -> None:
        try:
            project = state.repo.load(project_id)
            if project is None:
                return
            updated, run = state.runner.advance(project, stage)
            state.repo.save(updated)
            state.repo.append_run(project_id, run.to_dict())
        finally:
            with state.mutex:
                state.busy.discard(project_id)

    @app.post("/projects/{project_id}/stages/{stage}", status_code=202)
    def trigger_stage(project_id: str, stage: str):
        if stage not in STAGES:
            raise ApiError(
                422, "VALIDATION", f"unknown stage {stage!r}", allowed=list(STAGES)
            )
        with state.mutex:
            if project_id in state.busy:
                raise ApiError(
                    409, "STAGE_BUSY", f"project {project_id} already has a stage running"
                )
            project = _load_project(project_id)
            try:
                transition(project.stage, stage)
            except OutOfOrderError as exc:
                raise ApiError(409, exc.code, exc.message, **exc.details)
            state.busy.add(project_id)
        worker = threading.Thread(
            target=_execute_stage, args=(project_id, stage), daemon=True
        )
        worker.start()
        return {"status": "accepted", "project_id": project_id, "stage": stage}

    @app.get("/projects/{project_id}/events")
    def stream_events(project_id: str):
        _load_project(project_id)
        history, queue = state.bus.subscribe(project_id)

        def generate():
            try:
                for item in history:
                    yield f"data: {json.dumps(item)}\n\n"
                while True:
                    try:
                        item = queue.get(timeout=0.2)
                    except Empty:
                        with state.mutex:
                            running = project_id in state.busy
                        if not running:
                            break
                        continue
                    yield f"data: {json.dumps(item)}\n\n"
            finally:
                state.bus.unsubscribe(project_id, queue)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/projects/{project_id}/tracks/{kind}")
    def download_track(project_id: str, kind: str, format: str | None = None):
        try:
            track_kind = TrackKind(kind)
        except ValueError:
            raise ApiError(
                422, "VALIDATION", f"unknown track kind {kind!r}",
                allowed=[k.value for k in TrackKind],
            )
        project = _load_project(project_id)
        if track_kind in _TRANSCRIPT_KINDS:
            fmt_name = format or "json"
            if fmt_name not in _FORMATS:
                raise ApiError(
                    422, "VALIDATION", f"unknown format {fmt_name!r}",
                    allowed=sorted(_FORMATS),
                )
            fmt = _FORMATS[fmt_name]
        elif format is not None:
            raise ApiError(
                422, "VALIDATION", "format applies only to transcript tracks"
            )
        else:
            fmt = SubtitleFormat.CANONICAL_JSON
        try:
            payload, media_type = state.runner.export_bytes(project, {track_kind}, fmt)
        except MissingTrackError as exc:
            raise ApiError(404, exc.code, exc.message, **exc.details)
        extension = {
            "application/json": ".transcript.json",
            "application/x-subrip": ".srt",
            "text/vtt": ".vtt",
            "audio/wav": ".wav",
            "video/x-dubstub": ".dubstub",
            "video/mp4": ".mp4",
        }.get(media_type, ".bin")
        filename = f"{project_id}.{track_kind.value}{extension}"
        return Response(
            content=payload,
            media_type=media_type,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    @app.get("/projects/{project_id}/export")
    def download_export(project_id: str):
        project = _load_project(project_id)
        if project.export_artifact is None:
            raise ApiError(404, "EXPORT_NOT_READY", "run the export stage first")
        payload = state.store.get(project.export_artifact)
        media_type = media_type_of(payload)
        extension = _EXPORT_EXTENSIONS.get(media_type, ".bin")
        return Response(
            content=payload,
            media_type=media_type,
            headers={
                "Content-Disposition": f'attachment; filename="{project_id}.export{extension}"'
            },
        )

    @app.get("/projects/{project_id}/plan")
    def download_plan(project_id: str):
        project = _load_project(project_id)
        if project.placement_plan is None:
            raise ApiError(404, "PLAN_NOT_READY", "run the conversion stage first")
        return Response(
            content=state.store.get(project.placement_plan),
            media_type="application/json",
        )

    @app.delete("/projects/{project_id}", status_code=204)
    def delete_project(project_id: str):
        with state.mutex:
            if project_id in state.busy:
                raise ApiError(
                    409, "STAGE_BUSY", f"project {project_id} has a stage running"
                )
            project = _load_project(project_id)
        delete_project_and_artifacts(state.repo, state.store, project)
        state.bus.drop(project_id)
        return Response(status_code=204)

    return app
