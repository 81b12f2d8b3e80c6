"""Thin HTTP clients for externally hosted engine backends.

Each adapter mirrors one capability signature: scalar parameters travel as
JSON, bulky media goes through the remote artifact store and is referenced by
content-addressed id. Nothing here is exercised by the default test suite
beyond request-shape checks with a stub transport; talking to live services
is opt-in by configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

from ..errors import AdapterUnavailableError
from ..model import TimeInterval, Transcript, transcript_from_dict, transcript_to_dict
from . import DiarizationResult
from .audio import AudioBuffer


@dataclass(frozen=True)
class RemoteEndpoint:
    base_url: str
    token: str | None = None
    timeout_s: float = 60.0
    retries: int = 2


class RemoteClient:
    """Shared plumbing: artifact upload/download plus JSON calls with retry."""

    def __init__(self, endpoint: RemoteEndpoint, transport: httpx.BaseTransport | None = None):
        headers = {}
        if endpoint.token:
            headers["Authorization"] = f"Bearer {endpoint.token}"
        self._endpoint = endpoint
        self._http = httpx.Client(
            base_url=endpoint.base_url,
            headers=headers,
            timeout=endpoint.timeout_s,
            transport=transport,
        )

    def _attempt(self, request):
        last: Exception | None = None
        for _ in range(self._endpoint.retries + 1):
            try:
                response = request()
                if response.status_code >= 500:
                    last = AdapterUnavailableError(
                        f"backend returned {response.status_code}"
                    )
                    continue
                response.raise_for_status()
                return response
            except httpx.HTTPError as exc:
                last = exc
        raise AdapterUnavailableError(str(last))

    def call(self, path: str, payload: dict) -> dict:
        response = self._attempt(lambda: self._http.post(path, json=payload))
        return response.json()

    def put_artifact(self, data: bytes) -> str:
        response = self._attempt(
            lambda: self._http.post(
                "/artifacts",
                content=data,
                headers={"Content-Type": "application/octet-stream"},
            )
        )
        return response.json()["id"]

    def get_artifact(self, artifact_id: str) -> bytes:
        response = self._attempt(lambda: self._http.get(f"/artifacts/{artifact_id}"))
        return response.content

    def put_audio(self, audio: AudioBuffer) -> str:
        return self.put_artifact(audio.to_wav_bytes())

    def get_audio(self, artifact_id: str) -> AudioBuffer:
        return AudioBuffer.from_wav_bytes(self.get_artifact(artifact_id))

    def close(self) -> None:
        self._http.close()


class HttpSourceSeparator:
    name = "http-separator"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def separate(self, audio: AudioBuffer) -> tuple[AudioBuffer, AudioBuffer]:
        body = self._client.call("/separate", {"audio_id": self._client.put_audio(audio)})
        return (
            self._client.get_audio(body["vocals_id"]),
            self._client.get_audio(body["background_id"]),
        )


class HttpTranscriber:
    name = "http-transcriber"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def transcribe(self, vocals: AudioBuffer) -> Transcript:
        body = self._client.call(
            "/transcribe", {"audio_id": self._client.put_audio(vocals)}
        )
        return transcript_from_dict(body["transcript"], strict=False)


class HttpDiarizer:
    name = "http-diarizer"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def diarize(
        self, vocals: AudioBuffer, transcript: Transcript, multi_speaker: bool
    ) -> DiarizationResult:
        body = self._client.call(
            "/diarize",
            {
                "audio_id": self._client.put_audio(vocals),
                "transcript": transcript_to_dict(transcript),
                "multi_speaker": multi_speaker,
            },
        )
        clips = {
            speaker: self._client.get_audio(artifact_id)
            for speaker, artifact_id in body["reference_clip_ids"].items()
        }
        return DiarizationResult(
            segment_speakers=dict(body["segment_speakers"]), reference_clips=clips
        )


class HttpTranslator:
    name = "http-translator"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def complete(self, prompt: str) -> str:
        return self._client.call("/complete", {"prompt": prompt})["text"]


class HttpVoiceSynthesizer:
    name = "http-synthesizer"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def synthesize(self, text: str, language: str, reference: AudioBuffer) -> AudioBuffer:
        body = self._client.call(
            "/synthesize",
            {
                "text": text,
                "language": language,
                "reference_id": self._client.put_audio(reference),
            },
        )
        return self._client.get_audio(body["audio_id"])


class HttpFaceDetector:
    name = "http-face-detector"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def detect(self, video: bytes) -> list[TimeInterval]:
        body = self._client.call(
            "/detect-faces", {"video_id": self._client.put_artifact(video)}
        )
        return [TimeInterval(item["start_ms"], item["end_ms"]) for item in body["intervals"]]


class HttpLipSyncer:
    name = "http-lip-syncer"
    version = "remote"

    def __init__(self, client: RemoteClient):
        self._client = client

    def sync(self, video: bytes, interval: TimeInterval, audio: AudioBuffer) -> bytes:
        body = self._client.call(
            "/lipsync",
            {
                "video_id": self._client.put_artifact(video),
                "start_ms": interval.start_ms,
                "end_ms": interval.end_ms,
                "audio_id": self._client.put_audio(audio),
            },
        )
        return self._client.get_artifact(body["video_id"])
