"""Staged dubbing orchestrator.

Drives Analysis, Translation, Conversion, Lipsync and Export over an adapter
set, recording produced tracks and stage runs on the project. Stage ordering
is enforced by a small pure transition function so the state machine can be
checked exhaustively; Lipsync is optional (Converted exports directly).
"""

from __future__ import annotations

import io
import zipfile
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable

from .alignment import SpeechRateModel, StretchPolicy, plan_placement
from .engines import EngineAdapterSet
from .engines.audio import AudioBuffer, mix_tracks, render_dub_track
from .engines.stubmedia import MAGIC as STUB_MAGIC
from .errors import (
    DubkitError,
    MediaError,
    MissingTrackError,
    OutOfOrderError,
    StageExecutionError,
    TranscriptInvalidError,
)
from .model import (
    STATE_ANALYZED,
    STATE_CONVERTED,
    STATE_EXPORTED,
    STATE_LIPSYNCED,
    STATE_ORDER,
    STATE_TRANSLATED,
    Project,
    SpeakerLabel,
    StageState,
    TimeInterval,
    ToneMode,
    Track,
    TrackKind,
    Transcript,
    filter_pad_intervals,
    merge_adjacent_segments,
    normalize_intervals,
    transcript_from_json,
    transcript_to_json,
    validate_transcript,
)
from .storage import ArtifactStore
from .subtitles import SubtitleFormat, emit_subtitles
from .translation import TranslationOptions, translate_segments

STAGES = ("analysis", "translation", "conversion", "lipsync", "export")

# Minimum completed level a stage needs; export only needs Converted because
# lip-sync is skippable.
_PREREQ_LEVEL = {
    "analysis": 0,
    "translation": 1,
    "conversion": 2,
    "lipsync": 3,
    "export": 3,
}

_SUCCESS_STATE = {
    "analysis": STATE_ANALYZED,
    "translation": STATE_TRANSLATED,
    "conversion": STATE_CONVERTED,
    "lipsync": STATE_LIPSYNCED,
    "export": STATE_EXPORTED,
}

STAGE_TRACKS: dict[str, tuple[TrackKind, ...]] = {
    "analysis": (
        TrackKind.VIDEO,
        TrackKind.VOCALS,
        TrackKind.BACKGROUND,
        TrackKind.TRANSCRIPT,
    ),
    "translation": (TrackKind.TRANSLATED_TRANSCRIPT,),
    "conversion": (TrackKind.DUBBED_AUDIO,),
    "lipsync": (TrackKind.LIPSYNCED_VIDEO,),
    "export": (),
}

_STAGE_ADAPTERS = {
    "analysis": ("media", "separator", "transcriber", "diarizer"),
    "translation": ("translator",),
    "conversion": ("synthesizer",),
    "lipsync": ("face_detector", "lip_syncer", "media"),
    "export": ("media",),
}

REFERENCE_FLOOR_MS = 3000


def stage_level(state: StageState) -> int:
    """Completed-progress level of a state; a failure keeps the level its
    prerequisites established, so the failed stage stays re-runnable."""
    if state.is_failed:
        return _PREREQ_LEVEL[state.failed_stage]
    return STATE_ORDER.index(state.name)


def transition(state: StageState, requested: str) -> StageState:
    """Pure state-machine step: the state after ``requested`` succeeds."""
    if requested not in _PREREQ_LEVEL:
        raise ValueError(f"unknown stage {requested!r}")
    if stage_level(state) < _PREREQ_LEVEL[requested]:
        raise OutOfOrderError(requested, state.describe())
    return _SUCCESS_STATE[requested]


@dataclass(frozen=True, slots=True)
class ProgressEvent:
    project_id: str
    stage: str
    fraction: float
    message: str


@dataclass
class StageRun:
    """Append-only record of one stage execution."""

    stage: str
    started_at: str
    finished_at: str | None = None
    adapter_versions: dict[str, str] = field(default_factory=dict)
    produced: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "adapter_versions": dict(self.adapter_versions),
            "produced": list(self.produced),
            "warnings": list(self.warnings),
            "error": self.error,
        }


@dataclass(frozen=True)
class PipelineSettings:
    stretch_policy: StretchPolicy = field(default_factory=StretchPolicy)
    rates: SpeechRateModel = field(default_factory=SpeechRateModel)
    merge_gap_ms: int = 300
    merge_max_chars: int = 200
    batch_size: int = 12
    max_attempts: int = 2
    background_gain: float = 1.0
    lipsync_min_duration_ms: int = 500
    lipsync_pad_ms: int = 120


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def media_type_of(media: bytes) -> str:
    return "video/x-dubstub" if media.startswith(STUB_MAGIC) else "video/mp4"


class PipelineRunner:
    """Executes stages against one adapter set and artifact store."""

    def __init__(
        self,
        adapters: EngineAdapterSet,
        artifacts: ArtifactStore,
        settings: PipelineSettings | None = None,
        on_event: Callable[[ProgressEvent], None] | None = None,
    ):
        self.adapters = adapters
        self.artifacts = artifacts
        self.settings = settings if settings is not None else PipelineSettings()
        self._on_event = on_event

    # -- lifecycle -----------------------------------------------------------

    def create_project(
        self,
        media: bytes,
        *,
        project_id: str,
        target_language: str,
        tone: ToneMode,
        multi_speaker: bool,
        source_language: str | None = None,
    ) -> Project:
        duration = self.adapters.media.probe_duration_ms(media)
        artifact = self.artifacts.put(media)
        return Project(
            id=project_id,
            source_asset=artifact,
            source_language=source_language,
            target_language=target_language,
            tone=tone,
            multi_speaker=multi_speaker,
            video_duration_ms=duration,
        )

    def advance(self, project: Project, requested: str) -> tuple[Project, StageRun]:
        """Runs one stage; returns the updated project plus its run record.

        Stage errors do not propagate: the project comes back in
        ``Failed(stage, reason)`` with the failing stage re-runnable.
        """
        target_state = transition(project.stage, requested)
        run = StageRun(
            stage=requested,
            started_at=_now(),
            adapter_versions=self._versions_for(requested),
        )
        base = self._invalidate_from(project, requested)
        self._emit(project.id, requested, 0.0, "started")
        try:
            updated = self._runner_for(requested)(base, run)
        except Exception as exc:
            reason = exc.message if isinstance(exc, DubkitError) else f"{type(exc).__name__}: {exc}"
            run.error = reason
            run.finished_at = _now()
            self._emit(project.id, requested, 1.0, f"failed: {reason}")
            return replace(base, stage=StageState.failed(requested, reason)), run
        run.produced = [kind.value for kind in STAGE_TRACKS[requested]]
        run.finished_at = _now()
        self._emit(project.id, requested, 1.0, "complete")
        return replace(updated, stage=target_state), run

    def run_all(
        self, project: Project, skip_lipsync: bool = False
    ) -> tuple[Project, list[StageRun]]:
        runs: list[StageRun] = []
        stages = [s for s in STAGES if not (skip_lipsync and s == "lipsync")]
        for stage in stages:
            project, run = self.advance(project, stage)
            runs.append(run)
            if project.stage.is_failed:
                break
        return project, runs

    # -- helpers ---------------------------------------------------------------

    def _emit(self, project_id: str, stage: str, fraction: float, message: str) -> None:
        if self._on_event is not None:
            self._on_event(ProgressEvent(project_id, stage, fraction, message))

    def _versions_for(self, stage: str) -> dict[str, str]:
        out = {}
        for attr in _STAGE_ADAPTERS[stage]:
            adapter = getattr(self.adapters, attr)
            out[adapter.name] = adapter.version
        return out

    def _runner_for(self, stage: str):
        return {
            "analysis": self._run_analysis,
            "translation": self._run_translation,
            "conversion": self._run_conversion,
            "lipsync": self._run_lipsync,
            "export": self._run_export,
        }[stage]

    def _invalidate_from(self, project: Project, stage: str) -> Project:
        """Strips the stage's own tracks plus everything downstream before the
        re-run; export output is always stale once any stage re-runs."""
        doomed: set[TrackKind] = set()
        for name in STAGES[STAGES.index(stage):]:
            doomed.update(STAGE_TRACKS[name])
        tracks = {k: t for k, t in project.tracks.items() if k not in doomed}
        speakers = () if stage == "analysis" else project.speakers
        plan = None if STAGES.index(stage) <= STAGES.index("conversion") else project.placement_plan
        return replace(
            project,
            tracks=tracks,
            speakers=speakers,
            placement_plan=plan,
            export_artifact=None,
        )

    def _require_track(self, project: Project, kind: TrackKind) -> Track:
        track = project.track(kind)
        if track is None:
            raise MissingTrackError(kind.value)
        return track

    def _load_transcript(self, project: Project, kind: TrackKind) -> Transcript:
        track = self._require_track(project, kind)
        return transcript_from_json(self.artifacts.get(track.artifact).decode("utf-8"))

    def _load_audio(self, project: Project, kind: TrackKind) -> AudioBuffer:
        track = self._require_track(project, kind)
        return AudioBuffer.from_wav_bytes(self.artifacts.get(track.artifact))

    @staticmethod
    def _grow_reference(vocals: AudioBuffer, interval: TimeInterval) -> AudioBuffer:
        total = vocals.duration_ms
        if total <= REFERENCE_FLOOR_MS:
            return vocals.slice_ms(0, total)
        start, end = interval.start_ms, interval.end_ms
        if end - start < REFERENCE_FLOOR_MS:
            end = min(total, end + (REFERENCE_FLOOR_MS - (end - start)))
            start = max(0, start - (REFERENCE_FLOOR_MS - (end - start)))
        return vocals.slice_ms(start, end)

    # -- stages ----------------------------------------------------------------

    def _run_analysis(self, project: Project, run: StageRun) -> Project:
        media = self.artifacts.get(project.source_asset)
        duration = self.adapters.media.probe_duration_ms(media)
        self._emit(project.id, "analysis", 0.1, "separating tracks")
        audio = self.adapters.media.demux_audio(media)
        vocals, background = self.adapters.separator.separate(audio)
        self._emit(project.id, "analysis", 0.4, "transcribing")
        transcript = self.adapters.transcriber.transcribe(vocals)
        issues = validate_transcript(transcript)
        if issues:
            raise TranscriptInvalidError("transcriber output failed validation", issues)

        self._emit(project.id, "analysis", 0.7, "assigning speakers")
        if project.multi_speaker:
            result = self.adapters.diarizer.diarize(vocals, transcript, True)
            labels = dict(result.segment_speakers)
            clips = dict(result.reference_clips)
        else:
            labels = {segment.id: "S1" for segment in transcript.segments}
            clips = {}
            if transcript.segments:
                longest = max(
                    transcript.segments, key=lambda s: s.interval.duration_ms
                )
                clips["S1"] = self._grow_reference(vocals, longest.interval)
        missing = [s.id for s in transcript.segments if s.id not in labels]
        if missing:
            raise StageExecutionError(f"diarizer left segments unlabeled: {missing}")
        labeled = Transcript(
            transcript.language,
            tuple(
                replace(segment, speaker=labels[segment.id])
                for segment in transcript.segments
            ),
        )
        issues = validate_transcript(labeled)
        if issues:
            raise TranscriptInvalidError("speaker labeling broke validation", issues)

        self._emit(project.id, "analysis", 0.9, "storing tracks")
        speakers = tuple(
            SpeakerLabel(name, self.artifacts.put(clips[name].to_wav_bytes()))
            for name in labeled.speakers
            if name in clips
        )
        tracks = dict(project.tracks)
        tracks[TrackKind.VIDEO] = Track(
            TrackKind.VIDEO, project.source_asset, "analysis", media_type_of(media)
        )
        tracks[TrackKind.VOCALS] = Track(
            TrackKind.VOCALS,
            self.artifacts.put(vocals.to_wav_bytes()),
            "analysis",
            "audio/wav",
        )
        tracks[TrackKind.BACKGROUND] = Track(
            TrackKind.BACKGROUND,
            self.artifacts.put(background.to_wav_bytes()),
            "analysis",
            "audio/wav",
        )
        tracks[TrackKind.TRANSCRIPT] = Track(
            TrackKind.TRANSCRIPT,
            self.artifacts.put(transcript_to_json(labeled).encode("utf-8")),
            "analysis",
            "application/json",
        )
        return replace(
            project,
            tracks=tracks,
            speakers=speakers,
            source_language=labeled.language,
            video_duration_ms=duration,
        )

    def _run_translation(self, project: Project, run: StageRun) -> Project:
        transcript = self._load_transcript(project, TrackKind.TRANSCRIPT)
        merged = merge_adjacent_segments(
            transcript, self.settings.merge_gap_ms, self.settings.merge_max_chars
        )
        self._emit(project.id, "translation", 0.3, "translating")
        options = TranslationOptions(
            tone=project.tone,
            source_language=project.source_language or transcript.language,
            target_language=project.target_language,
            batch_size=self.settings.batch_size,
            max_attempts=self.settings.max_attempts,
        )
        result = translate_segments(merged, options, self.adapters.translator)
        for segment_id in sorted(result.untranslated):
            run.warnings.append(f"untranslated: {segment_id}")
        translated = Transcript(
            project.target_language,
            tuple(
                replace(segment, text=result.texts[segment.id], words=())
                for segment in merged.segments
            ),
        )
        tracks = dict(project.tracks)
        tracks[TrackKind.TRANSLATED_TRANSCRIPT] = Track(
            TrackKind.TRANSLATED_TRANSCRIPT,
            self.artifacts.put(transcript_to_json(translated).encode("utf-8")),
            "translation",
            "application/json",
        )
        return replace(project, tracks=tracks)

    def _run_conversion(self, project: Project, run: StageRun) -> Project:
        translated = self._load_transcript(project, TrackKind.TRANSLATED_TRANSCRIPT)
        background = self._load_audio(project, TrackKind.BACKGROUND)
        references = {
            speaker.id: AudioBuffer.from_wav_bytes(self.artifacts.get(speaker.reference_clip))
            for speaker in project.speakers
            if speaker.reference_clip
        }
        clips: dict[str, AudioBuffer] = {}
        durations: dict[str, int] = {}
        total = len(translated.segments)
        for index, segment in enumerate(translated.segments):
            reference = references.get(segment.speaker)
            if reference is None:
                raise StageExecutionError(
                    f"no reference clip for speaker {segment.speaker}"
                )
            clip = self.adapters.synthesizer.synthesize(
                segment.text, project.target_language, reference
            )
            clips[segment.id] = clip
            durations[segment.id] = clip.duration_ms
            self._emit(
                project.id,
                "conversion",
                0.05 + 0.55 * (index + 1) / total,
                f"synthesized {segment.id}",
            )
        plan = plan_placement(
            translated, durations, project.video_duration_ms, self.settings.stretch_policy
        )
        self._emit(project.id, "conversion", 0.7, "placing segments")
        for entry in plan.entries:
            for flag in sorted(flag.value for flag in entry.flags):
                run.warnings.append(f"{flag}: {entry.segment_id}")
        rendered = render_dub_track(
            plan, clips, project.video_duration_ms, background.sample_rate
        )
        self._emit(project.id, "conversion", 0.85, "mixing background")
        mixed = mix_tracks(rendered, background, 1.0, self.settings.background_gain)
        tracks = dict(project.tracks)
        tracks[TrackKind.DUBBED_AUDIO] = Track(
            TrackKind.DUBBED_AUDIO,
            self.artifacts.put(mixed.to_wav_bytes()),
            "conversion",
            "audio/wav",
        )
        plan_id = self.artifacts.put(plan.to_json().encode("utf-8"))
        return replace(project, tracks=tracks, placement_plan=plan_id)

    def _run_lipsync(self, project: Project, run: StageRun) -> Project:
        video_track = self._require_track(project, TrackKind.VIDEO)
        video = self.artifacts.get(video_track.artifact)
        dubbed = self._load_audio(project, TrackKind.DUBBED_AUDIO)
        self._emit(project.id, "lipsync", 0.1, "detecting faces")
        detected = self.adapters.face_detector.detect(video)
        bounds = TimeInterval(0, project.video_duration_ms)
        usable = filter_pad_intervals(
            normalize_intervals(detected),
            self.settings.lipsync_min_duration_ms,
            self.settings.lipsync_pad_ms,
            bounds,
        )
        if not usable:
            run.warnings.append("no face intervals")
            artifact = video_track.artifact
        else:
            replacements = []
            for index, interval in enumerate(usable):
                voice = dubbed.slice_ms(interval.start_ms, interval.end_ms)
                clip = self.adapters.lip_syncer.sync(video, interval, voice)
                replacements.append((interval, clip))
                self._emit(
                    project.id,
                    "lipsync",
                    0.1 + 0.8 * (index + 1) / len(usable),
                    f"synced {interval.start_ms}-{interval.end_ms}",
                )
            output = self.adapters.media.replace_ranges(video, replacements)
            artifact = self.artifacts.put(output)
        tracks = dict(project.tracks)
        tracks[TrackKind.LIPSYNCED_VIDEO] = Track(
            TrackKind.LIPSYNCED_VIDEO, artifact, "lipsync", video_track.media_type
        )
        return replace(project, tracks=tracks)

    def _run_export(self, project: Project, run: StageRun) -> Project:
        self._emit(project.id, "export", 0.5, "muxing")
        data, _ = self.export_bytes(project, None)
        probed = self.adapters.media.probe_duration_ms(data)
        if abs(probed - project.video_duration_ms) > 50:
            raise MediaError(
                f"export duration {probed} ms deviates from source "
                f"{project.video_duration_ms} ms"
            )
        return replace(project, export_artifact=self.artifacts.put(data))

    # -- export selection --------------------------------------------------------

    def export_bytes(
        self,
        project: Project,
        selection: frozenset[TrackKind] | set[TrackKind] | None = None,
        subtitle_format: SubtitleFormat = SubtitleFormat.CANONICAL_JSON,
    ) -> tuple[bytes, str]:
        """Builds the export payload: the default dubbed video, a single
        track verbatim, or a deterministic archive for multi-track picks."""
        if selection is None:
            base = project.track(TrackKind.LIPSYNCED_VIDEO) or project.track(
                TrackKind.VIDEO
            )
            if base is None:
                raise MissingTrackError(TrackKind.VIDEO.value)
            dubbed = self._load_audio(project, TrackKind.DUBBED_AUDIO)
            merged = self.adapters.media.mux(self.artifacts.get(base.artifact), dubbed)
            return merged, base.media_type
        if not selection:
            raise MissingTrackError("selection is empty")
        chosen = sorted(selection, key=lambda kind: kind.value)
        if len(chosen) == 1:
            return self._track_payload(project, chosen[0], subtitle_format)
        archive = io.BytesIO()
        with zipfile.ZipFile(archive, "w", zipfile.ZIP_STORED) as bundle:
            for kind in chosen:
                payload, media_type = self._track_payload(
                    project, kind, subtitle_format
                )
                info = zipfile.ZipInfo(
                    f"{kind.value}{MEDIA_EXTENSIONS.get(media_type, '.bin')}",
                    date_time=(1980, 1, 1, 0, 0, 0),
                )
                bundle.writestr(info, payload)
        return archive.getvalue(), "application/zip"

    def _track_payload(
        self, project: Project, kind: TrackKind, subtitle_format: SubtitleFormat
    ) -> tuple[bytes, str]:
        track = self._require_track(project, kind)
        data = self.artifacts.get(track.artifact)
        if kind in (TrackKind.TRANSCRIPT, TrackKind.TRANSLATED_TRANSCRIPT):
            if subtitle_format is not SubtitleFormat.CANONICAL_JSON:
                transcript = transcript_from_json(data.decode("utf-8"))
                text = emit_subtitles(transcript, subtitle_format)
                media_type = (
                    "application/x-subrip"
                    if subtitle_format is SubtitleFormat.SRT
                    else "text/vtt"
                )
                return text.encode("utf-8"), media_type
        return data, track.media_type


MEDIA_EXTENSIONS = {
    "video/x-dubstub": ".dubstub",
    "video/mp4": ".mp4",
    "audio/wav": ".wav",
    "application/json": ".json",
    "application/x-subrip": ".srt",
    "text/vtt": ".vtt",
}
