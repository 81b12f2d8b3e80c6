"""Command line front end: headless pipeline runs, the API server, and
transcript validation.

Exit codes: 0 success, 1 pipeline/validation failure, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import uvicorn

from . import __version__
from .config import load_config
from .errors import ConfigError, DubkitError
from .model import ToneMode, transcript_from_json, validate_transcript
from .pipeline import MEDIA_EXTENSIONS, PipelineRunner
from .service import build_adapters, create_app
from .storage import ArtifactStore, project_to_dict
from .subtitles import SubtitleFormat, format_for_path, parse_subtitles


@click.group()
@click.version_option(__version__, prog_name="dubkit")
def main():
    """Academic-video dubbing pipeline."""


def _echo_progress(event) -> None:
    click.echo(f"[{event.stage}] {event.fraction:>4.0%} {event.message}", err=True)


@main.command()
@click.option(
    "--input", "input_path", required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Source media file.",
)
@click.option("--target", required=True, help="Target language tag, e.g. vi.")
@click.option("--source", default=None, help="Source language; detected when omitted.")
@click.option(
    "--tone", type=click.Choice([t.value for t in ToneMode]), default="formal",
    show_default=True,
)
@click.option("--multi-speaker", is_flag=True, help="Enable speaker diarization.")
@click.option("--skip-lipsync", is_flag=True, help="Export without lip synchronization.")
@click.option(
    "--out", "out_dir", required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Output directory for the export and track files.",
)
@click.option(
    "--config", "config_path", default=None,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
def run(input_path, target, source, tone, multi_speaker, skip_lipsync, out_dir, config_path):
    """Run the full pipeline headless and write every produced file."""
    try:
        cfg = load_config(config_path)
        adapters = build_adapters(cfg)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc.message}", err=True)
        sys.exit(1)

    out_dir.mkdir(parents=True, exist_ok=True)
    store = ArtifactStore(out_dir / ".artifacts")
    runner = PipelineRunner(
        adapters, store, settings=cfg.pipeline_settings(), on_event=_echo_progress
    )
    try:
        project = runner.create_project(
            input_path.read_bytes(),
            project_id=input_path.stem[:32] or "project",
            target_language=target,
            tone=ToneMode(tone),
            multi_speaker=multi_speaker,
            source_language=source,
        )
    except (DubkitError, ValueError) as exc:
        click.echo(f"cannot start pipeline: {exc}", err=True)
        sys.exit(1)

    project, runs = runner.run_all(project, skip_lipsync=skip_lipsync)

    (out_dir / "project.json").write_text(
        json.dumps(project_to_dict(project), indent=2) + "\n", encoding="utf-8"
    )
    with (out_dir / "runs.jsonl").open("w", encoding="utf-8") as handle:
        for stage_run in runs:
            handle.write(json.dumps(stage_run.to_dict()) + "\n")

    for kind, track in project.tracks.items():
        extension = MEDIA_EXTENSIONS.get(track.media_type, ".bin")
        (out_dir / f"{kind.value}{extension}").write_bytes(store.get(track.artifact))
    if project.placement_plan is not None:
        (out_dir / "placement_plan.json").write_bytes(
            store.get(project.placement_plan)
        )
    if project.export_artifact is not None:
        export = store.get(project.export_artifact)
        extension = ".dubstub" if cfg.adapter_mode == "mock" else ".mp4"
        (out_dir / f"export{extension}").write_bytes(export)

    if project.stage.is_failed:
        click.echo(
            f"pipeline failed at {project.stage.failed_stage}: {project.stage.reason}",
            err=True,
        )
        sys.exit(1)
    click.echo(f"export written to {out_dir}")


@main.command()
@click.option(
    "--config", "config_path", default=None,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--host", default=None, help="Override the configured listen host.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
def serve(config_path, host, port):
    """Start the HTTP service."""
    try:
        cfg = load_config(config_path)
        app = create_app(cfg)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc.message}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=host or cfg.host, port=port or cfg.port)


@main.command()
@click.option(
    "--transcript", "transcript_path", required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
def validate(transcript_path):
    """Check a transcript file (canonical JSON, SRT, or VTT) and print a report."""
    try:
        fmt = format_for_path(str(transcript_path))
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    text = transcript_path.read_text(encoding="utf-8")
    try:
        if fmt is SubtitleFormat.CANONICAL_JSON:
            transcript = transcript_from_json(text)
        else:
            transcript = parse_subtitles(text, fmt).transcript
    except DubkitError as exc:
        click.echo(f"parse error: {exc.message}", err=True)
        sys.exit(1)
    issues = validate_transcript(transcript)
    if issues:
        for issue in issues:
            names = ", ".join(issue.segment_ids)
            click.echo(f"{issue.rule}: [{names}] {issue.detail}", err=True)
        sys.exit(1)
    click.echo(f"transcript ok: {len(transcript.segments)} segments")
