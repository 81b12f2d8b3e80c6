"""Command line tests: headless runs, transcript validation, and the
configuration failure paths."""

from __future__ import annotations

import json

from click.testing import CliRunner

from dubkit.cli import main
from dubkit.engines.stubmedia import read_stub_video
from dubkit.model import transcript_to_json
from helpers import fixture_media, random_transcript

import random


def invoke(args, **kwargs):
    return CliRunner().invoke(main, args, **kwargs)


def write_media(tmp_path, name="lecture.dubstub", duration_ms=20_000):
    path = tmp_path / name
    path.write_bytes(fixture_media(duration_ms))
    return path


def test_run_writes_every_output(tmp_path):
    media = write_media(tmp_path)
    out = tmp_path / "out"
    result = invoke(
        ["run", "--input", str(media), "--target", "vi", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    names = {entry.name for entry in out.iterdir() if entry.is_file()}
    assert names >= {
        "project.json",
        "runs.jsonl",
        "video.dubstub",
        "vocals.wav",
        "background.wav",
        "transcript.json",
        "translated_transcript.json",
        "dubbed_audio.wav",
        "lipsynced_video.dubstub",
        "placement_plan.json",
        "export.dubstub",
    }
    header, _ = read_stub_video((out / "export.dubstub").read_bytes())
    assert abs(header["duration_ms"] - 20_000) <= 50
    project = json.loads((out / "project.json").read_text())
    assert project["stage"]["name"] == "exported"
    runs = [json.loads(line) for line in (out / "runs.jsonl").read_text().splitlines()]
    assert [run["stage"] for run in runs] == [
        "analysis", "translation", "conversion", "lipsync", "export",
    ]


def test_run_skip_lipsync(tmp_path):
    media = write_media(tmp_path)
    out = tmp_path / "out"
    result = invoke(
        ["run", "--input", str(media), "--target", "vi",
         "--skip-lipsync", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert not (out / "lipsynced_video.dubstub").exists()
    assert (out / "export.dubstub").exists()


def test_run_rejects_unreadable_media(tmp_path):
    media = tmp_path / "garbage.bin"
    media.write_bytes(b"definitely not media")
    result = invoke(
        ["run", "--input", str(media), "--target", "vi",
         "--out", str(tmp_path / "out")]
    )
    assert result.exit_code == 1


def test_run_usage_errors(tmp_path):
    media = write_media(tmp_path)
    missing_input = invoke(
        ["run", "--input", str(tmp_path / "nope.dubstub"), "--target", "vi",
         "--out", str(tmp_path / "out")]
    )
    assert missing_input.exit_code == 2

    bad_tone = invoke(
        ["run", "--input", str(media), "--target", "vi",
         "--tone", "sarcastic", "--out", str(tmp_path / "out")]
    )
    assert bad_tone.exit_code == 2

    no_target = invoke(["run", "--input", str(media), "--out", str(tmp_path / "out")])
    assert no_target.exit_code == 2


def test_run_rejects_bad_config(tmp_path):
    media = write_media(tmp_path)
    config = tmp_path / "dubkit.yaml"
    config.write_text("port: 900000\n", encoding="utf-8")
    result = invoke(
        ["run", "--input", str(media), "--target", "vi",
         "--out", str(tmp_path / "out"), "--config", str(config)]
    )
    assert result.exit_code == 1


def test_serve_rejects_bad_config(tmp_path):
    config = tmp_path / "dubkit.yaml"
    config.write_text("adapter_mode: hybrid\n", encoding="utf-8")
    result = invoke(["serve", "--config", str(config)])
    assert result.exit_code == 1


def test_validate_accepts_valid_transcript(tmp_path):
    transcript = random_transcript(random.Random(5), max_segments=8)
    path = tmp_path / "talk.json"
    path.write_text(transcript_to_json(transcript), encoding="utf-8")
    result = invoke(["validate", "--transcript", str(path)])
    assert result.exit_code == 0
    assert "transcript ok" in result.output


def test_validate_reports_overlap(tmp_path):
    payload = {
        "language": "en",
        "segments": [
            {"id": "a", "speaker": "S1", "start_ms": 0, "end_ms": 1000, "text": "one"},
            {"id": "b", "speaker": "S1", "start_ms": 500, "end_ms": 1500, "text": "two"},
        ],
    }
    path = tmp_path / "talk.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    result = invoke(["validate", "--transcript", str(path)])
    assert result.exit_code == 1
    report = result.output + (result.stderr or "")
    assert "same-speaker-overlap" in report


def test_validate_reports_parse_error(tmp_path):
    path = tmp_path / "talk.srt"
    path.write_text("this is not an srt file at all", encoding="utf-8")
    result = invoke(["validate", "--transcript", str(path)])
    assert result.exit_code == 1


def test_validate_unknown_extension(tmp_path):
    path = tmp_path / "talk.txt"
    path.write_text("whatever", encoding="utf-8")
    result = invoke(["validate", "--transcript", str(path)])
    assert result.exit_code == 2


def test_help_and_version():
    assert invoke(["--help"]).exit_code == 0
    version = invoke(["--version"])
    assert version.exit_code == 0
    assert "dubkit" in version.output
