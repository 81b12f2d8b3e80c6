import { beforeEach, describe, expect, it } from "vitest";

import type { ProjectView, TrackKind, TranscriptPayload } from "../src/api.js";
import { renderTimeline, type TimelineProps } from "../src/timeline.js";

import viewNew from "./fixtures/view_new.json";
import viewAnalyzed from "./fixtures/view_analyzed.json";
import viewExported from "./fixtures/view_exported.json";
import transcriptFixture from "./fixtures/track_transcript.json";

const asView = (fixture: unknown) => fixture as ProjectView;
const transcript = transcriptFixture as TranscriptPayload;

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="timeline"></div>';
  root = document.getElementById("timeline")!;
});

function render(overrides: Partial<TimelineProps> & { view: ProjectView }): {
  toggled: Array<[TrackKind, boolean]>;
} {
  const toggled: Array<[TrackKind, boolean]> = [];
  renderTimeline(root, {
    toggles: {},
    transcripts: {},
    trackUrl: (kind, format) =>
      `/projects/${overrides.view.id}/tracks/${kind}${format ? `?format=${format}` : ""}`,
    exportUrl: () => `/projects/${overrides.view.id}/export`,
    onToggle: (kind, visible) => toggled.push([kind, visible]),
    ...overrides,
  });
  return { toggled };
}

function laneKinds(): string[] {
  return [...root.querySelectorAll<HTMLElement>(".lane")].map((l) => l.dataset.kind!);
}

describe("lane layout", () => {
  it("shows a placeholder before analysis", () => {
    render({ view: asView(viewNew) });
    expect(root.querySelector(".timeline-empty")).not.toBeNull();
    expect(laneKinds()).toEqual([]);
  });

  it("shows exactly the four analysis lanes in order", () => {
    render({ view: asView(viewAnalyzed) });
    expect(laneKinds()).toEqual(["video", "vocals", "background", "transcript"]);
  });

  it("shows all seven lanes in fixed order when complete", () => {
    render({ view: asView(viewExported) });
    expect(laneKinds()).toEqual([
      "video",
      "vocals",
      "background",
      "transcript",
      "translated_transcript",
      "dubbed_audio",
      "lipsynced_video",
    ]);
  });
});

describe("downloads", () => {
  it("links each lane to its track endpoint", () => {
    const view = asView(viewExported);
    render({ view });
    const vocals = root.querySelector<HTMLAnchorElement>(
      '.lane[data-kind="vocals"] .lane-download',
    )!;
    expect(vocals.getAttribute("href")).toBe(`/projects/${view.id}/tracks/vocals`);
    const video = root.querySelector<HTMLAnchorElement>(
      '.lane[data-kind="lipsynced_video"] .lane-download',
    )!;
    expect(video.getAttribute("href")).toBe(
      `/projects/${view.id}/tracks/lipsynced_video`,
    );
  });

  it("downloads transcripts in the chosen subtitle format", () => {
    const view = asView(viewExported);
    render({ view });
    const lane = root.querySelector<HTMLElement>('.lane[data-kind="transcript"]')!;
    const select = lane.querySelector<HTMLSelectElement>(".format-select")!;
    const link = lane.querySelector<HTMLAnchorElement>(".lane-download")!;
    expect([...select.options].map((o) => o.value)).toEqual(["json", "srt", "vtt"]);
    expect(link.getAttribute("href")).toBe(
      `/projects/${view.id}/tracks/transcript?format=json`,
    );
    select.value = "srt";
    select.dispatchEvent(new Event("change"));
    expect(link.getAttribute("href")).toBe(
      `/projects/${view.id}/tracks/transcript?format=srt`,
    );
  });

  it("offers the export artifact once present", () => {
    const view = asView(viewExported);
    render({ view });
    const link = root.querySelector<HTMLAnchorElement>(".export-download")!;
    expect(link.getAttribute("href")).toBe(`/projects/${view.id}/export`);
  });

  it("hides the export link before export", () => {
    render({ view: asView(viewAnalyzed) });
    expect(root.querySelector(".export-download")).toBeNull();
  });
});

describe("visibility toggles", () => {
  it("reports toggle changes", () => {
    const { toggled } = render({ view: asView(viewAnalyzed) });
    const box = root.querySelector<HTMLInputElement>(
      '.lane[data-kind="vocals"] .lane-toggle',
    )!;
    box.checked = false;
    box.dispatchEvent(new Event("change"));
    expect(toggled).toEqual([["vocals", false]]);
  });

  it("dims lanes that are toggled off", () => {
    render({ view: asView(viewAnalyzed), toggles: { vocals: false } });
    const lane = root.querySelector('.lane[data-kind="vocals"]')!;
    expect(lane.className).toContain("lane-hidden");
    const box = lane.querySelector<HTMLInputElement>(".lane-toggle")!;
    expect(box.checked).toBe(false);
  });
});

describe("transcript blocks", () => {
  it("draws one proportional block per segment", () => {
    const view = asView(viewAnalyzed);
    render({ view, transcripts: { transcript } });
    const blocks = [
      ...root.querySelectorAll<HTMLElement>(
        '.lane[data-kind="transcript"] .segment-block',
      ),
    ];
    expect(blocks.length).toBe(transcript.segments.length);
    const first = transcript.segments[0]!;
    const expectedLeft = (100 * first.start_ms) / view.video_duration_ms;
    const expectedWidth =
      (100 * (first.end_ms - first.start_ms)) / view.video_duration_ms;
    expect(parseFloat(blocks[0]!.style.left)).toBeCloseTo(expectedLeft, 3);
    expect(parseFloat(blocks[0]!.style.width)).toBeCloseTo(expectedWidth, 3);
    expect(blocks[0]!.title).toContain(first.text);
  });

  it("falls back to a full-width bar without transcript data", () => {
    render({ view: asView(viewAnalyzed) });
    const lane = root.querySelector('.lane[data-kind="vocals"]')!;
    expect(lane.querySelector(".lane-bar")).not.toBeNull();
    expect(lane.querySelectorAll(".segment-block")).toHaveLength(0);
  });
});
