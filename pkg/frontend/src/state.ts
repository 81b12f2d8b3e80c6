/**
 * Pure derivations from a project view: which stage buttons are legal,
 * which timeline lanes exist, what the preview should keep audible.
 * Everything here is side-effect free so it can be unit tested without
 * a DOM or a live service.
 */

import type {
  ProgressEvent,
  ProjectView,
  StageName,
  StageState,
  ToneName,
  TrackKind,
  TrackView,
  TranscriptPayload,
} from "./api.js";

export const STAGES: readonly StageName[] = [
  "analysis",
  "translation",
  "conversion",
  "lipsync",
  "export",
];

export const STAGE_LABELS: Record<StageName, string> = {
  analysis: "Analysis",
  translation: "Translation",
  conversion: "Conversion",
  lipsync: "Lip sync",
  export: "Export",
};

export const TONES: readonly ToneName[] = ["formal", "informal", "friendly"];

export const TRACK_ORDER: readonly TrackKind[] = [
  "video",
  "vocals",
  "background",
  "transcript",
  "translated_transcript",
  "dubbed_audio",
  "lipsynced_video",
];

export const TRACK_LABELS: Record<TrackKind, string> = {
  video: "Video",
  vocals: "Vocals",
  background: "Background",
  transcript: "Transcript",
  translated_transcript: "Translated transcript",
  dubbed_audio: "Dubbed audio",
  lipsynced_video: "Lip-synced video",
};

export const AUDIO_TRACKS: readonly TrackKind[] = [
  "vocals",
  "background",
  "dubbed_audio",
];

export const TRANSCRIPT_TRACKS: readonly TrackKind[] = [
  "transcript",
  "translated_transcript",
];

export const SUBTITLE_FORMATS = ["json", "srt", "vtt"] as const;

// How far a project has progressed, and how far each stage requires.
const STATE_LEVEL: Record<string, number> = {
  new: 0,
  analyzed: 1,
  translated: 2,
  converted: 3,
  lipsynced: 4,
  exported: 5,
};

const PREREQ: Record<StageName, number> = {
  analysis: 0,
  translation: 1,
  conversion: 2,
  lipsync: 3,
  export: 3,
};

// A stage's products belong to everything at or above its own level.
const RESULT: Record<StageName, number> = {
  analysis: 1,
  translation: 2,
  conversion: 3,
  lipsync: 4,
  export: 5,
};

export function stateLevel(state: StageState): number {
  if (state.name === "failed") {
    return state.failed_stage ? PREREQ[state.failed_stage] : 0;
  }
  return STATE_LEVEL[state.name] ?? 0;
}

/**
 * Stages the service would accept right now. Completed stages stay legal
 * because re-running one is how you change settings and rebuild.
 */
export function legalStages(view: ProjectView): StageName[] {
  const level = stateLevel(view.stage);
  return STAGES.filter((stage) => level >= PREREQ[stage]);
}

/** True when every product of the stage is present on the project. */
export function isStageDone(view: ProjectView, stage: StageName): boolean {
  switch (stage) {
    case "analysis":
      return ["video", "vocals", "background", "transcript"].every(
        (kind) => view.tracks[kind as TrackKind] !== undefined,
      );
    case "translation":
      return view.tracks.translated_transcript !== undefined;
    case "conversion":
      return view.tracks.dubbed_audio !== undefined;
    case "lipsync":
      return view.tracks.lipsynced_video !== undefined;
    case "export":
      return view.export_artifact !== null;
  }
}

/**
 * Human-readable list of current results a stage run would discard.
 * Empty means the run only adds new material, so no confirmation is
 * needed before triggering it.
 */
export function discardedByRun(view: ProjectView, stage: StageName): string[] {
  const losses: string[] = [];
  for (const kind of TRACK_ORDER) {
    const track = view.tracks[kind];
    if (track && RESULT[track.produced_by] >= RESULT[stage]) {
      losses.push(TRACK_LABELS[kind]);
    }
  }
  if (view.placement_plan !== null && RESULT[stage] <= RESULT.conversion) {
    losses.push("Placement plan");
  }
  if (view.export_artifact !== null) {
    losses.push("Exported video");
  }
  return losses;
}

/** Existing tracks in fixed lane order. */
export function lanes(view: ProjectView): TrackView[] {
  const result: TrackView[] = [];
  for (const kind of TRACK_ORDER) {
    const track = view.tracks[kind];
    if (track) result.push(track);
  }
  return result;
}

/** Client-side lane toggles; absent means visible. */
export type TrackToggles = Partial<Record<TrackKind, boolean>>;

export function laneVisible(toggles: TrackToggles, kind: TrackKind): boolean {
  return toggles[kind] !== false;
}

/** Audio tracks the preview should play: toggled on and actually present. */
export function audibleKinds(view: ProjectView, toggles: TrackToggles): TrackKind[] {
  return AUDIO_TRACKS.filter(
    (kind) => view.tracks[kind] !== undefined && laneVisible(toggles, kind),
  );
}

/** Latest progress event per stage, in arrival order. */
export function progressByStage(
  events: readonly ProgressEvent[],
): Map<StageName, ProgressEvent> {
  const latest = new Map<StageName, ProgressEvent>();
  for (const event of events) {
    latest.set(event.stage, event);
  }
  return latest;
}

export type StageStatus = "locked" | "available" | "done" | "running" | "failed";

export interface StageDescriptor {
  stage: StageName;
  label: string;
  status: StageStatus;
  /** 0..1 for the in-flight stage, 1 for done stages, 0 otherwise. */
  fraction: number;
  message: string;
}

/** One row per stage for the stepper, ready to render. */
export function describeStages(
  view: ProjectView,
  events: readonly ProgressEvent[],
): StageDescriptor[] {
  const legal = new Set(legalStages(view));
  const progress = progressByStage(events);
  const running = view.busy ? lastEventStage(events) : null;
  return STAGES.map((stage) => {
    let status: StageStatus;
    if (view.busy && stage === running) {
      status = "running";
    } else if (view.stage.name === "failed" && view.stage.failed_stage === stage) {
      status = "failed";
    } else if (isStageDone(view, stage)) {
      status = "done";
    } else if (legal.has(stage)) {
      status = "available";
    } else {
      status = "locked";
    }
    const event = progress.get(stage);
    const fraction =
      status === "running" ? (event?.fraction ?? 0) : status === "done" ? 1 : 0;
    const message = status === "running" ? (event?.message ?? "") : "";
    return { stage, label: STAGE_LABELS[stage], status, fraction, message };
  });
}

function lastEventStage(events: readonly ProgressEvent[]): StageName | null {
  const last = events[events.length - 1];
  return last ? last.stage : null;
}

export interface SegmentBlock {
  leftPct: number;
  widthPct: number;
  title: string;
}

/** Proportional layout for transcript segments on a lane. */
export function segmentBlocks(
  payload: TranscriptPayload,
  durationMs: number,
): SegmentBlock[] {
  if (durationMs <= 0) return [];
  return payload.segments.map((segment) => ({
    leftPct: (100 * segment.start_ms) / durationMs,
    widthPct: Math.max((100 * (segment.end_ms - segment.start_ms)) / durationMs, 0.2),
    title: `${segment.speaker} ${formatMs(segment.start_ms)}-${formatMs(segment.end_ms)}: ${segment.text}`,
  }));
}

export function formatMs(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}
