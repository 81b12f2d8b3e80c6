/**
 * Bottom panel: one lane per existing track in fixed order, each with a
 * visibility toggle and a download link. Transcript lanes render their
 * segments as blocks positioned proportionally to the video duration.
 */

import type { ProjectView, TrackKind, TranscriptPayload } from "./api.js";
import {
  lanes,
  laneVisible,
  segmentBlocks,
  SUBTITLE_FORMATS,
  TRACK_LABELS,
  TRANSCRIPT_TRACKS,
  type TrackToggles,
} from "./state.js";

export interface TimelineProps {
  view: ProjectView;
  toggles: TrackToggles;
  transcripts: Partial<Record<TrackKind, TranscriptPayload>>;
  trackUrl: (kind: TrackKind, format?: string) => string;
  exportUrl: () => string;
  onToggle: (kind: TrackKind, visible: boolean) => void;
}

export function renderTimeline(root: HTMLElement, props: TimelineProps): void {
  const { view } = props;
  root.textContent = "";

  if (Object.keys(view.tracks).length === 0) {
    const empty = document.createElement("p");
    empty.className = "timeline-empty";
    empty.textContent = "No tracks yet. Run Analysis to populate the timeline.";
    root.appendChild(empty);
    return;
  }

  for (const track of lanes(view)) {
    const lane = document.createElement("div");
    lane.className = "lane";
    lane.dataset.kind = track.kind;
    if (!laneVisible(props.toggles, track.kind)) lane.classList.add("lane-hidden");

    const header = document.createElement("div");
    header.className = "lane-header";

    const toggleLabel = document.createElement("label");
    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.className = "lane-toggle";
    toggle.checked = laneVisible(props.toggles, track.kind);
    toggle.addEventListener("change", () => props.onToggle(track.kind, toggle.checked));
    toggleLabel.appendChild(toggle);
    toggleLabel.appendChild(document.createTextNode(` ${TRACK_LABELS[track.kind]}`));
    header.appendChild(toggleLabel);

    const isTranscript = TRANSCRIPT_TRACKS.includes(track.kind);
    const download = document.createElement("a");
    download.className = "lane-download";
    download.textContent = "Download";
    download.setAttribute("download", "");

    if (isTranscript) {
      const formatSelect = document.createElement("select");
      formatSelect.className = "format-select";
      for (const format of SUBTITLE_FORMATS) {
        const option = document.createElement("option");
        option.value = format;
        option.textContent = format.toUpperCase();
        formatSelect.appendChild(option);
      }
      download.href = props.trackUrl(track.kind, formatSelect.value);
      formatSelect.addEventListener("change", () => {
        download.href = props.trackUrl(track.kind, formatSelect.value);
      });
      header.appendChild(formatSelect);
    } else {
      download.href = props.trackUrl(track.kind);
    }
    header.appendChild(download);
    lane.appendChild(header);

    const body = document.createElement("div");
    body.className = "lane-body";
    const transcript = props.transcripts[track.kind];
    if (isTranscript && transcript) {
      for (const block of segmentBlocks(transcript, view.video_duration_ms)) {
        const segment = document.createElement("div");
        segment.className = "segment-block";
        segment.style.left = `${block.leftPct}%`;
        segment.style.width = `${block.widthPct}%`;
        segment.title = block.title;
        body.appendChild(segment);
      }
    } else {
      const bar = document.createElement("div");
      bar.className = "lane-bar";
      bar.style.width = "100%";
      body.appendChild(bar);
    }
    lane.appendChild(body);
    root.appendChild(lane);
  }

  if (view.export_artifact !== null) {
    const row = document.createElement("div");
    row.className = "export-row";
    const link = document.createElement("a");
    link.className = "export-download";
    link.href = props.exportUrl();
    link.setAttribute("download", "");
    link.textContent = "Download exported video";
    row.appendChild(link);
    root.appendChild(row);
  }
}
