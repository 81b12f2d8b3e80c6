/**
 * Left panel: the source video with client-side audio switching. Each
 * audible track gets its own audio element kept in step with the video,
 * so toggling lanes changes what you hear without re-rendering media.
 */

import type { ProjectView, TrackKind } from "./api.js";
import { audibleKinds, TRACK_LABELS, type TrackToggles } from "./state.js";

export interface PreviewProps {
  view: ProjectView;
  toggles: TrackToggles;
  trackUrl: (kind: TrackKind) => string;
}

export function renderPreview(root: HTMLElement, props: PreviewProps): void {
  const { view } = props;
  root.textContent = "";

  const videoTrack = view.tracks.video;
  if (!videoTrack) {
    const empty = document.createElement("p");
    empty.className = "preview-empty";
    empty.textContent = "Run Analysis to load the video preview.";
    root.appendChild(empty);
    return;
  }

  const video = document.createElement("video");
  video.className = "preview-video";
  video.controls = true;
  video.muted = true; // sound comes from the per-track audio elements
  video.src = props.trackUrl("video");
  root.appendChild(video);

  const audible = audibleKinds(view, props.toggles);
  const players: HTMLAudioElement[] = [];
  for (const kind of audible) {
    const audio = document.createElement("audio");
    audio.dataset.kind = kind;
    audio.preload = "auto";
    audio.src = props.trackUrl(kind);
    root.appendChild(audio);
    players.push(audio);
  }

  const caption = document.createElement("p");
  caption.className = "audible-caption";
  caption.textContent =
    audible.length > 0
      ? `Audible: ${audible.map((kind) => TRACK_LABELS[kind]).join(", ")}`
      : "Audible: none";
  root.appendChild(caption);

  const forEachPlayer = (action: (audio: HTMLAudioElement) => void) => {
    for (const audio of players) {
      try {
        action(audio);
      } catch {
        // media playback is unavailable in non-browser environments
      }
    }
  };
  video.addEventListener("play", () => forEachPlayer((a) => void a.play()));
  video.addEventListener("pause", () => forEachPlayer((a) => a.pause()));
  video.addEventListener("seeked", () =>
    forEachPlayer((a) => {
      a.currentTime = video.currentTime;
    }),
  );
}
