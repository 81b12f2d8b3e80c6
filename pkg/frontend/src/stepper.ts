/**
 * Middle panel: one row per pipeline stage with a trigger button and a
 * progress bar, plus the project settings and any warnings or errors.
 */

import type { ErrorBody, ProgressEvent, ProjectView, StageName } from "./api.js";
import {
  describeStages,
  discardedByRun,
  legalStages,
  TONES,
} from "./state.js";

export interface StepperProps {
  view: ProjectView;
  events: readonly ProgressEvent[];
  /** Last stage-trigger error, cleared on the next successful action. */
  error: ErrorBody | null;
  skipLipsync: boolean;
  onTrigger: (stage: StageName) => void;
  onSkipLipsyncChange: (skip: boolean) => void;
  confirmFn?: (message: string) => boolean;
}

export function renderStepper(root: HTMLElement, props: StepperProps): void {
  const { view } = props;
  const confirmFn = props.confirmFn ?? ((message) => window.confirm(message));
  const legal = new Set(legalStages(view));
  root.textContent = "";
  root.appendChild(settingsBlock(props));

  const list = document.createElement("ol");
  list.className = "stage-list";
  for (const row of describeStages(view, props.events)) {
    if (props.skipLipsync && row.stage === "lipsync" && row.status !== "done") {
      continue;
    }
    const item = document.createElement("li");
    item.className = `stage stage-${row.status}`;
    item.dataset.stage = row.stage;

    const button = document.createElement("button");
    button.type = "button";
    button.className = "stage-btn";
    button.dataset.stage = row.stage;
    button.textContent = row.status === "done" ? `Re-run ${row.label}` : row.label;
    button.disabled = view.busy || !legal.has(row.stage);
    button.addEventListener("click", () => {
      const losses = discardedByRun(view, row.stage);
      if (losses.length > 0) {
        const ok = confirmFn(
          `Re-running ${row.label} discards: ${losses.join(", ")}. Continue?`,
        );
        if (!ok) return;
      }
      props.onTrigger(row.stage);
    });
    item.appendChild(button);

    const bar = document.createElement("div");
    bar.className = "progress";
    const fill = document.createElement("div");
    fill.className = "progress-fill";
    fill.style.width = `${Math.round(row.fraction * 100)}%`;
    bar.appendChild(fill);
    item.appendChild(bar);

    if (row.message) {
      const note = document.createElement("span");
      note.className = "stage-message";
      note.textContent = row.message;
      item.appendChild(note);
    }
    list.appendChild(item);
  }
  root.appendChild(list);

  if (view.stage.name === "failed") {
    const banner = document.createElement("div");
    banner.className = "failure-banner";
    banner.textContent = `${view.stage.failed_stage ?? "stage"} failed: ${view.stage.reason ?? "unknown error"}`;
    root.appendChild(banner);
  }

  if (props.error) {
    const box = document.createElement("div");
    box.className = "stepper-error";
    box.textContent = `${props.error.code}: ${props.error.message}`;
    root.appendChild(box);
  }

  if (view.warnings.length > 0) {
    const heading = document.createElement("h3");
    heading.textContent = "Warnings";
    root.appendChild(heading);
    const warningList = document.createElement("ul");
    warningList.className = "warning-list";
    for (const warning of view.warnings) {
      const item = document.createElement("li");
      item.textContent = warning;
      warningList.appendChild(item);
    }
    root.appendChild(warningList);
  }
}

function settingsBlock(props: StepperProps): HTMLElement {
  const { view } = props;
  const block = document.createElement("div");
  block.className = "settings";

  const languages = document.createElement("p");
  languages.className = "setting-languages";
  languages.textContent = `${view.source_language || "?"} → ${view.target_language}`;
  block.appendChild(languages);

  // Tone and speaker mode are fixed at upload time; shown, not editable.
  const toneLabel = document.createElement("label");
  toneLabel.textContent = "Tone ";
  const tone = document.createElement("select");
  tone.className = "tone-select";
  tone.disabled = true;
  for (const name of TONES) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    option.selected = name === view.tone;
    tone.appendChild(option);
  }
  toneLabel.appendChild(tone);
  block.appendChild(toneLabel);

  const multi = document.createElement("label");
  const multiBox = document.createElement("input");
  multiBox.type = "checkbox";
  multiBox.className = "multi-speaker";
  multiBox.checked = view.multi_speaker;
  multiBox.disabled = true;
  multi.appendChild(multiBox);
  multi.appendChild(document.createTextNode(" Multi-speaker"));
  block.appendChild(multi);

  const skip = document.createElement("label");
  const skipBox = document.createElement("input");
  skipBox.type = "checkbox";
  skipBox.className = "skip-lipsync";
  skipBox.checked = props.skipLipsync;
  skipBox.addEventListener("change", () => props.onSkipLipsyncChange(skipBox.checked));
  skip.appendChild(skipBox);
  skip.appendChild(document.createTextNode(" Skip lip sync"));
  block.appendChild(skip);

  return block;
}
