import { beforeEach, describe, expect, it, vi } from "vitest";

import type { ErrorBody, ProjectView, StageName } from "../src/api.js";
import { renderStepper, type StepperProps } from "../src/stepper.js";

import viewNew from "./fixtures/view_new.json";
import viewConverted from "./fixtures/view_converted.json";
import viewLipsynced from "./fixtures/view_lipsynced.json";
import viewExported from "./fixtures/view_exported.json";
import viewFailed from "./fixtures/view_failed.json";
import errorOutOfOrder from "./fixtures/error_out_of_order.json";

const asView = (fixture: unknown) => fixture as ProjectView;

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="stepper"></div>';
  root = document.getElementById("stepper")!;
});

function render(overrides: Partial<StepperProps> & { view: ProjectView }): {
  triggered: StageName[];
} {
  const triggered: StageName[] = [];
  renderStepper(root, {
    events: [],
    error: null,
    skipLipsync: false,
    onTrigger: (stage) => triggered.push(stage),
    onSkipLipsyncChange: () => {},
    confirmFn: () => true,
    ...overrides,
  });
  return { triggered };
}

function buttons(): HTMLButtonElement[] {
  return [...root.querySelectorAll<HTMLButtonElement>(".stage-btn")];
}

function enabledStages(): string[] {
  return buttons()
    .filter((b) => !b.disabled)
    .map((b) => b.dataset.stage!);
}

describe("stage buttons", () => {
  it("enables only analysis on a fresh project", () => {
    render({ view: asView(viewNew) });
    expect(buttons()).toHaveLength(5);
    expect(enabledStages()).toEqual(["analysis"]);
  });

  it("enables lipsync and export together once converted", () => {
    render({ view: asView(viewConverted) });
    expect(enabledStages()).toEqual([
      "analysis",
      "translation",
      "conversion",
      "lipsync",
      "export",
    ]);
  });

  it("labels completed stages as re-runs", () => {
    render({ view: asView(viewConverted) });
    const labels = buttons().map((b) => b.textContent);
    expect(labels).toEqual([
      "Re-run Analysis",
      "Re-run Translation",
      "Re-run Conversion",
      "Lip sync",
      "Export",
    ]);
  });

  it("disables everything while the project is busy", () => {
    render({ view: { ...asView(viewConverted), busy: true } });
    expect(enabledStages()).toEqual([]);
  });

  it("triggers forward stages without confirmation", () => {
    const confirmFn = vi.fn(() => true);
    const { triggered } = render({ view: asView(viewConverted), confirmFn });
    buttons()
      .find((b) => b.dataset.stage === "lipsync")!
      .click();
    expect(triggered).toEqual(["lipsync"]);
    expect(confirmFn).not.toHaveBeenCalled();
  });

  it("asks before a destructive re-run and honours a refusal", () => {
    const confirmFn = vi.fn(() => false);
    const { triggered } = render({ view: asView(viewConverted), confirmFn });
    buttons()
      .find((b) => b.dataset.stage === "analysis")!
      .click();
    expect(confirmFn).toHaveBeenCalledOnce();
    expect(confirmFn.mock.calls[0]![0]).toContain("discards");
    expect(triggered).toEqual([]);
  });

  it("runs the re-run once confirmed", () => {
    const { triggered } = render({
      view: asView(viewConverted),
      confirmFn: () => true,
    });
    buttons()
      .find((b) => b.dataset.stage === "translation")!
      .click();
    expect(triggered).toEqual(["translation"]);
  });
});

describe("settings", () => {
  it("offers exactly the three tones, with the project tone selected", () => {
    render({ view: asView(viewExported) });
    const select = root.querySelector<HTMLSelectElement>(".tone-select")!;
    const options = [...select.options].map((o) => o.value);
    expect(options).toEqual(["formal", "informal", "friendly"]);
    expect(select.value).toBe(asView(viewExported).tone);
    expect(select.disabled).toBe(true);
  });

  it("shows the language pair and speaker mode", () => {
    render({ view: asView(viewExported) });
    expect(root.querySelector(".setting-languages")?.textContent).toContain("vi");
    const multi = root.querySelector<HTMLInputElement>(".multi-speaker")!;
    expect(multi.checked).toBe(true);
    expect(multi.disabled).toBe(true);
  });

  it("hides a pending lipsync stage when skipping lip sync", () => {
    render({ view: asView(viewConverted), skipLipsync: true });
    expect(buttons().map((b) => b.dataset.stage)).toEqual([
      "analysis",
      "translation",
      "conversion",
      "export",
    ]);
  });

  it("keeps a completed lipsync row even when skipping", () => {
    render({ view: asView(viewLipsynced), skipLipsync: true });
    expect(buttons().map((b) => b.dataset.stage)).toContain("lipsync");
  });

  it("reports skip-lipsync changes", () => {
    const changes: boolean[] = [];
    renderStepper(root, {
      view: asView(viewConverted),
      events: [],
      error: null,
      skipLipsync: false,
      onTrigger: () => {},
      onSkipLipsyncChange: (skip) => changes.push(skip),
    });
    const box = root.querySelector<HTMLInputElement>(".skip-lipsync")!;
    box.checked = true;
    box.dispatchEvent(new Event("change"));
    expect(changes).toEqual([true]);
  });
});

describe("status displays", () => {
  it("shows the failure banner with the recorded reason", () => {
    render({ view: asView(viewFailed) });
    const banner = root.querySelector(".failure-banner")!;
    expect(banner.textContent).toContain("analysis failed");
    expect(banner.textContent).toContain("transcription backend unavailable");
  });

  it("renders service errors inline", () => {
    render({
      view: asView(viewNew),
      error: errorOutOfOrder as ErrorBody,
    });
    const box = root.querySelector(".stepper-error")!;
    expect(box.textContent).toContain("OUT_OF_ORDER");
    expect(box.textContent).toContain("cannot run");
  });

  it("lists project warnings", () => {
    render({ view: asView(viewExported) });
    const items = [...root.querySelectorAll(".warning-list li")];
    expect(items.length).toBe(asView(viewExported).warnings.length);
    expect(items[0]?.textContent).toContain("clamped");
  });

  it("fills the progress bar for the running stage", () => {
    const view = { ...asView(viewConverted), busy: true };
    render({
      view,
      events: [
        { project_id: view.id, stage: "lipsync", fraction: 0.5, message: "syncing" },
      ],
    });
    const row = root.querySelector('li[data-stage="lipsync"]')!;
    expect(row.className).toContain("stage-running");
    const fill = row.querySelector<HTMLElement>(".progress-fill")!;
    expect(fill.style.width).toBe("50%");
    expect(row.querySelector(".stage-message")?.textContent).toBe("syncing");
  });
});
