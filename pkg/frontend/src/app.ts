/**
 * Application shell: keeps the current project view, the live event
 * buffer, and client-side toggles, and re-renders the three panels
 * whenever any of them change.
 */

import {
  ApiClient,
  ApiError,
  type ErrorBody,
  type ProgressEvent,
  type ProjectView,
  type StageName,
  type ToneName,
  type TrackKind,
  type TranscriptPayload,
} from "./api.js";
import { TONES, TRANSCRIPT_TRACKS, type TrackToggles } from "./state.js";
import { watchEvents, type EventSourceFactory } from "./sse.js";
import { renderPreview } from "./preview.js";
import { renderStepper } from "./stepper.js";
import { renderTimeline } from "./timeline.js";

export interface AppDeps {
  client: ApiClient;
  eventSourceFactory?: EventSourceFactory;
  confirmFn?: (message: string) => boolean;
}

interface AppState {
  view: ProjectView | null;
  events: ProgressEvent[];
  error: ErrorBody | null;
  toggles: TrackToggles;
  skipLipsync: boolean;
  transcripts: Partial<Record<TrackKind, TranscriptPayload>>;
}

export class App {
  private readonly client: ApiClient;
  private readonly state: AppState = {
    view: null,
    events: [],
    error: null,
    toggles: {},
    skipLipsync: false,
    transcripts: {},
  };
  private stopWatching: (() => void) | null = null;

  constructor(
    private readonly root: Document | HTMLElement,
    private readonly deps: AppDeps,
  ) {
    this.client = deps.client;
  }

  private panel(id: string): HTMLElement {
    const node = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!node) throw new Error(`missing #${id} element`);
    return node;
  }

  async start(): Promise<void> {
    this.buildCreateForm();
    await this.refreshProjectList();
    const select = this.panel("project-select") as HTMLSelectElement;
    select.addEventListener("change", () => {
      if (select.value) void this.openProject(select.value);
    });
    if (select.value) await this.openProject(select.value);
    else this.render();
  }

  async refreshProjectList(): Promise<void> {
    const select = this.panel("project-select") as HTMLSelectElement;
    const current = select.value;
    const projects = await this.client.listProjects();
    select.textContent = "";
    for (const project of projects) {
      const option = document.createElement("option");
      option.value = project.id;
      option.textContent = `${project.id} (${project.target_language}, ${project.stage.name})`;
      select.appendChild(option);
    }
    if (current && projects.some((p) => p.id === current)) select.value = current;
  }

  async openProject(id: string): Promise<void> {
    this.stopWatching?.();
    this.state.events = [];
    this.state.error = null;
    this.state.transcripts = {};
    this.state.view = await this.client.getProject(id);
    await this.loadTranscripts();
    this.render();
    if (this.state.view.busy) this.watch(id);
  }

  private async loadTranscripts(): Promise<void> {
    const view = this.state.view;
    if (!view) return;
    for (const kind of TRANSCRIPT_TRACKS) {
      if (view.tracks[kind] && !this.state.transcripts[kind]) {
        try {
          this.state.transcripts[kind] = await this.client.getTranscript(
            view.id,
            kind as "transcript" | "translated_transcript",
          );
        } catch {
          // transcript downloads are best-effort decoration
        }
      }
    }
  }

  private watch(id: string): void {
    this.stopWatching?.();
    this.stopWatching = watchEvents(
      this.client.eventsUrl(id),
      (event) => {
        this.state.events.push(event);
        this.render();
      },
      () => {
        this.stopWatching = null;
        void this.reloadView(id);
      },
      this.deps.eventSourceFactory,
    );
  }

  private async reloadView(id: string): Promise<void> {
    this.state.view = await this.client.getProject(id);
    this.state.transcripts = {};
    await this.loadTranscripts();
    await this.refreshProjectList();
    this.render();
  }

  async trigger(stage: StageName): Promise<void> {
    const view = this.state.view;
    if (!view) return;
    try {
      await this.client.triggerStage(view.id, stage);
      this.state.error = null;
      this.state.events = [];
      this.state.view = await this.client.getProject(view.id);
      this.render();
      this.watch(view.id);
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.error = error.body;
        this.render();
      } else {
        throw error;
      }
    }
  }

  render(): void {
    const view = this.state.view;
    const preview = this.panel("preview");
    const stepper = this.panel("stepper");
    const timeline = this.panel("timeline");
    if (!view) {
      preview.textContent = "No project selected.";
      stepper.textContent = "";
      timeline.textContent = "";
      return;
    }
    renderPreview(preview, {
      view,
      toggles: this.state.toggles,
      trackUrl: (kind) => this.client.trackUrl(view.id, kind),
    });
    renderStepper(stepper, {
      view,
      events: this.state.events,
      error: this.state.error,
      skipLipsync: this.state.skipLipsync,
      onTrigger: (stage) => void this.trigger(stage),
      onSkipLipsyncChange: (skip) => {
        this.state.skipLipsync = skip;
        this.render();
      },
      confirmFn: this.deps.confirmFn,
    });
    renderTimeline(timeline, {
      view,
      toggles: this.state.toggles,
      transcripts: this.state.transcripts,
      trackUrl: (kind, format) => this.client.trackUrl(view.id, kind, format),
      exportUrl: () => this.client.exportUrl(view.id),
      onToggle: (kind, visible) => {
        this.state.toggles = { ...this.state.toggles, [kind]: visible };
        this.render();
      },
    });
  }

  private buildCreateForm(): void {
    const form = this.panel("create-form") as HTMLFormElement;
    form.textContent = "";

    const file = document.createElement("input");
    file.type = "file";
    file.name = "media";
    file.required = true;
    form.appendChild(file);

    const target = document.createElement("input");
    target.type = "text";
    target.name = "target_language";
    target.placeholder = "target language (e.g. vi)";
    target.required = true;
    form.appendChild(target);

    const tone = document.createElement("select");
    tone.name = "tone";
    tone.className = "tone-select";
    for (const name of TONES) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      tone.appendChild(option);
    }
    form.appendChild(tone);

    const multiLabel = document.createElement("label");
    const multi = document.createElement("input");
    multi.type = "checkbox";
    multi.name = "multi_speaker";
    multiLabel.appendChild(multi);
    multiLabel.appendChild(document.createTextNode(" Multi-speaker"));
    form.appendChild(multiLabel);

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Create project";
    form.appendChild(submit);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const media = file.files?.[0];
      if (!media || !target.value) return;
      void this.client
        .createProject({
          media,
          filename: media.name,
          target_language: target.value,
          tone: tone.value as ToneName,
          multi_speaker: multi.checked,
        })
        .then(async (view) => {
          await this.refreshProjectList();
          const select = this.panel("project-select") as HTMLSelectElement;
          select.value = view.id;
          await this.openProject(view.id);
        })
        .catch((error: unknown) => {
          if (error instanceof ApiError) {
            this.state.error = error.body;
            this.render();
          }
        });
    });
  }
}

/** Browser entry point; tests construct App directly with fakes. */
export function main(): void {
  const base = (window as { DUBKIT_API_BASE?: string }).DUBKIT_API_BASE ?? "";
  const app = new App(document, { client: new ApiClient(base) });
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app-root")) {
  main();
}
