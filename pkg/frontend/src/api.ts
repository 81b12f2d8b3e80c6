/** Typed client for the dubbing service HTTP API. */

export type StageName =
  | "analysis"
  | "translation"
  | "conversion"
  | "lipsync"
  | "export";

export type StageStateName =
  | "new"
  | "analyzed"
  | "translated"
  | "converted"
  | "lipsynced"
  | "exported"
  | "failed";

export type TrackKind =
  | "video"
  | "vocals"
  | "background"
  | "transcript"
  | "translated_transcript"
  | "dubbed_audio"
  | "lipsynced_video";

export type ToneName = "formal" | "informal" | "friendly";

export interface StageState {
  name: StageStateName;
  failed_stage: StageName | null;
  reason: string | null;
}

export interface TrackView {
  kind: TrackKind;
  artifact: string;
  produced_by: StageName;
  media_type: string;
  enabled: boolean;
}

export interface SpeakerView {
  id: string;
  reference_clip: string;
}

export interface StageRunView {
  stage: StageName;
  started_at: string;
  finished_at: string;
  adapter_versions: Record<string, string>;
  produced: TrackKind[];
  warnings: string[];
  error: string | null;
}

export interface ProjectView {
  id: string;
  source_asset: string;
  source_language: string;
  target_language: string;
  tone: ToneName;
  multi_speaker: boolean;
  video_duration_ms: number;
  stage: StageState;
  tracks: Partial<Record<TrackKind, TrackView>>;
  speakers: SpeakerView[];
  placement_plan: string | null;
  export_artifact: string | null;
  warnings: string[];
  runs: StageRunView[];
  busy: boolean;
}

export interface ProgressEvent {
  project_id: string;
  stage: StageName;
  fraction: number;
  message: string;
}

export interface WordTiming {
  word: string;
  start_ms: number;
  end_ms: number;
}

export interface TranscriptSegment {
  id: string;
  speaker: string;
  start_ms: number;
  end_ms: number;
  text: string;
  words?: WordTiming[];
}

export interface TranscriptPayload {
  language: string;
  segments: TranscriptSegment[];
}

export interface ErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(body.message);
    this.name = "ApiError";
  }
}

export interface CreateProjectInput {
  media: Blob;
  filename: string;
  target_language: string;
  tone?: ToneName;
  multi_speaker?: boolean;
  source_language?: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raiseFor(response: Response): Promise<void> {
  if (response.ok) return;
  let body: ErrorBody = { code: "UNKNOWN", message: response.statusText, details: {} };
  try {
    const parsed = (await response.json()) as Partial<ErrorBody>;
    if (typeof parsed.code === "string" && typeof parsed.message === "string") {
      body = { code: parsed.code, message: parsed.message, details: parsed.details ?? {} };
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, body);
}

/**
 * Thin wrapper over fetch with one method per endpoint. The fetch
 * implementation is injectable so tests can script responses.
 */
export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async listProjects(): Promise<ProjectView[]> {
    const response = await this.fetchFn(this.url("/projects"));
    await raiseFor(response);
    const payload = (await response.json()) as { projects: ProjectView[] };
    return payload.projects;
  }

  async createProject(input: CreateProjectInput): Promise<ProjectView> {
    const form = new FormData();
    form.append("media", input.media, input.filename);
    form.append("target_language", input.target_language);
    if (input.tone !== undefined) form.append("tone", input.tone);
    if (input.multi_speaker !== undefined) {
      form.append("multi_speaker", String(input.multi_speaker));
    }
    if (input.source_language !== undefined) {
      form.append("source_language", input.source_language);
    }
    const response = await this.fetchFn(this.url("/projects"), {
      method: "POST",
      body: form,
    });
    await raiseFor(response);
    return (await response.json()) as ProjectView;
  }

  async getProject(id: string): Promise<ProjectView> {
    const response = await this.fetchFn(this.url(`/projects/${id}`));
    await raiseFor(response);
    return (await response.json()) as ProjectView;
  }

  async deleteProject(id: string): Promise<void> {
    const response = await this.fetchFn(this.url(`/projects/${id}`), {
      method: "DELETE",
    });
    await raiseFor(response);
  }

  /** Kicks off a stage; resolves once the service accepts the request. */
  async triggerStage(id: string, stage: StageName): Promise<void> {
    const response = await this.fetchFn(this.url(`/projects/${id}/stages/${stage}`), {
      method: "POST",
    });
    await raiseFor(response);
  }

  async getTranscript(
    id: string,
    kind: "transcript" | "translated_transcript",
  ): Promise<TranscriptPayload> {
    const response = await this.fetchFn(this.trackUrl(id, kind, "json"));
    await raiseFor(response);
    return (await response.json()) as TranscriptPayload;
  }

  /** Download URL for a track; transcripts accept a format (json/srt/vtt). */
  trackUrl(id: string, kind: TrackKind, format?: string): string {
    const query = format ? `?format=${encodeURIComponent(format)}` : "";
    return this.url(`/projects/${id}/tracks/${kind}${query}`);
  }

  exportUrl(id: string): string {
    return this.url(`/projects/${id}/export`);
  }

  planUrl(id: string): string {
    return this.url(`/projects/${id}/plan`);
  }

  eventsUrl(id: string): string {
    return this.url(`/projects/${id}/events`);
  }
}
