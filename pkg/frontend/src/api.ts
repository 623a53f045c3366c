/**
 * Typed client for the review service's /api/v1 protocol.
 *
 * Every call goes through one fetch wrapper so error envelopes
 * ({detail: {error, message}}) turn into ApiError uniformly. The fetch
 * implementation is injectable for tests.
 */

export interface ViewpointJson {
  alpha: number;
  beta: number;
  r: number;
  target: [number, number, number];
}

export interface IndexStateJson {
  status: "absent" | "building" | "ready";
  progress: number;
  fingerprint: string | null;
}

export interface ProjectJson {
  id: string;
  scene_filename: string;
  created_at: string;
  index: IndexStateJson;
}

export interface CommentJson {
  id: string;
  project_id: string;
  body: string;
  anchor: ViewpointJson | null;
  attachments: string[];
  revision: number;
  created_at: string;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobJson {
  id: string;
  kind: string;
  project_id: string;
  comment_id: string | null;
  state: JobState;
  reason: string | null;
  progress: number;
  result_id: string | null;
  submitted_at: string;
  started_at: string | null;
  finished_at: string | null;
}

export interface SuggestionJson {
  row: number;
  score: number;
  viewpoint: ViewpointJson;
  thumbnail: string | null; // base64 PNG
}

export interface SuggestResponse {
  superseded: boolean;
  suggestions: SuggestionJson[];
}

export type ModifierKind = "text-scribble" | "grab-n-go" | "text-paint";

export interface StrokeJson {
  points: [number, number][];
  radius: number;
}

export interface StrokeSetJson {
  add_strokes: StrokeJson[];
  remove_strokes: StrokeJson[];
}

export interface ModifierPayload {
  kind: ModifierKind;
  prompt?: string;
  strokes?: StrokeSetJson;
  box?: [number, number, number, number];
  intent?: "keep" | "remove";
  staging?: boolean;
  prior?: string;
  seed?: number;
  steps?: number;
  strengths?: Record<string, number>;
}

export interface IndexRequest {
  bins?: number;
  step?: number;
  radii?: number[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raise(resp: Response): Promise<never> {
  let code = "error";
  let message = `HTTP ${resp.status}`;
  try {
    const body = await resp.json();
    const detail = body?.detail;
    if (detail && typeof detail === "object" && !Array.isArray(detail)) {
      code = detail.error ?? code;
      message = detail.message ?? message;
    } else if (Array.isArray(detail)) {
      code = "invalid";
      message = detail[0]?.msg ?? message;
    }
  } catch {
    // non-JSON error body; keep the status-line message
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private base = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.base + path, init);
    if (!resp.ok) await raise(resp);
    return resp;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.request(path, init);
    return (await resp.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.json("/api/v1/health");
  }

  createProject(filename: string, scene: Blob): Promise<ProjectJson> {
    const form = new FormData();
    form.append("scene", scene, filename);
    return this.json("/api/v1/projects", { method: "POST", body: form });
  }

  listProjects(): Promise<ProjectJson[]> {
    return this.json("/api/v1/projects");
  }

  getProject(id: string): Promise<ProjectJson> {
    return this.json(`/api/v1/projects/${id}`);
  }

  buildIndex(projectId: string, body: IndexRequest = {}): Promise<JobJson> {
    return this.post(`/api/v1/projects/${projectId}/index`, body);
  }

  getJob(id: string): Promise<JobJson> {
    return this.json(`/api/v1/jobs/${id}`);
  }

  createComment(projectId: string, body: string): Promise<CommentJson> {
    return this.post(`/api/v1/projects/${projectId}/comments`, { body });
  }

  listComments(projectId: string): Promise<CommentJson[]> {
    return this.json(`/api/v1/projects/${projectId}/comments`);
  }

  getComment(id: string): Promise<CommentJson> {
    return this.json(`/api/v1/comments/${id}`);
  }

  setAnchor(commentId: string, anchor: ViewpointJson): Promise<CommentJson> {
    return this.json(`/api/v1/comments/${commentId}/anchor`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(anchor),
    });
  }

  suggest(commentId: string, text: string, k?: number): Promise<SuggestResponse> {
    const payload: { text: string; k?: number } = { text };
    if (k !== undefined) payload.k = k;
    return this.post(`/api/v1/comments/${commentId}/suggest`, payload);
  }

  submitModifier(commentId: string, payload: ModifierPayload): Promise<JobJson> {
    return this.post(`/api/v1/comments/${commentId}/modifiers`, payload);
  }

  async renderView(
    projectId: string,
    viewpoint: ViewpointJson,
    width: number,
    height: number,
  ): Promise<Blob> {
    const resp = await this.request(`/api/v1/projects/${projectId}/render`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ viewpoint, width, height }),
    });
    return resp.blob();
  }

  importMemo(projectId: string, memo: Blob): Promise<CommentJson> {
    const form = new FormData();
    form.append("memo", memo, "memo.zip");
    return this.json(`/api/v1/projects/${projectId}/import`, {
      method: "POST",
      body: form,
    });
  }

  exportUrl(commentId: string): string {
    return `${this.base}/api/v1/comments/${commentId}/export`;
  }

  resultUrl(commentId: string, resultId: string, name: string): string {
    return `${this.base}/api/v1/comments/${commentId}/results/${resultId}/${name}`;
  }
}
