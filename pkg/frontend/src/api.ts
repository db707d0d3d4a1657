/**
 * Typed client for the proof service HTTP API.
 *
 * Only documented endpoints are used; the fetch implementation is injectable
 * so contract tests can replay recorded fixtures.
 */

export interface Reference {
  name: string;
  kind: string | null;
  title: string | null;
  anchor: string | null;
}

export interface Hint extends Reference {
  score: number;
}

export interface ProveResponse {
  obligation_id: string;
  system: string;
  status: string;
  cpu_millis: number;
  wall_millis: number;
  used_references: Reference[];
  raw_output: string;
  hints_available: boolean;
  message: string | null;
}

export interface HintsResponse {
  obligation_id: string;
  k: number;
  goal_symbols: string[];
  hints: Hint[];
  millis: number;
}

export interface RenderStep {
  kind: string;
  text: string;
  label: string | null;
  anchor: string | null;
  e_ordinal: number | null;
  obligation_id: string | null;
  status: string | null;
  millis: number | null;
  refs: { name: string; anchor: string }[];
  thesis_after: string | null;
  skeleton_error: string | null;
  steps: RenderStep[];
}

export interface RenderItem {
  label: string;
  kind: string;
  ordinal: number;
  anchor: string;
  export_name: string;
  formula: string;
  status: string;
  error: string | null;
  thesis: string;
  steps: RenderStep[];
}

export interface RenderModel {
  article: string;
  ok: boolean;
  source: string;
  tokens: { start: number; end: number; text: string; kind: string; anchor: string | null }[];
  reservations: { variable: string; type: string; anchor: string }[];
  functors: {
    name: string;
    params: string[];
    result_type: string;
    ordinal: number;
    anchor: string;
    type_axiom: string;
  }[];
  items: RenderItem[];
}

export interface SystemInfo {
  name: string;
  kind: string;
  default_cpu: number;
}

export interface HttpResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetcher: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body && body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: object): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getJob(jobId: string): Promise<{ id: string; state: string; error: string | null }> {
    return this.request(`/articles/${jobId}`);
  }

  getRender(jobId: string): Promise<RenderModel> {
    return this.request(`/articles/${jobId}/render`);
  }

  prove(
    jobId: string,
    obligationId: string,
    options: { system?: string; cpu?: number } = {},
  ): Promise<ProveResponse> {
    return this.post(
      `/articles/${jobId}/obligations/${obligationId}/prove`,
      options,
    );
  }

  hints(jobId: string, obligationId: string, k?: number): Promise<HintsResponse> {
    return this.post(
      `/articles/${jobId}/obligations/${obligationId}/hints`,
      k === undefined ? {} : { k },
    );
  }

  systems(): Promise<SystemInfo[]> {
    return this.request("/systems");
  }

  problemUrl(jobId: string, obligationId: string): string {
    return `${this.baseUrl}/articles/${jobId}/obligations/${obligationId}/problem`;
  }
}
