// Typed client for the graphsr session API. All selection and recovery
// decisions happen server-side; this file only moves JSON.

export type ValueKind = "real" | "binary";

export interface MeasurementSchema {
  p: number;
  kind: ValueKind;
  feature_names?: string[] | null;
}

export interface CreateSessionRequest {
  graph: string;
  meta?: string | null;
  k: number;
  xi?: number;
  alpha?: number;
  m: number;
  schema: MeasurementSchema;
  kernel?: "heat" | "mexican_hat";
}

export interface CreatedSession {
  id: string;
  vertex: number;
  delta: number;
  status: string;
}

export interface Proposal {
  vertex: number | null;
  vertex_meta: Record<string, string> | null;
  delta: number | null;
  status: string;
}

export interface ObserveResult {
  accepted: boolean;
  status: string;
  vertex: number | null;
  vertex_meta: Record<string, string> | null;
  delta: number | null;
  observed_count: number;
  m: number;
}

export interface Estimate {
  values: number[][];
  observed: boolean[];
  status: string;
}

export interface AuditRecord {
  iter: number;
  vertex: number;
  delta: number;
  s: number;
  eta: number;
  residual: number;
  wall_ms: number;
}

export interface SessionAudit {
  id: string;
  status: string;
  policy: number[];
  m: number;
  observed_count: number;
  schema: MeasurementSchema;
  audit: AuditRecord[];
  created_at: string;
  updated_at: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (body && body.detail !== undefined) detail = String(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  createSession(req: CreateSessionRequest): Promise<CreatedSession> {
    return this.request<CreatedSession>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  next(sessionId: string): Promise<Proposal> {
    return this.request<Proposal>(`/sessions/${sessionId}/next`);
  }

  observe(sessionId: string, vertex: number, values: number[]): Promise<ObserveResult> {
    return this.request<ObserveResult>(`/sessions/${sessionId}/observe`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ vertex, values }),
    });
  }

  estimate(sessionId: string): Promise<Estimate> {
    return this.request<Estimate>(`/sessions/${sessionId}/estimate`);
  }

  state(sessionId: string): Promise<SessionAudit> {
    return this.request<SessionAudit>(`/sessions/${sessionId}/state`);
  }
}
