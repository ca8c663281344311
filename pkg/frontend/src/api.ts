// Typed client for the navigation service. Response shapes mirror the
// service JSON exactly; nothing here rescales or recomputes.

export type GraphUpload = {
  schema_version: string;
  graph_id: string;
  vertices: number;
  candidates: number;
};

export type VertexSummary = {
  id: number;
  x: number;
  y: number;
  class: string | null;
  candidate: boolean;
  branching_factor: number | null;
};

export type ArcSummary = { from: number; to: number; weight: number };

export type GraphSummary = {
  schema_version: string;
  graph_id: string;
  k: number;
  lambda: number;
  t: number;
  status: string;
  target_class: string | null;
  factual: number | null;
  candidates: number[];
  vertices: VertexSummary[];
  arcs: ArcSummary[];
};

export type Preview = {
  neighbor: number;
  edge_weight: number;
  candidate: boolean;
  reachable_candidates: number;
  delta_reachable: number;
  branching_factor: number | null;
  opportunity_to_each_target: Record<string, number>;
};

export type HistoryEntry = { vertex: number; edge_weight: number | null };

export type JourneySummary = {
  vertices: number[];
  edge_weights: number[];
  total_length: number;
};

export type Completion = {
  reached: number;
  realized: JourneySummary;
  optimal: JourneySummary | null;
  distance_ratio?: number;
  opportunity_vs_optimal?: number;
};

export type SessionDoc = {
  schema_version: string;
  session_id: string;
  graph_id: string;
  current: number;
  complete: boolean;
  version: number;
  history: HistoryEntry[];
  total_weight: number;
  previews: Preview[];
  completion: Completion | null;
};

/** Error with the HTTP status and the service's own detail string. */
export class ApiError extends Error {
  status: number;
  detail: string;

  constructor(status: number, detail: string) {
    super(`${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const r = await fetch(path, init);
  if (!r.ok) {
    let detail = r.statusText;
    try {
      const body = (await r.json()) as { detail?: string };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(r.status, detail);
  }
  return r.json() as Promise<T>;
}

function getJSON<T>(path: string): Promise<T> {
  return request<T>(path, { headers: { Accept: "application/json" } });
}

function postJSON<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json", Accept: "application/json" },
    body: JSON.stringify(body),
  });
}

export type Client = {
  uploadGraph(doc: unknown): Promise<GraphUpload>;
  summary(graphId: string): Promise<GraphSummary>;
  createSession(graphId: string, factual: number): Promise<SessionDoc>;
  getSession(sessionId: string): Promise<SessionDoc>;
  step(sessionId: string, neighbor: number, version: number): Promise<SessionDoc>;
};

export function createClient(base = ""): Client {
  return {
    uploadGraph: (doc) => postJSON<GraphUpload>(`${base}/graphs`, doc),
    summary: (graphId) =>
      getJSON<GraphSummary>(`${base}/graphs/${encodeURIComponent(graphId)}/summary`),
    createSession: (graphId, factual) =>
      postJSON<SessionDoc>(`${base}/sessions`, { graph_id: graphId, factual }),
    getSession: (sessionId) =>
      getJSON<SessionDoc>(`${base}/sessions/${encodeURIComponent(sessionId)}`),
    step: (sessionId, neighbor, version) =>
      postJSON<SessionDoc>(
        `${base}/sessions/${encodeURIComponent(sessionId)}/step`,
        { neighbor, version },
      ),
  };
}
