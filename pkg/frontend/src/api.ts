import type {
  AoiCut,
  AoiPatternMode,
  EditOp,
  LayoutResponse,
  MiningParams,
  PatternsResponse,
  SessionInfo,
  Similarity,
  TreeNode,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
    public violations: string[] = [],
  ) {
    super(detail);
  }
}

function query(params: object): string {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== null) search.set(key, String(value));
  }
  const text = search.toString();
  return text ? `?${text}` : "";
}

/** Thin typed client; all analysis happens server-side. */
export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      let violations: string[] = [];
      try {
        const data = await response.json();
        detail = data.detail ?? detail;
        violations = data.violations ?? [];
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail, violations);
    }
    return response.json() as Promise<T>;
  }

  createSession(imageBase64: string, gazeCsv: string) {
    return this.request<{ id: string; participants: string[]; revision: number }>(
      "POST",
      "/sessions",
      { image: imageBase64, gaze: gazeCsv },
    );
  }

  getSession(id: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${id}`);
  }

  detect(id: string, z: number, g: number): Promise<{ tree: TreeNode; revision: number }> {
    return this.request("POST", `/sessions/${id}/detect`, { z, g });
  }

  editAois(id: string, ops: EditOp[]): Promise<{ tree: TreeNode; revision: number }> {
    return this.request("PATCH", `/sessions/${id}/aois`, { ops });
  }

  getAois(id: string, k?: number): Promise<AoiCut> {
    return this.request("GET", `/sessions/${id}/aois${query({ k })}`);
  }

  getPatterns(
    id: string,
    params: MiningParams & {
      mode?: "total" | "diff";
      p?: string;
      q?: string;
      sort?: string;
      op?: "more" | "less";
      threshold?: number;
    } = {},
  ): Promise<PatternsResponse> {
    return this.request("GET", `/sessions/${id}/patterns${query(params)}`);
  }

  getSimilarity(id: string, params: MiningParams = {}): Promise<Similarity> {
    return this.request("GET", `/sessions/${id}/similarity${query(params)}`);
  }

  postLayout(
    id: string,
    body: MiningParams & {
      patterns?: string[];
      aoi?: string;
      mode?: AoiPatternMode;
      seed?: number;
    },
  ): Promise<LayoutResponse> {
    return this.request("POST", `/sessions/${id}/layout`, body);
  }
}
