// Typed client over the session service. Every response's X-Audit-Seq is
// recorded so the UI can detect when its view has fallen behind the service.

import type {
  AuditResponse,
  CharacteristicsResponse,
  ErrorBody,
  MetricsResponse,
  RadarResponse,
  ScenarioSpecPayload,
  SummaryResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  lastSeq = -1;

  constructor(baseUrl = "", fetchImpl: FetchLike = (input, init) => fetch(input, init)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private recordSeq(response: Response): number {
    const header = response.headers.get("X-Audit-Seq");
    const seq = header === null ? -1 : Number(header);
    if (!Number.isNaN(seq)) {
      this.lastSeq = seq;
    }
    return seq;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    this.recordSeq(response);
    if (!response.ok) {
      let code = "http-error";
      let message = `${response.status} on ${path}`;
      try {
        const body = (await response.json()) as ErrorBody;
        code = body.error.code;
        message = body.error.message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.request(path);
    return (await response.json()) as T;
  }

  getSummary(): Promise<SummaryResponse> {
    return this.getJson("/dataset/summary");
  }

  getCharacteristics(): Promise<CharacteristicsResponse> {
    return this.getJson("/characteristics");
  }

  getRadar(): Promise<RadarResponse> {
    return this.getJson("/radar");
  }

  getMetrics(): Promise<MetricsResponse> {
    return this.getJson("/metrics");
  }

  getAudit(): Promise<AuditResponse> {
    return this.getJson("/session/audit");
  }

  async getAssessmentBytes(): Promise<Uint8Array> {
    const response = await this.request("/assessment");
    return new Uint8Array(await response.arrayBuffer());
  }

  /** The raw report body; exported files must stay byte-identical to it. */
  async getReportBytes(): Promise<Uint8Array> {
    const response = await this.request("/report");
    return new Uint8Array(await response.arrayBuffer());
  }

  async postQualitative(entry: {
    characteristic: string;
    score: number;
    evidence: string;
    assessor: string;
  }): Promise<number> {
    const response = await this.request("/qualitative", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(entry),
    });
    return this.recordSeq(response);
  }

  async postOverride(address: string, agentClass: string): Promise<number> {
    const response = await this.request("/agents/override", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ address, class: agentClass }),
    });
    return this.recordSeq(response);
  }

  async postScenario(spec: ScenarioSpecPayload): Promise<number> {
    const response = await this.request("/scenario", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ spec }),
    });
    return this.recordSeq(response);
  }

  async deleteScenario(index: number): Promise<number> {
    const response = await this.request(`/scenario/${index}`, { method: "DELETE" });
    return this.recordSeq(response);
  }
}
