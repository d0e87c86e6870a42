/**
 * Thin HTTP client for the cadex service.
 *
 * The transport is injected as a fetch-compatible function so tests can
 * substitute a stub and production can pass the browser's fetch.
 */

import type {
  Cadet,
  CoachNote,
  ComponentId,
  DecimalString,
  EvaluationResponse,
  RankingEntry,
  TraceView,
  TraceViewResponse,
  WhatIfResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown>; text(): Promise<string> }>;

/** Error carrying the HTTP status and the service's `detail` message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (response.status >= 400) {
      let detail = await response.text();
      try {
        const parsed = JSON.parse(detail) as { detail?: string };
        if (typeof parsed.detail === "string") detail = parsed.detail;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listCadets(): Promise<Cadet[]> {
    return this.request("GET", "/cadets");
  }

  getCadet(cadetId: string): Promise<Cadet> {
    return this.request("GET", `/cadets/${encodeURIComponent(cadetId)}`);
  }

  createCadet(cadet: Cadet): Promise<Cadet> {
    return this.request("POST", "/cadets", cadet);
  }

  submitMarks(
    cadetId: string,
    cycle: string,
    marks: Record<ComponentId, DecimalString>,
    resubmit = false,
  ): Promise<{ assessment_id: string }> {
    return this.request("PUT", `/cadets/${encodeURIComponent(cadetId)}/marks`, {
      cycle,
      marks,
      resubmit,
    });
  }

  evaluate(cadetId: string, cycle: string): Promise<EvaluationResponse> {
    return this.request("POST", `/cadets/${encodeURIComponent(cadetId)}/evaluate`, { cycle });
  }

  getTrace(traceId: string, view: TraceView): Promise<TraceViewResponse> {
    return this.request("GET", `/traces/${encodeURIComponent(traceId)}?view=${view}`);
  }

  rankings(cycle: string): Promise<RankingEntry[]> {
    return this.request("GET", `/rankings?cycle=${encodeURIComponent(cycle)}`);
  }

  whatIf(
    cadetId: string,
    cycle: string,
    changes: Partial<Record<ComponentId, DecimalString>>,
  ): Promise<WhatIfResponse> {
    return this.request("POST", "/whatif", { cadet_id: cadetId, cycle, set: changes });
  }

  addNote(
    cadetId: string,
    cycle: string,
    author: string,
    text: string,
  ): Promise<CoachNote> {
    return this.request("POST", `/cadets/${encodeURIComponent(cadetId)}/notes`, {
      cycle,
      author,
      text,
    });
  }
}
