/**
 * Recording stub transport for tests.
 *
 * Records every request it sees and answers from a route table, so tests
 * can assert both rendered output and exactly which calls were made.
 */

import type { FetchLike } from "../src/api.js";
import type {
  EvaluationResponse,
  RankingEntry,
  Trace,
  WhatIfResponse,
} from "../src/types.js";

export interface RecordedRequest {
  method: string;
  url: string;
  body: unknown;
}

const MUTATING_METHODS = new Set(["POST", "PUT", "PATCH", "DELETE"]);

export class StubApi {
  readonly requests: RecordedRequest[] = [];
  private readonly routes = new Map<string, { status: number; body: unknown }>();

  on(method: string, path: string, body: unknown, status = 200): void {
    this.routes.set(`${method} ${path}`, { status, body });
  }

  /** Requests that could change server state (everything but GET /whatif is pure). */
  mutating(): RecordedRequest[] {
    return this.requests.filter(
      (r) => MUTATING_METHODS.has(r.method) && !r.url.endsWith("/whatif"),
    );
  }

  fetch: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    this.requests.push({
      method,
      url,
      body: init?.body ? JSON.parse(init.body) : undefined,
    });
    const route = this.routes.get(`${method} ${url}`);
    if (!route) {
      return Promise.resolve(response(404, { detail: `no stub for ${method} ${url}` }));
    }
    return Promise.resolve(response(route.status, route.body));
  };
}

function response(status: number, body: unknown) {
  return {
    status,
    json: () => Promise.resolve(body),
    text: () => Promise.resolve(JSON.stringify(body)),
  };
}

export function makeTrace(overrides: Partial<Trace> = {}): Trace {
  return {
    trace_id: "t-0123456789abcdef0123456789abcdef",
    cadet_id: "C001",
    cycle: "2026-1",
    marks: {
      leadership: "85.00",
      theory_paper1: "85.00",
      theory_paper2: "85.00",
      military_practical: "85.00",
      military_imp: "85.00",
      marching: "85.00",
      weapons: "85.00",
      shooting_skill: "85.00",
      war_field: "85.00",
      sports: "85.00",
      attendance: "85.00",
      coach_observation: "85.00",
    },
    composite: "85.00",
    firings: [
      { rule: "stage_high", snapshot: { composite: "85.00" }, actions: ["stage = HIGH"], seq: 1 },
    ],
    stage: "HIGH",
    eligible: ["Corporal", "Sergeant", "JUO", "SUO"],
    ...overrides,
  };
}

export function makeEvaluation(overrides: Partial<EvaluationResponse> = {}): EvaluationResponse {
  return {
    cadet_id: "C001",
    cycle: "2026-1",
    composite: "85.00",
    stage: "HIGH",
    eligible: ["Corporal", "Sergeant", "JUO", "SUO"],
    trace_id: "t-0123456789abcdef0123456789abcdef",
    ...overrides,
  };
}

export function makeWhatIf(overrides: Partial<WhatIfResponse> = {}): WhatIfResponse {
  return {
    cadet_id: "C001",
    cycle: "2026-1",
    composite: "82.00",
    stage: "HIGH",
    eligible: ["Corporal", "Sergeant", "JUO", "SUO"],
    trace: makeTrace({ trace_id: "whatif-0123456789abcdef0123456789abcdef", composite: "82.00" }),
    ...overrides,
  };
}

export function makeRankingEntry(overrides: Partial<RankingEntry> = {}): RankingEntry {
  return {
    cadet_id: "C001",
    composite: "85.00",
    stage: "HIGH",
    eligible: ["Corporal", "Sergeant", "JUO", "SUO"],
    tie_break_used: false,
    manual_review: false,
    notes: [],
    ...overrides,
  };
}
