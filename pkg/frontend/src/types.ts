/**
 * Wire types for the cadex HTTP API.
 *
 * Every fixed-point number crosses the wire as a decimal string such as
 * "85.00"; the console never converts marks or composites to floats.
 */

export type DecimalString = string;

export const COMPONENTS = [
  "leadership",
  "theory_paper1",
  "theory_paper2",
  "military_practical",
  "military_imp",
  "marching",
  "weapons",
  "shooting_skill",
  "war_field",
  "sports",
  "attendance",
  "coach_observation",
] as const;

export type ComponentId = (typeof COMPONENTS)[number];

export const COMPONENT_LABELS: Record<ComponentId, string> = {
  leadership: "Leadership",
  theory_paper1: "Theory Paper 1",
  theory_paper2: "Theory Paper 2",
  military_practical: "Military Practical",
  military_imp: "Military IMP",
  marching: "Marching",
  weapons: "Weapons",
  shooting_skill: "Shooting Skill",
  war_field: "War Field",
  sports: "Sports",
  attendance: "Attendance",
  coach_observation: "Coach Observation",
};

export type Stage = "HIGH" | "AVERAGE" | "LOW" | "FAIL";

export type Rank =
  | "CadetOfficer"
  | "LanceCorporal"
  | "Corporal"
  | "Sergeant"
  | "JUO"
  | "SUO";

export interface Cadet {
  cadet_id: string;
  name: string;
  rank: Rank;
  enrollment_cycle: string;
}

export interface CoachNote {
  cadet_id: string;
  cycle: string;
  author: string;
  text: string;
  timestamp: string;
}

export interface EvaluationResponse {
  cadet_id: string;
  cycle: string;
  composite: DecimalString;
  stage: Stage;
  eligible: Rank[];
  trace_id: string;
}

export interface RuleFiring {
  rule: string;
  snapshot: Record<string, string>;
  actions: string[];
  seq: number;
}

export interface Trace {
  trace_id: string;
  cadet_id: string;
  cycle: string;
  marks: Record<ComponentId, DecimalString>;
  composite: DecimalString;
  firings: RuleFiring[];
  stage: Stage | null;
  eligible: Rank[];
}

export interface WhatIfResponse {
  cadet_id: string;
  cycle: string;
  composite: DecimalString;
  stage: Stage;
  eligible: Rank[];
  trace: Trace;
}

export interface RankingEntry {
  cadet_id: string;
  composite: DecimalString;
  stage: Stage;
  eligible: Rank[];
  tie_break_used: boolean;
  manual_review: boolean;
  notes: CoachNote[];
}

export type TraceView = "general" | "detailed";

export interface TraceViewResponse {
  trace: Trace;
  view: TraceView;
  rendered: string;
}
