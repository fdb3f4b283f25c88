// Shapes of the service's JSON responses. Displayed numbers come from
// these fields verbatim; the client never recomputes analysis results.

export type StateKeyJson = string | string[];

export interface ModelState {
  id: number;
  key: StateKeyJson;
}

export interface ModelEdge {
  from: number;
  to: number;
  p: number;
  mean_hours: number;
  n_samples: number;
  gmm: unknown | null;
}

export interface ModelJson {
  k: number;
  states: ModelState[];
  edges: ModelEdge[];
}

export interface ReportState {
  key: StateKeyJson;
  pi: number;
  mean_hours: number;
  contribution_hours: number;
}

export interface Report {
  states: ReportState[];
  mean_hours: number;
  mean_seconds: number;
  mean_formatted: string;
  start_pi: number;
}

export interface ModelResponse {
  model: ModelJson;
  report: Report;
}

export interface PdfPayload {
  mass_check: number;
  mean_hours: number;
  curve: { t_hours: number[]; density: number[] };
}

export interface WhatifResponse {
  baseline: Report;
  report: Report;
  baseline_pdf?: PdfPayload;
  scenario_pdf?: PdfPayload;
}

export type Edit =
  | { op: "set_probability"; from: StateKeyJson; to: StateKeyJson; value: number }
  | { op: "scale_state_mean"; state: StateKeyJson; factor: number }
  | { op: "set_edge_mean"; from: StateKeyJson; to: StateKeyJson; hours: number };

export function keyLabel(key: StateKeyJson): string {
  return typeof key === "string" ? key : key.join(",");
}

export function sameKey(a: StateKeyJson, b: StateKeyJson): boolean {
  return keyLabel(a) === keyLabel(b);
}
