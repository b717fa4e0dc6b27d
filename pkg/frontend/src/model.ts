// Client-side view model. The workbench never computes scores itself: every
// number shown is lifted verbatim from a service response.

import type {
  CharacteristicPayload,
  CharacteristicsResponse,
  Dimension,
  RadarResponse,
} from "./types.js";

export const DIMENSION_ORDER: Dimension[] = ["T", "I", "G", "E", "R"];

export const DIMENSION_TITLES: Record<Dimension, string> = {
  T: "Token Weighted Voting and Incentives",
  I: "Infrastructure",
  G: "Governance",
  E: "Escalation",
  R: "Reputation",
};

export interface WorksheetRow {
  id: string;
  dimension: Dimension;
  title: string;
  question: string;
  basis: string;
  critical: boolean;
  score: number | null;
  indeterminate: boolean;
  metrics: [string, string][];
  evidence: string;
  editable: boolean;
  dirty: boolean;
}

export function titleOf(id: string): string {
  return id
    .split("_")
    .map((word) => word.charAt(0).toUpperCase() + word.slice(1))
    .join(" ");
}

export function formatMetricValue(value: unknown): string {
  if (value === null || value === undefined) {
    return "–";
  }
  if (typeof value === "number" || typeof value === "boolean" || typeof value === "string") {
    return String(value);
  }
  if (Array.isArray(value)) {
    return value.map(formatMetricValue).join(", ");
  }
  return JSON.stringify(value);
}

export function toRow(payload: CharacteristicPayload): WorksheetRow {
  return {
    id: payload.id,
    dimension: payload.dimension,
    title: titleOf(payload.id),
    question: payload.question,
    basis: payload.basis,
    critical: payload.critical,
    score: payload.score,
    indeterminate: payload.indeterminate,
    metrics: Object.entries(payload.metric_values)
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([key, value]) => [key, formatMetricValue(value)]),
    evidence: payload.evidence,
    editable: payload.basis === "qualitative" || payload.basis === "mixed",
    dirty: false,
  };
}

export function buildWorksheet(
  response: CharacteristicsResponse,
): Map<Dimension, WorksheetRow[]> {
  const grouped = new Map<Dimension, WorksheetRow[]>();
  for (const dimension of DIMENSION_ORDER) {
    grouped.set(dimension, []);
  }
  for (const payload of response.characteristics) {
    grouped.get(payload.dimension)?.push(toRow(payload));
  }
  return grouped;
}

export function worksheetRowCount(grouped: Map<Dimension, WorksheetRow[]>): number {
  let total = 0;
  for (const rows of grouped.values()) {
    total += rows.length;
  }
  return total;
}

export interface RadarSeries {
  label: string;
  values: (number | null)[];
  className: string;
}

/** Current radar, with the scenario-free baseline overlaid when it differs. */
export function overlaySeries(
  current: RadarResponse,
  baseline: RadarResponse | null,
): RadarSeries[] {
  const series: RadarSeries[] = [];
  if (baseline && !sameValues(baseline.values, current.values)) {
    series.push({ label: "baseline", values: baseline.values, className: "radar-baseline" });
  }
  series.push({ label: "current", values: current.values, className: "radar-current" });
  return series;
}

function sameValues(a: (number | null)[], b: (number | null)[]): boolean {
  return a.length === b.length && a.every((value, index) => value === b[index]);
}

/** Audit-trail discipline: any score below 5 needs supporting evidence text. */
export function entryValidationError(score: number, evidence: string): string | null {
  if (!Number.isInteger(score) || score < 1 || score > 5) {
    return "score must be an integer between 1 and 5";
  }
  if (score < 5 && evidence.trim() === "") {
    return "evidence is required for scores below 5";
  }
  return null;
}

export type AgentSortKey = "address" | "class" | "voting_power";

export function compareAgents(
  key: AgentSortKey,
): (a: { address: string; class: string; voting_power: string }, b: typeof a) => number {
  if (key === "voting_power") {
    return (a, b) => Number(b.voting_power) - Number(a.voting_power);
  }
  if (key === "class") {
    const order: Record<string, number> = { VIA: 0, PIA: 1, UIA: 2 };
    return (a, b) => (order[a.class] ?? 3) - (order[b.class] ?? 3) || a.address.localeCompare(b.address);
  }
  return (a, b) => a.address.localeCompare(b.address);
}
