// Payload shapes mirrored from the /api/v1 service responses.

export type Dimension = "T" | "I" | "G" | "E" | "R";

export type Basis = "quantitative" | "qualitative" | "mixed";

export interface CharacteristicPayload {
  id: string;
  dimension: Dimension;
  question: string;
  basis: Basis;
  critical: boolean;
  score: number | null;
  indeterminate: boolean;
  metric_values: Record<string, unknown>;
  evidence: string;
  provenance: Record<string, unknown>;
}

export interface CharacteristicsResponse {
  seq: number;
  characteristics: CharacteristicPayload[];
}

export interface RadarResponse {
  axes: Dimension[];
  values: (number | null)[];
  indeterminate_axes: Dimension[];
}

export interface ScenarioSpecPayload {
  kind: string;
  address?: string;
  parts?: number;
  flag?: string;
  agent_count?: number;
  amount?: string;
}

export interface SummaryResponse {
  seq: number;
  dao_name: string;
  dao_category: string | null;
  snapshot_time: string;
  dataset_hash: string;
  calibration_id: string;
  counts: Record<string, number>;
  supply: { max: string; circulating: string };
  scenarios: ScenarioSpecPayload[];
  verdict: string;
  overall: number | null;
}

export interface AgentRow {
  address: string;
  class: "VIA" | "PIA" | "UIA";
  basis: string;
  matched_rule: string;
  voting_power: string;
  is_contract: boolean;
}

export interface MetricsResponse {
  seq: number;
  insider_share_pct: number;
  gini_holder_balances: number | null;
  delegation: {
    delegated_total: string;
    delegated_share_pct: number;
    top_n_coverage: Record<string, number>;
    distinct_via_delegates: number;
  };
  governance_nakamoto: number | "unreachable";
  decisiveness: {
    k: number;
    fraction: number;
    decided_proposals: number;
    majority_proposals: number;
  } | null;
  timing: { total_days: number; pass: boolean };
  inflation: { pct_a_external: number; pct_b_insider: number; has_inflation: boolean };
  participation: Record<string, unknown> | null;
  agents: AgentRow[];
}

export interface AuditEvent {
  seq: number;
  at: string;
  kind: string;
  payload: Record<string, unknown>;
}

export interface AuditResponse {
  seq: number;
  events: AuditEvent[];
}

export interface ErrorBody {
  error: { code: string; message: string };
}
