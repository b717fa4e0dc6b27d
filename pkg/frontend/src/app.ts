// Workbench wiring. All state shown here originates from service responses;
// the client holds no scoring logic of its own.

import { ApiClient, ApiError } from "./api.js";
import {
  AgentSortKey,
  DIMENSION_ORDER,
  DIMENSION_TITLES,
  WorksheetRow,
  buildWorksheet,
  compareAgents,
  entryValidationError,
  overlaySeries,
} from "./model.js";
import { radarSvg } from "./radar.js";
import type { MetricsResponse, RadarResponse, ScenarioSpecPayload, SummaryResponse } from "./types.js";

const client = new ApiClient((globalThis as { TIGER_API_BASE?: string }).TIGER_API_BASE ?? "");

interface UiState {
  online: boolean;
  summary: SummaryResponse | null;
  radar: RadarResponse | null;
  baselineRadar: RadarResponse | null; // captured before the first scenario push
  metrics: MetricsResponse | null;
  rows: Map<string, WorksheetRow>;
  agentSort: AgentSortKey;
}

const state: UiState = {
  online: true,
  summary: null,
  radar: null,
  baselineRadar: null,
  metrics: null,
  rows: new Map(),
  agentSort: "voting_power",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function setBanner(message: string | null): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
  document.body.classList.toggle("offline", message !== null);
  for (const control of document.querySelectorAll<HTMLButtonElement>("button, select, input, textarea")) {
    if (control.id !== "retry") {
      control.disabled = message !== null;
    }
  }
}

async function guard<T>(work: () => Promise<T>, inlineTarget?: HTMLElement): Promise<T | null> {
  try {
    const result = await work();
    if (!state.online) {
      state.online = true;
      setBanner(null);
    }
    if (inlineTarget) {
      inlineTarget.textContent = "";
    }
    return result;
  } catch (error) {
    if (error instanceof ApiError) {
      if (inlineTarget) {
        inlineTarget.textContent = `${error.code}: ${error.message}`;
      }
      return null;
    }
    state.online = false;
    setBanner("service unreachable - inputs disabled");
    return null;
  }
}

function renderHeader(): void {
  const summary = state.summary;
  if (!summary) {
    return;
  }
  el<HTMLSpanElement>("dao-name").textContent = summary.dao_name;
  el<HTMLSpanElement>("snapshot-time").textContent = summary.snapshot_time;
  el<HTMLSpanElement>("dataset-hash").textContent = summary.dataset_hash.slice(0, 16);
  el<HTMLSpanElement>("calibration-id").textContent = summary.calibration_id;
  el<HTMLSpanElement>("audit-seq").textContent = String(client.lastSeq);
  const verdict = el<HTMLSpanElement>("verdict");
  verdict.textContent = `${summary.verdict}${summary.overall !== null ? ` (${summary.overall})` : ""}`;
  verdict.className = `badge badge-${summary.verdict}`;
}

function renderRadar(): void {
  if (!state.radar) {
    return;
  }
  const series = overlaySeries(state.radar, state.baselineRadar);
  el<HTMLDivElement>("radar").innerHTML = radarSvg(state.radar.axes, series);
  el<HTMLDivElement>("radar-legend").textContent =
    series.length > 1 ? "overlay: baseline vs scenario stack" : "";
}

function scoreCell(row: WorksheetRow): string {
  if (row.indeterminate) {
    return `<span class="score indeterminate">indeterminate</span>`;
  }
  return `<span class="score score-${row.score}">${row.score}</span>`;
}

function renderWorksheet(): void {
  const host = el<HTMLDivElement>("worksheet");
  host.innerHTML = "";
  const grouped = new Map<string, WorksheetRow[]>();
  for (const row of state.rows.values()) {
    const bucket = grouped.get(row.dimension) ?? [];
    bucket.push(row);
    grouped.set(row.dimension, bucket);
  }
  for (const dimension of DIMENSION_ORDER) {
    const section = document.createElement("section");
    section.className = "dimension";
    const heading = document.createElement("h2");
    heading.textContent = `${DIMENSION_TITLES[dimension]} (${dimension})`;
    section.appendChild(heading);
    for (const row of grouped.get(dimension) ?? []) {
      section.appendChild(renderRow(row));
    }
    host.appendChild(section);
  }
}

function renderRow(row: WorksheetRow): HTMLElement {
  const card = document.createElement("article");
  card.className = `row basis-${row.basis}${row.dirty ? " dirty" : ""}`;
  card.dataset.characteristic = row.id;

  const metrics = row.metrics
    .map(([key, value]) => `<li><span class="metric-key">${key}</span> ${value}</li>`)
    .join("");
  card.innerHTML = `
    <header>
      <h3>${row.title}${row.critical ? ' <span class="critical-tag">critical</span>' : ""}</h3>
      ${scoreCell(row)}
    </header>
    <p class="question">${row.question}</p>
    <ul class="metrics">${metrics}</ul>
    <p class="evidence">${row.evidence || "<em>no evidence recorded</em>"}</p>
  `;

  if (row.editable) {
    const form = document.createElement("form");
    form.className = "entry-form";
    form.innerHTML = `
      <label>score
        <select name="score">
          ${[1, 2, 3, 4, 5]
            .map((n) => `<option value="${n}" ${row.score === n ? "selected" : ""}>${n}</option>`)
            .join("")}
        </select>
      </label>
      <label class="grow">evidence
        <input name="evidence" type="text" placeholder="why this score" value="" />
      </label>
      <button type="submit">submit</button>
      <span class="inline-error" role="alert"></span>
    `;
    const error = form.querySelector<HTMLSpanElement>(".inline-error")!;
    form.addEventListener("input", () => {
      row.dirty = true;
      card.classList.add("dirty");
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const score = Number(data.get("score"));
      const evidence = String(data.get("evidence") ?? "");
      const problem = entryValidationError(score, evidence);
      if (problem) {
        error.textContent = problem;
        return;
      }
      void guard(async () => {
        await client.postQualitative({
          characteristic: row.id,
          score,
          evidence,
          assessor: "workbench",
        });
        await refreshAll();
      }, error);
    });
    card.appendChild(form);
  }
  return card;
}

function renderScenarios(): void {
  const summary = state.summary;
  if (!summary) {
    return;
  }
  const list = el<HTMLUListElement>("scenario-list");
  list.innerHTML = "";
  summary.scenarios.forEach((spec, index) => {
    const item = document.createElement("li");
    const label = document.createElement("code");
    label.textContent = describeScenario(spec);
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.addEventListener("click", () => {
      void guard(async () => {
        await client.deleteScenario(index);
        await refreshAll();
      }, el("scenario-error"));
    });
    item.append(label, remove);
    list.appendChild(item);
  });
}

export function describeScenario(spec: ScenarioSpecPayload): string {
  const parts = [spec.kind];
  if (spec.address) parts.push(spec.address.slice(0, 10));
  if (spec.parts) parts.push(`x${spec.parts}`);
  if (spec.flag) parts.push(spec.flag);
  if (spec.amount) parts.push(spec.amount);
  return parts.join(" ");
}

function scenarioFormSpec(form: HTMLFormElement): ScenarioSpecPayload {
  const data = new FormData(form);
  const kind = String(data.get("kind"));
  const spec: ScenarioSpecPayload = { kind };
  const address = String(data.get("address") ?? "").trim();
  const parts = String(data.get("parts") ?? "").trim();
  const flag = String(data.get("flag") ?? "").trim();
  const amount = String(data.get("amount") ?? "").trim();
  if (kind === "remove_delegate" || kind === "split_whale") {
    spec.address = address;
  }
  if (kind === "split_whale" && parts) {
    spec.parts = Number(parts);
  }
  if (kind === "toggle_capability") {
    spec.flag = flag;
  }
  if (kind === "set_opposition") {
    spec.amount = amount;
  }
  return spec;
}

function wireScenarioForm(): void {
  const form = el<HTMLFormElement>("scenario-form");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void guard(async () => {
      if (state.summary && state.summary.scenarios.length === 0 && state.radar) {
        state.baselineRadar = state.radar; // capture the pre-scenario radar
      }
      await client.postScenario(scenarioFormSpec(form));
      await refreshAll();
    }, el("scenario-error"));
  });
}

function renderAgents(): void {
  const metrics = state.metrics;
  if (!metrics) {
    return;
  }
  const body = el<HTMLTableSectionElement>("agent-rows");
  body.innerHTML = "";
  const rows = [...metrics.agents]
    .filter((agent) => !agent.is_contract)
    .sort(compareAgents(state.agentSort))
    .slice(0, 120);
  for (const agent of rows) {
    const tr = document.createElement("tr");
    tr.innerHTML = `
      <td><code>${agent.address.slice(0, 14)}</code></td>
      <td><span class="class-${agent.class}">${agent.class}</span></td>
      <td class="num">${agent.voting_power}</td>
      <td>${agent.basis}</td>
    `;
    const cell = document.createElement("td");
    const select = document.createElement("select");
    select.innerHTML = ["VIA", "PIA", "UIA"]
      .map((cls) => `<option ${cls === agent.class ? "selected" : ""}>${cls}</option>`)
      .join("");
    const apply = document.createElement("button");
    apply.textContent = "override";
    apply.addEventListener("click", () => {
      void guard(async () => {
        await client.postOverride(agent.address, select.value);
        await refreshAll();
      }, el("agent-error"));
    });
    cell.append(select, apply);
    tr.appendChild(cell);
    body.appendChild(tr);
  }
  el<HTMLSpanElement>("delegate-count").textContent = String(
    metrics.delegation.distinct_via_delegates,
  );
  el<HTMLSpanElement>("governance-nakamoto").textContent = String(metrics.governance_nakamoto);
}

function wireAgentSort(): void {
  for (const header of document.querySelectorAll<HTMLTableCellElement>("#agent-table th[data-sort]")) {
    header.addEventListener("click", () => {
      state.agentSort = header.dataset.sort as AgentSortKey;
      renderAgents();
    });
  }
}

function wireExport(): void {
  el<HTMLButtonElement>("export-report").addEventListener("click", () => {
    void guard(async () => {
      const bytes = await client.getReportBytes();
      const blob = new Blob([bytes as BlobPart], { type: "text/markdown" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "assessment-report.md";
      link.click();
      URL.revokeObjectURL(link.href);
    });
  });
}

async function refreshAll(): Promise<void> {
  const result = await guard(async () => {
    const [summary, characteristics, radar, metrics] = await Promise.all([
      client.getSummary(),
      client.getCharacteristics(),
      client.getRadar(),
      client.getMetrics(),
    ]);
    return { summary, characteristics, radar, metrics };
  });
  if (!result) {
    return;
  }
  // sequence reconciliation: a stale read triggers one full refetch
  if (result.summary.seq !== result.characteristics.seq || result.summary.seq !== result.metrics.seq) {
    await refreshAll();
    return;
  }
  state.summary = result.summary;
  state.radar = result.radar;
  state.metrics = result.metrics;
  if (result.summary.scenarios.length === 0) {
    state.baselineRadar = null; // overlay collapses once the stack empties
  }
  state.rows = new Map();
  for (const grouped of buildWorksheet(result.characteristics).values()) {
    for (const row of grouped) {
      state.rows.set(row.id, row);
    }
  }
  renderHeader();
  renderWorksheet();
  renderRadar();
  renderScenarios();
  renderAgents();
}

export function start(): void {
  wireScenarioForm();
  wireAgentSort();
  wireExport();
  el<HTMLButtonElement>("retry").addEventListener("click", () => void refreshAll());
  void refreshAll();
}

if (typeof document !== "undefined" && document.getElementById("worksheet")) {
  start();
}
