// Integration against the real session service, spawned from the bundled
// reference snapshot. Exercises the secondary acceptance criteria end to end.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildWorksheet, overlaySeries } from "../src/model.js";

const PORT = 8923;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "../..");
const FIXTURE = join(REPO_ROOT, "src/tiger/fixtures/compound-2022");
const QUALITATIVE = join(REPO_ROOT, "src/tiger/fixtures/compound-2022-qualitative.json");

let service: ChildProcess;
let storeDir: string;
const client = new ApiClient(BASE);

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/api/v1/assessment`);
      if (response.ok) {
        return;
      }
    } catch {
      // not listening yet
    }
    await new Promise((resolveSleep) => setTimeout(resolveSleep, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "tiger-workbench-"));
  service = spawn(
    "tiger",
    [
      "serve",
      "--dataset",
      FIXTURE,
      "--qualitative",
      QUALITATIVE,
      "--store",
      storeDir,
      "--port",
      String(PORT),
    ],
    { stdio: "ignore" },
  );
  await waitForService();
});

afterAll(() => {
  service?.kill();
  rmSync(storeDir, { recursive: true, force: true });
});

describe("workbench against the live service", () => {
  it("renders the 15-row worksheet from GET /characteristics", async () => {
    const characteristics = await client.getCharacteristics();
    const grouped = buildWorksheet(characteristics);
    expect([...grouped.values()].flat()).toHaveLength(15);
    const tokenRow = [...grouped.values()].flat().find((row) => row.id === "token_distribution")!;
    expect(tokenRow.score).toBe(3);
    expect(new Map(tokenRow.metrics).get("insider_share_pct")).toBe("49.95");
  });

  it("updates a worksheet row and the radar from service responses alone", async () => {
    const before = await client.getCharacteristics();
    const beforeRadar = await client.getRadar();
    const beforeRow = before.characteristics.find((c) => c.id === "soft_power")!;
    expect(beforeRow.score).toBe(3);
    expect(beforeRadar.values).toEqual([3, 5, 3, 5, 3]);

    const postSeq = await client.postQualitative({
      characteristic: "soft_power",
      score: 4,
      evidence: "revised after review",
      assessor: "integration-test",
    });
    expect(postSeq).toBe(before.seq + 1);

    const after = await client.getCharacteristics();
    expect(after.seq).toBe(postSeq); // same audit point as the mutation
    const afterRow = after.characteristics.find((c) => c.id === "soft_power")!;
    expect(afterRow.score).toBe(4);

    const audit = await client.getAudit();
    expect(audit.seq).toBe(postSeq);
    expect(audit.events.at(-1)?.kind).toBe("qualitative");

    // R moves from (3+4+2)/3 to (4+4+2)/3; the radar reflects it verbatim
    const afterRadar = await client.getRadar();
    expect(afterRadar.values[4]).not.toBe(beforeRadar.values[4]);

    // restore the fixture value for the remaining tests
    await client.postQualitative({
      characteristic: "soft_power",
      score: 3,
      evidence: "restored",
      assessor: "integration-test",
    });
  });

  it("returns /assessment to a byte-identical body after scenario add + remove", async () => {
    const initial = await client.getAssessmentBytes();

    const summaryBefore = await client.getSummary();
    await client.postScenario({ kind: "vesting_complete" });
    const during = await client.getAssessmentBytes();
    expect(Buffer.from(during).equals(Buffer.from(initial))).toBe(false);

    const summaryDuring = await client.getSummary();
    expect(summaryDuring.scenarios).toEqual([{ kind: "vesting_complete" }]);

    // the radar overlay only exists while the stack is non-empty
    const overlay = overlaySeries(await client.getRadar(), { axes: ["T", "I", "G", "E", "R"], values: [3, 5, 3, 5, 3], indeterminate_axes: [] });
    expect(overlay.map((s) => s.label)).toContain("current");

    await client.deleteScenario(summaryDuring.scenarios.length - 1);
    const restored = await client.getAssessmentBytes();
    expect(Buffer.from(restored).equals(Buffer.from(initial))).toBe(true);

    const summaryAfter = await client.getSummary();
    expect(summaryAfter.scenarios).toEqual(summaryBefore.scenarios);
  });

  it("exports the report byte-for-byte equal to GET /report", async () => {
    const exported = await client.getReportBytes(); // exactly what the export button saves
    const direct = new Uint8Array(await (await fetch(`${BASE}/api/v1/report`)).arrayBuffer());
    expect(Buffer.from(exported).equals(Buffer.from(direct))).toBe(true);
    expect(new TextDecoder().decode(exported)).toContain("# Decentralization Assessment");
  });

  it("surfaces 400 bodies for invalid input and leaves state unchanged", async () => {
    const before = await client.getAssessmentBytes();
    await expect(
      client.postQualitative({ characteristic: "soft_power", score: 6, evidence: "", assessor: "t" }),
    ).rejects.toMatchObject({ status: 400 });
    const after = await client.getAssessmentBytes();
    expect(Buffer.from(after).equals(Buffer.from(before))).toBe(true);
  });

  it("override refreshes dependent delegate metrics", async () => {
    const metrics = await client.getMetrics();
    const via = metrics.agents.find((agent) => agent.class === "VIA")!;
    const count = metrics.delegation.distinct_via_delegates;

    await client.postOverride(via.address, "UIA");
    const demoted = await client.getMetrics();
    expect(demoted.delegation.distinct_via_delegates).toBe(count - 1);

    await client.postOverride(via.address, "VIA");
    const restored = await client.getMetrics();
    expect(restored.delegation.distinct_via_delegates).toBe(count);
  });
});
