import { describe, expect, it } from "vitest";

import { axisPoint, polygonPoints, radarSvg } from "../src/radar.js";

describe("radar geometry", () => {
  it("puts the first axis straight up", () => {
    const p = axisPoint(0, 5, 5, 100);
    expect(p.x).toBeCloseTo(0, 9);
    expect(p.y).toBeCloseTo(-100, 9);
  });

  it("scales magnitude linearly against the 1..5 scale", () => {
    const full = axisPoint(0, 5, 5, 100);
    const half = axisPoint(0, 5, 2.5, 100);
    expect(half.y).toBeCloseTo(full.y / 2, 9);
  });

  it("clamps out-of-range values", () => {
    expect(axisPoint(0, 5, 99, 100).y).toBeCloseTo(-100, 9);
    expect(axisPoint(0, 5, -3, 100).y).toBeCloseTo(0, 9);
  });

  it("renders null values at the center", () => {
    const points = polygonPoints([null, 5], 100);
    expect(points.startsWith("0,0 ")).toBe(true);
  });
});

describe("radar svg", () => {
  const axes = ["T", "I", "G", "E", "R"];

  it("renders one polygon per series plus five rings", () => {
    const svg = radarSvg(axes, [
      { label: "baseline", values: [3, 5, 3, 5, 3], className: "radar-baseline" },
      { label: "current", values: [2, 5, 3, 5, 3], className: "radar-current" },
    ]);
    expect(svg.match(/radar-ring/g)).toHaveLength(5);
    expect(svg.match(/data-series/g)).toHaveLength(2);
    expect(svg).toContain('data-series="baseline"');
    expect(svg).toContain(">T</text>");
  });

  it("is a deterministic pure function", () => {
    const series = [{ label: "current", values: [1, 2, 3, 4, 5], className: "radar-current" }];
    expect(radarSvg(axes, series)).toBe(radarSvg(axes, series));
  });
});
