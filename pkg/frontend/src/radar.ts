// SVG radar rendering as pure string-producing functions (testable headless).

import type { RadarSeries } from "./model.js";

const SCALE_MAX = 5;

export interface Point {
  x: number;
  y: number;
}

/** Vertex for one axis at a given magnitude; axis 0 points straight up. */
export function axisPoint(index: number, count: number, value: number, radius: number): Point {
  const angle = (2 * Math.PI * index) / count - Math.PI / 2;
  const r = (Math.max(0, Math.min(SCALE_MAX, value)) / SCALE_MAX) * radius;
  return { x: r * Math.cos(angle), y: r * Math.sin(angle) };
}

export function polygonPoints(values: (number | null)[], radius: number): string {
  const count = values.length;
  return values
    .map((value, index) => axisPoint(index, count, value ?? 0, radius))
    .map((p) => `${round2(p.x)},${round2(p.y)}`)
    .join(" ");
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

export function radarSvg(axes: string[], series: RadarSeries[], size = 280): string {
  const radius = size / 2 - 30;
  const center = size / 2;
  const rings = [1, 2, 3, 4, 5]
    .map(
      (level) =>
        `<polygon class="radar-ring" points="${polygonPoints(
          axes.map(() => level),
          radius,
        )}" />`,
    )
    .join("");
  const spokes = axes
    .map((_, index) => {
      const tip = axisPoint(index, axes.length, SCALE_MAX, radius);
      return `<line class="radar-spoke" x1="0" y1="0" x2="${round2(tip.x)}" y2="${round2(tip.y)}" />`;
    })
    .join("");
  const labels = axes
    .map((axis, index) => {
      const tip = axisPoint(index, axes.length, SCALE_MAX + 0.7, radius);
      return `<text class="radar-label" x="${round2(tip.x)}" y="${round2(tip.y)}" text-anchor="middle" dominant-baseline="middle">${axis}</text>`;
    })
    .join("");
  const polygons = series
    .map(
      (s) =>
        `<polygon class="${s.className}" data-series="${s.label}" points="${polygonPoints(
          s.values,
          radius,
        )}" />`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${size} ${size}" width="${size}" height="${size}" role="img" aria-label="dimension radar">` +
    `<g transform="translate(${center},${center})">${rings}${spokes}${polygons}${labels}</g>` +
    `</svg>`
  );
}
