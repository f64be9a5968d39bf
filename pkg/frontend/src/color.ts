/** Shared time gradient; anchors must match the CLI renderer (docs/schema.md). */

export const TIME_GRADIENT_START = "#7a1fa2";
export const TIME_GRADIENT_END = "#2e9e4f";

function hexRgb(color: string): [number, number, number] {
  return [
    parseInt(color.slice(1, 3), 16),
    parseInt(color.slice(3, 5), 16),
    parseInt(color.slice(5, 7), 16),
  ];
}

export function timeColor(fraction: number): string {
  const f = Math.min(1, Math.max(0, fraction));
  const start = hexRgb(TIME_GRADIENT_START);
  const end = hexRgb(TIME_GRADIENT_END);
  const rgb = start.map((s, i) => Math.round(s + (end[i] - s) * f));
  return "#" + rgb.map((v) => v.toString(16).padStart(2, "0")).join("");
}

export function timeFraction(ts: number, tMin: number, tMax: number): number {
  if (tMax === tMin) return 0.5;
  return (ts - tMin) / (tMax - tMin);
}
