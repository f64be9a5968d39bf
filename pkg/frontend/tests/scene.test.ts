import { describe, expect, it } from "vitest";

import { buildCanvas, buildLegend, buildPanel, SceneOptions } from "../src/scene.js";
import { createState, selectCheckpoint, setCursor, switchAlpha, toggleSeries,
         visibleCounts } from "../src/state.js";
import { findAll, textContent, VNode } from "../src/vdom.js";
import { goldenDocument, readFixture } from "./helpers.js";

const single = () => createState(goldenDocument("golden_single.curve.json"));
const overlay = () => createState(goldenDocument("golden_overlay.curve.json"));

// the golden SVG was rendered at 800x500 with default radius and tension
const GOLDEN_OPTIONS: SceneOptions = { width: 800, height: 500, pointRadius: 3, tension: 0.5 };

function segmentCount(path: VNode): number {
  return (path.attrs.d.match(/C /g) ?? []).length;
}

describe("render counts", () => {
  it("full curve shows one circle per checkpoint and one path per series", () => {
    const s = single();
    const canvas = buildCanvas(s);
    expect(findAll(canvas, "circle")).toHaveLength(s.doc.checkpoints.length);
    const paths = findAll(canvas, "path");
    expect(paths).toHaveLength(1);
    expect(segmentCount(paths[0])).toBe(s.doc.checkpoints.length - 1);
  });

  it("overlay shows three paths with distinct dash styles", () => {
    const s = overlay();
    const canvas = buildCanvas(s);
    const paths = findAll(canvas, "path");
    expect(paths).toHaveLength(3);
    const dashes = new Set(paths.map((p) => p.attrs["stroke-dasharray"] ?? ""));
    expect(dashes.size).toBe(3);
    expect(findAll(canvas, "circle")).toHaveLength(s.doc.checkpoints.length);
  });

  it("cursor at k shows k points and k-1 segments per fully-elapsed series", () => {
    const s0 = single();
    for (const k of [0, 1, 2, 7, s0.doc.checkpoints.length]) {
      const s = setCursor(s0, k);
      const canvas = buildCanvas(s);
      expect(findAll(canvas, "circle")).toHaveLength(k);
      const paths = findAll(canvas, "path");
      if (k >= 2) {
        expect(paths).toHaveLength(1);
        expect(segmentCount(paths[0])).toBe(k - 1);
      } else {
        expect(paths).toHaveLength(0);
      }
    }
  });

  it("overlay cursor splits points across series by global time order", () => {
    const s0 = overlay();
    const k = 11;
    const s = setCursor(s0, k);
    const counts = visibleCounts(s);
    const canvas = buildCanvas(s);
    expect(findAll(canvas, "circle")).toHaveLength(k);
    const paths = findAll(canvas, "path");
    for (const p of paths) {
      const sid = p.attrs["data-series"];
      expect(segmentCount(p)).toBe((counts.get(sid) ?? 0) - 1);
    }
  });

  it("hiding a series removes its path; hiding all shows the hint", () => {
    const s0 = overlay();
    const one = toggleSeries(s0, s0.doc.series[0].series_id);
    expect(findAll(buildCanvas(one), "path")).toHaveLength(2);
    const none = s0.doc.series.reduce((s, info) => toggleSeries(s, info.series_id), s0);
    const canvas = buildCanvas(none);
    expect(findAll(canvas, "path")).toHaveLength(0);
    expect(findAll(canvas, "circle")).toHaveLength(0);
    const hints = findAll(canvas, "text").filter((t) => t.attrs.class === "hint");
    expect(hints).toHaveLength(1);
    expect(hints[0].text).toContain("no series visible");
  });

  it("selected checkpoint is marked", () => {
    const s = selectCheckpoint(single(), 4);
    const canvas = buildCanvas(s);
    const selected = findAll(canvas, "circle").filter(
      (c) => c.attrs.class.includes("selected"));
    expect(selected).toHaveLength(1);
    expect(selected[0].attrs["data-index"]).toBe("4");
  });

  it("alpha switch and back restores identical geometry", () => {
    const s0 = single();
    const before = JSON.stringify(buildCanvas(s0));
    const there = buildCanvas(switchAlpha(s0, 0.5));
    expect(JSON.stringify(there)).not.toBe(before);
    const back = buildCanvas(switchAlpha(switchAlpha(s0, 0.5), 0.0));
    expect(JSON.stringify(back)).toBe(before);
  });
});

describe("static SVG parity", () => {
  function parseGolden() {
    const svg = readFixture("golden_single.alpha0.svg");
    const d = /<path d="([^"]+)"/.exec(svg)![1];
    const circles = [...svg.matchAll(/<circle cx="([0-9.-]+)" cy="([0-9.-]+)" r="([0-9.-]+)" fill="(#[0-9a-f]{6})"/g)]
      .map((m) => ({ cx: +m[1], cy: +m[2], r: +m[3], fill: m[4] }));
    const stops = [...svg.matchAll(/<stop offset="([0-9.]+)" stop-color="(#[0-9a-f]{6})"/g)]
      .map((m) => ({ offset: +m[1], color: m[2] }));
    return { d, circles, stops };
  }

  function numbers(d: string): number[] {
    return (d.match(/-?\d+\.?\d*/g) ?? []).map(Number);
  }

  function channelDiff(a: string, b: string): number {
    let worst = 0;
    for (const at of [1, 3, 5]) {
      worst = Math.max(worst, Math.abs(
        parseInt(a.slice(at, at + 2), 16) - parseInt(b.slice(at, at + 2), 16)));
    }
    return worst;
  }

  it("scrub-to-end reproduces the static render geometry", () => {
    const golden = parseGolden();
    const s = setCursor(single(), single().doc.checkpoints.length); // explicit scrub to end
    const canvas = buildCanvas(s, GOLDEN_OPTIONS);

    const paths = findAll(canvas, "path");
    expect(paths).toHaveLength(1);
    const got = numbers(paths[0].attrs.d);
    const want = numbers(golden.d);
    expect(got).toHaveLength(want.length);
    for (let i = 0; i < want.length; i++) {
      expect(Math.abs(got[i] - want[i])).toBeLessThanOrEqual(1.5e-3);
    }

    const circles = findAll(canvas, "circle");
    expect(circles).toHaveLength(golden.circles.length);
    circles.forEach((c, i) => {
      expect(Math.abs(+c.attrs.cx - golden.circles[i].cx)).toBeLessThanOrEqual(1.5e-3);
      expect(Math.abs(+c.attrs.cy - golden.circles[i].cy)).toBeLessThanOrEqual(1.5e-3);
      expect(Math.abs(+c.attrs.r - golden.circles[i].r)).toBeLessThanOrEqual(1.5e-3);
      expect(channelDiff(c.attrs.fill, golden.circles[i].fill)).toBeLessThanOrEqual(1);
    });

    const stops = findAll(canvas, "stop");
    expect(stops).toHaveLength(golden.stops.length);
    stops.forEach((stop, i) => {
      expect(Math.abs(+stop.attrs.offset - golden.stops[i].offset)).toBeLessThanOrEqual(1.5e-3);
      expect(channelDiff(stop.attrs["stop-color"], golden.stops[i].color)).toBeLessThanOrEqual(1);
    });
  });
});

describe("side panel", () => {
  it("lists timestamp, record count, annotations above templates", () => {
    const s0 = single();
    const doc = s0.doc;
    doc.checkpoints[2].annotations.push("llm summary of this window");
    const s = selectCheckpoint(s0, 2);
    const panel = buildPanel(s);
    expect(panel.attrs.class).toContain("open");
    const text = textContent(panel);
    expect(text).toContain("llm summary of this window");
    const items = findAll(panel, "li");
    expect(items).toHaveLength(doc.checkpoints[2].template_texts.length);
    expect(text).toContain(`${doc.checkpoints[2].record_count} records`);
    expect(text).toMatch(/\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z/);
    const asText = JSON.stringify(panel);
    expect(asText.indexOf("llm summary")).toBeLessThan(asText.indexOf("templates"));
  });

  it("no selection renders a closed panel", () => {
    expect(buildPanel(single()).attrs.class).toContain("closed");
  });

  it("legend carries one entry per series with labels", () => {
    const legend = buildLegend(overlay());
    const entries = findAll(legend, "li");
    expect(entries).toHaveLength(3);
    expect(textContent(legend)).toContain("bravo");
  });
});
