/** Build the render tree (curve canvas, legend, annotation panel) from state.
 * Geometry matches the CLI's static SVG at animation end for the same alpha.
 */

import { timeColor, timeFraction } from "./color.js";
import { fitViewport, pathD, Point, pointRadiusFor, smoothPath } from "./geometry.js";
import { activeEmbedding, ViewState, visibleCounts } from "./state.js";
import { h, VNode } from "./vdom.js";

export interface SceneOptions {
  width: number;
  height: number;
  pointRadius: number;
  tension: number;
}

export const DEFAULT_OPTIONS: SceneOptions = {
  width: 900,
  height: 600,
  pointRadius: 3,
  tension: 0.5,
};

const SERIES_DASHES = ["", "7 4", "2 4", "9 3 2 3"];

function fmt(v: number): string {
  return v.toFixed(4);
}

/** The SVG curve canvas: per-series gradient defs, paths, and point circles. */
export function buildCanvas(state: ViewState, options: SceneOptions = DEFAULT_OPTIONS): VNode {
  const { doc } = state;
  const emb = activeEmbedding(state);
  const toPx = fitViewport(emb.points as Point[], options.width, options.height);
  const timestamps = doc.checkpoints.map((cp) => cp.timestamp);
  const tMin = Math.min(...timestamps);
  const tMax = Math.max(...timestamps);
  const counts = visibleCounts(state);

  const defs: VNode[] = [];
  const paths: VNode[] = [];
  const circles: VNode[] = [];

  doc.series.forEach((series, sIdx) => {
    if (!state.visible.has(series.series_id)) {
      return;
    }
    const rows: number[] = [];
    doc.checkpoints.forEach((cp, k) => {
      if (cp.series_id === series.series_id) rows.push(k);
    });
    if (rows.length === 0) {
      return;
    }
    const px = rows.map((k) => toPx(emb.points[k] as Point));
    const fracs = rows.map((k) => timeFraction(doc.checkpoints[k].timestamp, tMin, tMax));
    const shown = Math.min(counts.get(series.series_id) ?? 0, rows.length);

    // gradient over the full series so colors stay put while animating
    const gradId = `tg${sIdx}`;
    if (rows.length >= 2) {
      let [x1, y1] = px[0];
      let [x2, y2] = px[px.length - 1];
      if (x1 === x2 && y1 === y2) {
        x2 = x1 + 1; // closed loop: give the gradient a direction
      }
      const lo = fracs[0];
      const hi = fracs[fracs.length - 1];
      const stops = fracs.map((frac) => {
        const offset = hi === lo ? 0 : (frac - lo) / (hi - lo);
        return h("stop", {
          offset: fmt(Math.min(1, Math.max(0, offset))),
          "stop-color": timeColor(frac),
        });
      });
      defs.push(
        h("linearGradient", {
          id: gradId,
          gradientUnits: "userSpaceOnUse",
          x1: fmt(x1), y1: fmt(y1), x2: fmt(x2), y2: fmt(y2),
        }, stops),
      );
    }

    if (shown >= 2) {
      const dash = SERIES_DASHES[sIdx % SERIES_DASHES.length];
      const attrs: Record<string, string> = {
        d: pathD(smoothPath(px.slice(0, shown), options.tension)),
        fill: "none",
        stroke: `url(#${gradId})`,
        "stroke-width": "1.5",
        "data-series": series.series_id,
      };
      if (dash) {
        attrs["stroke-dasharray"] = dash;
      }
      paths.push(h("path", attrs));
    }

    for (let i = 0; i < shown; i++) {
      const k = rows[i];
      const cp = doc.checkpoints[k];
      const [x, y] = px[i];
      const r = pointRadiusFor(cp.record_count, options.pointRadius);
      const attrs: Record<string, string> = {
        cx: fmt(x), cy: fmt(y), r: fmt(r),
        fill: timeColor(fracs[i]),
        "data-index": String(k),
        class: state.selected === k ? "point selected" : "point",
      };
      circles.push(h("circle", attrs));
    }
  });

  const children: VNode[] = [
    h("defs", {}, defs),
    h("rect", { width: "100%", height: "100%", fill: "white" }),
  ];
  const t = state.transform;
  children.push(h("g", {
    transform: `translate(${t.x} ${t.y}) scale(${t.k})`,
    "data-layer": "curve",
  }, [...paths, ...circles]));

  if (paths.length === 0 && circles.length === 0) {
    children.push(h("text", {
      x: fmt(options.width / 2), y: fmt(options.height / 2),
      "text-anchor": "middle", fill: "#666", class: "hint",
    }, [], "no series visible"));
  }

  return h("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    width: String(options.width),
    height: String(options.height),
    viewBox: `0 0 ${options.width} ${options.height}`,
  }, children);
}

/** Legend: one entry per series, click toggles visibility. */
export function buildLegend(state: ViewState): VNode {
  const entries = state.doc.series.map((s, i) => {
    const visible = state.visible.has(s.series_id);
    return h("li", {
      class: visible ? "legend-entry" : "legend-entry hidden-series",
      "data-series": s.series_id,
    }, [
      h("span", { class: "swatch", "data-dash": SERIES_DASHES[i % SERIES_DASHES.length] }),
      h("span", { class: "legend-label" }, [], s.label || s.series_id),
    ]);
  });
  return h("ul", { class: "legend" }, entries);
}

function isoTimestamp(ms: number): string {
  return new Date(ms).toISOString().replace(/\.\d{3}Z$/, "Z");
}

/** Annotation side panel for the selected checkpoint (empty node if none). */
export function buildPanel(state: ViewState): VNode {
  if (state.selected === null) {
    return h("aside", { class: "panel closed" });
  }
  const cp = state.doc.checkpoints[state.selected];
  const children: VNode[] = [
    h("h2", {}, [], `Checkpoint ${cp.index} — ${cp.series_id}`),
    h("p", { class: "panel-meta" }, [],
      `${isoTimestamp(cp.timestamp)} · ${cp.record_count} records`),
  ];
  if (cp.annotations.length > 0) {
    children.push(h("section", { class: "annotations" },
      cp.annotations.map((a) => h("p", { class: "annotation" }, [], a))));
  }
  children.push(h("ul", { class: "templates" },
    cp.template_texts.map((t) => h("li", { class: "template" }, [], t))));
  return h("aside", { class: "panel open" }, children);
}

/** Projection quality readout for the active embedding. */
export function buildQuality(state: ViewState): VNode {
  const emb = activeEmbedding(state);
  return h("span", { class: "quality" }, [],
    `alpha ${emb.alpha} · stress ${emb.stress.toFixed(4)} · R² ${emb.r_squared.toFixed(4)}`);
}
