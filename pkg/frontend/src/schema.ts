/** Validation of untrusted JSON against the Curve Document schema. */

import { CurveDocument, DOCUMENT_VERSION } from "./types.js";

export type ValidationResult =
  | { ok: true; doc: CurveDocument }
  | { ok: false; errors: string[] };

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

export function validateDocument(raw: unknown): ValidationResult {
  const errors: string[] = [];
  if (!isObject(raw)) {
    return { ok: false, errors: ["document root must be an object"] };
  }
  if (raw.version !== DOCUMENT_VERSION) {
    errors.push(`unsupported document version: ${JSON.stringify(raw.version)}`);
  }
  const series = raw.series;
  if (!Array.isArray(series)) {
    errors.push("missing or invalid 'series'");
  } else {
    const seen = new Set<string>();
    series.forEach((s, i) => {
      if (!isObject(s) || typeof s.series_id !== "string" || typeof s.label !== "string") {
        errors.push(`series[${i}] malformed`);
        return;
      }
      if (seen.has(s.series_id)) errors.push(`duplicate series_id ${s.series_id}`);
      seen.add(s.series_id);
    });
  }
  const ids = new Set(
    Array.isArray(series)
      ? series.filter(isObject).map((s) => s.series_id as string)
      : [],
  );

  const checkpoints = raw.checkpoints;
  if (!Array.isArray(checkpoints) || checkpoints.length === 0) {
    errors.push("document must contain at least one checkpoint");
  } else {
    const lastTs = new Map<string, number>();
    checkpoints.forEach((c, i) => {
      if (!isObject(c)) {
        errors.push(`checkpoints[${i}] malformed`);
        return;
      }
      if (typeof c.series_id !== "string" || !ids.has(c.series_id)) {
        errors.push(`checkpoints[${i}] references unknown series`);
      }
      if (!isFiniteNumber(c.timestamp) || !isFiniteNumber(c.record_count)) {
        errors.push(`checkpoints[${i}] needs numeric timestamp and record_count`);
      }
      if (!Array.isArray(c.template_texts) || c.template_texts.length === 0) {
        errors.push(`checkpoints[${i}] needs template_texts`);
      }
      if (!Array.isArray(c.annotations)) {
        errors.push(`checkpoints[${i}] needs annotations`);
      }
      const sid = String(c.series_id);
      const prev = lastTs.get(sid);
      const ts = Number(c.timestamp);
      if (prev !== undefined && ts < prev) {
        errors.push(`checkpoints[${i}] out of chronological order`);
      }
      lastTs.set(sid, ts);
    });
  }

  const embeddings = raw.embeddings;
  if (!Array.isArray(embeddings) || embeddings.length === 0) {
    errors.push("document needs at least one embedding");
  } else {
    const n = Array.isArray(checkpoints) ? checkpoints.length : 0;
    embeddings.forEach((e, i) => {
      if (!isObject(e) || !isFiniteNumber(e.alpha) || !Array.isArray(e.points)) {
        errors.push(`embeddings[${i}] malformed`);
        return;
      }
      if (e.points.length !== n) {
        errors.push(`embeddings[${i}] must have one point per checkpoint`);
      }
      for (const p of e.points) {
        if (!Array.isArray(p) || p.length !== 2 || !isFiniteNumber(p[0]) || !isFiniteNumber(p[1])) {
          errors.push(`embeddings[${i}] contains a non-finite point`);
          break;
        }
      }
      if (!isFiniteNumber(e.stress) || !isFiniteNumber(e.r_squared)) {
        errors.push(`embeddings[${i}] needs finite stress and r_squared`);
      }
    });
  }

  if (!isObject(raw.meta) || typeof (raw.meta as Record<string, unknown>).created_at !== "string") {
    errors.push("missing or invalid 'meta'");
  }

  if (errors.length > 0) {
    return { ok: false, errors };
  }
  return { ok: true, doc: raw as unknown as CurveDocument };
}

export function parseDocument(text: string): ValidationResult {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    return { ok: false, errors: [`not valid JSON: ${String(exc)}`] };
  }
  return validateDocument(raw);
}
