/** Curve Document wire types (version 1). */

export interface SeriesInfo {
  series_id: string;
  label: string;
  color_hint: string;
}

export interface DocCheckpoint {
  index: number;
  series_id: string;
  timestamp: number; // epoch milliseconds, UTC
  record_count: number;
  template_texts: string[];
  annotations: string[];
}

export interface DocEmbedding {
  alpha: number;
  points: [number, number][];
  stress: number;
  r_squared: number;
}

export interface DocMeta {
  created_at: string;
  config: Record<string, unknown>;
  sources: string[];
}

export interface CurveDocument {
  version: number;
  series: SeriesInfo[];
  checkpoints: DocCheckpoint[];
  embeddings: DocEmbedding[];
  meta: DocMeta;
}

export const DOCUMENT_VERSION = 1;
