"""Portable Curve Document and static SVG rendering.

The document is canonical JSON: fixed key order, UTF-8, floats at 17
significant digits, so identical pipelines produce identical bytes and
golden-file tests work across consumers. The SVG renderer draws one smooth
path per series through the embedded points, colors time with the shared
purple-to-green gradient, and sizes points by record count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DOCUMENT_VERSION = 1

# Shared time gradient (start of observation -> end of observation).
# The viewer must use the same anchors; see docs/schema.md.
TIME_GRADIENT_START = "#7a1fa2"
TIME_GRADIENT_END = "#2e9e4f"

SERIES_DASHES = ["", "7 4", "2 4", "9 3 2 3"]


class SchemaError(ValueError):
    """Document violates the Curve Document schema."""


@dataclass
class SeriesInfo:
    series_id: str
    label: str
    color_hint: str = ""


@dataclass
class DocCheckpoint:
    index: int
    series_id: str
    timestamp: int
    record_count: int
    template_texts: list[str]
    annotations: list[str] = field(default_factory=list)


@dataclass
class DocEmbedding:
    alpha: float
    points: list[list[float]]
    stress: float
    r_squared: float


@dataclass
class DocMeta:
    created_at: str
    config: dict
    sources: list[str]


@dataclass
class CurveDocument:
    version: int
    series: list[SeriesInfo]
    checkpoints: list[DocCheckpoint]
    embeddings: list[DocEmbedding]
    meta: DocMeta

    def validate(self) -> None:
        if self.version != DOCUMENT_VERSION:
            raise SchemaError(f"unsupported document version: {self.version!r}")
        if not self.checkpoints:
            raise SchemaError("document must contain at least one checkpoint")
        series_ids = {s.series_id for s in self.series}
        if len(series_ids) != len(self.series):
            raise SchemaError("duplicate series_id")
        last_ts: dict[str, int] = {}
        for cp in self.checkpoints:
            if cp.series_id not in series_ids:
                raise SchemaError(f"checkpoint references unknown series {cp.series_id!r}")
            if not cp.template_texts:
                raise SchemaError("checkpoint without template texts")
            if cp.record_count < 1:
                raise SchemaError("checkpoint record_count must be >= 1")
            prev = last_ts.get(cp.series_id)
            if prev is not None and cp.timestamp < prev:
                raise SchemaError("checkpoints within a series must be chronological")
            last_ts[cp.series_id] = cp.timestamp
        for emb in self.embeddings:
            if len(emb.points) != len(self.checkpoints):
                raise SchemaError("embedding must have exactly one point per checkpoint")
            for p in emb.points:
                if len(p) != 2 or not all(math.isfinite(v) for v in p):
                    raise SchemaError("embedding points must be finite 2-D coordinates")
            if not (math.isfinite(emb.stress) and math.isfinite(emb.r_squared)):
                raise SchemaError("embedding quality values must be finite")

    def embedding_for(self, alpha: float) -> DocEmbedding:
        for emb in self.embeddings:
            if emb.alpha == alpha:
                return emb
        raise KeyError(f"no embedding for alpha={alpha}")

    def checkpoints_of(self, series_id: str) -> list[DocCheckpoint]:
        return [cp for cp in self.checkpoints if cp.series_id == series_id]


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise SchemaError("cannot serialize non-finite number")
    return format(v, ".17g")


def _emit(value) -> str:
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(json.dumps(str(k), ensure_ascii=False) + ":" + _emit(v)
                              for k, v in value.items()) + "}"
    if value is None:
        return "null"
    raise SchemaError(f"cannot serialize {type(value).__name__}")


def serialize(doc: CurveDocument) -> bytes:
    """Canonical JSON bytes; round-trips through deserialize unchanged."""
    doc.validate()
    payload = {
        "version": doc.version,
        "series": [
            {"series_id": s.series_id, "label": s.label, "color_hint": s.color_hint}
            for s in doc.series
        ],
        "checkpoints": [
            {
                "index": cp.index,
                "series_id": cp.series_id,
                "timestamp": cp.timestamp,
                "record_count": cp.record_count,
                "template_texts": list(cp.template_texts),
                "annotations": list(cp.annotations),
            }
            for cp in doc.checkpoints
        ],
        "embeddings": [
            {
                "alpha": float(emb.alpha),
                "points": [[float(x), float(y)] for x, y in emb.points],
                "stress": float(emb.stress),
                "r_squared": float(emb.r_squared),
            }
            for emb in doc.embeddings
        ],
        "meta": {
            "created_at": doc.meta.created_at,
            "config": dict(sorted(doc.meta.config.items())),
            "sources": list(doc.meta.sources),
        },
    }
    return _emit(payload).encode("utf-8")


def _require(mapping: dict, key: str, kind, ctx: str):
    if key not in mapping:
        raise SchemaError(f"missing field {key!r} in {ctx}")
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"field {key!r} in {ctx} has wrong type")
    return value


def deserialize(data: bytes | str) -> CurveDocument:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("document root must be an object")
    version = _require(raw, "version", int, "document")
    series = [
        SeriesInfo(_require(s, "series_id", str, "series"),
                   _require(s, "label", str, "series"),
                   _require(s, "color_hint", str, "series"))
        for s in _require(raw, "series", list, "document")
    ]
    checkpoints = [
        DocCheckpoint(
            _require(c, "index", int, "checkpoint"),
            _require(c, "series_id", str, "checkpoint"),
            _require(c, "timestamp", int, "checkpoint"),
            _require(c, "record_count", int, "checkpoint"),
            [str(t) for t in _require(c, "template_texts", list, "checkpoint")],
            [str(a) for a in _require(c, "annotations", list, "checkpoint")],
        )
        for c in _require(raw, "checkpoints", list, "document")
    ]
    embeddings = [
        DocEmbedding(
            _require(e, "alpha", float, "embedding"),
            [[float(x), float(y)] for x, y in _require(e, "points", list, "embedding")],
            _require(e, "stress", float, "embedding"),
            _require(e, "r_squared", float, "embedding"),
        )
        for e in _require(raw, "embeddings", list, "document")
    ]
    meta_raw = _require(raw, "meta", dict, "document")
    meta = DocMeta(_require(meta_raw, "created_at", str, "meta"),
                   _require(meta_raw, "config", dict, "meta"),
                   [str(s) for s in _require(meta_raw, "sources", list, "meta")])
    doc = CurveDocument(version, series, checkpoints, embeddings, meta)
    doc.validate()
    return doc


@dataclass
class CurveStyle:
    width: float = 900.0
    height: float = 600.0
    point_radius: float = 3.0
    curve_tension: float = 0.5
    show_labels: bool = False

    def __post_init__(self):
        if not 0.0 <= self.curve_tension <= 1.0:
            raise ValueError("curve_tension must be in [0, 1]")


def time_color(fraction: float) -> str:
    """Interpolate the shared purple-to-green gradient at a [0, 1] position."""
    fraction = min(1.0, max(0.0, fraction))
    start = _hex_rgb(TIME_GRADIENT_START)
    end = _hex_rgb(TIME_GRADIENT_END)
    rgb = tuple(round(s + (e - s) * fraction) for s, e in zip(start, end))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _hex_rgb(color: str) -> tuple[int, int, int]:
    return tuple(int(color[i : i + 2], 16) for i in (1, 3, 5))


def time_fraction(ts: int, t_min: int, t_max: int) -> float:
    """Position of a timestamp inside the observation window."""
    if t_max == t_min:
        return 0.5
    return (ts - t_min) / (t_max - t_min)


def smooth_path(points: Sequence[Sequence[float]], tension: float = 0.5,
                ) -> list[tuple[tuple[float, float], ...]]:
    """Catmull-Rom spline through the points as cubic Bezier segments.

    Returned segments are (p0, c1, c2, p1) tuples. Endpoints are clamped by
    repeating the first and last point; tension 0.5 is the classic spline,
    tension 0 collapses control points onto the polyline.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    k = 2.0 * tension
    segments = []
    ext = [pts[0]] + pts + [pts[-1]]
    for i in range(len(pts) - 1):
        p0, p1, p2, p3 = ext[i], ext[i + 1], ext[i + 2], ext[i + 3]
        c1 = (p1[0] + (p2[0] - p0[0]) / 6.0 * k, p1[1] + (p2[1] - p0[1]) / 6.0 * k)
        c2 = (p2[0] - (p3[0] - p1[0]) / 6.0 * k, p2[1] - (p3[1] - p1[1]) / 6.0 * k)
        segments.append((p1, c1, c2, p2))
    return segments


def fit_viewport(points: Sequence[Sequence[float]], width: float, height: float,
                 margin_fraction: float = 0.05) -> "callable":
    """Map embedding coordinates into SVG pixel space with a 5% margin."""
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    usable_w = width * (1.0 - 2.0 * margin_fraction)
    usable_h = height * (1.0 - 2.0 * margin_fraction)
    extent = max(x1 - x0, y1 - y0)
    scale = 1.0 if extent == 0.0 else min(usable_w, usable_h) / extent
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0

    def to_pixel(p) -> tuple[float, float]:
        # flip y: SVG grows downward
        return (width / 2.0 + (float(p[0]) - cx) * scale,
                height / 2.0 - (float(p[1]) - cy) * scale)

    return to_pixel


def _f(v: float) -> str:
    return f"{v:.4f}"


def _path_d(segments) -> str:
    start = segments[0][0]
    parts = [f"M {_f(start[0])} {_f(start[1])}"]
    for (_, c1, c2, p1) in segments:
        parts.append(f"C {_f(c1[0])} {_f(c1[1])}, {_f(c2[0])} {_f(c2[1])}, {_f(p1[0])} {_f(p1[1])}")
    return " ".join(parts)


def point_radius_for(record_count: int, base: float) -> float:
    return base * (1.0 + math.log(record_count + 1) / 3.0)


def render_svg(doc: CurveDocument, alpha: float, style: CurveStyle | None = None) -> str:
    """Deterministic standalone SVG for one embedding of the document."""
    style = style or CurveStyle()
    emb = doc.embedding_for(alpha)
    to_px = fit_viewport(emb.points, style.width, style.height)
    ts_all = [cp.timestamp for cp in doc.checkpoints]
    t_min, t_max = min(ts_all), max(ts_all)

    defs: list[str] = []
    body: list[str] = []
    point_xml: list[str] = []
    label_xml: list[str] = []
    positions: dict[str, list[int]] = {}
    for k, cp in enumerate(doc.checkpoints):
        positions.setdefault(cp.series_id, []).append(k)

    for s_idx, series in enumerate(doc.series):
        rows = positions.get(series.series_id, [])
        if not rows:
            continue
        cps = [doc.checkpoints[k] for k in rows]
        px = [to_px(emb.points[k]) for k in rows]
        fracs = [time_fraction(cp.timestamp, t_min, t_max) for cp in cps]
        grad_id = f"tg{s_idx}"
        if len(px) >= 2:
            x1, y1 = px[0]
            x2, y2 = px[-1]
            if x1 == x2 and y1 == y2:
                x2 = x1 + 1.0  # closed loop: give the gradient a direction
            lo, hi = fracs[0], fracs[-1]
            stops = []
            for frac in fracs:
                offset = 0.0 if hi == lo else (frac - lo) / (hi - lo)
                stops.append(f'<stop offset="{_f(min(1.0, max(0.0, offset)))}" '
                             f'stop-color="{time_color(frac)}"/>')
            defs.append(
                f'<linearGradient id="{grad_id}" gradientUnits="userSpaceOnUse" '
                f'x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}">'
                + "".join(stops) + "</linearGradient>")
            dash = SERIES_DASHES[s_idx % len(SERIES_DASHES)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            d = _path_d(smooth_path(px, style.curve_tension))
            body.append(f'<path d="{d}" fill="none" stroke="url(#{grad_id})" '
                        f'stroke-width="1.5"{dash_attr}/>')
        for cp, (x, y), frac in zip(cps, px, fracs):
            r = point_radius_for(cp.record_count, style.point_radius)
            point_xml.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" '
                             f'fill="{time_color(frac)}"/>')
            if style.show_labels:
                label_xml.append(f'<text x="{_f(x + r + 2)}" y="{_f(y - r - 2)}" '
                                 f'font-size="9" fill="#444">{cp.index}</text>')

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(style.width)}" '
        f'height="{_f(style.height)}" viewBox="0 0 {_f(style.width)} {_f(style.height)}">',
        "<defs>" + "".join(defs) + "</defs>",
        '<rect width="100%" height="100%" fill="white"/>',
        *body,
        *point_xml,
        *label_xml,
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
