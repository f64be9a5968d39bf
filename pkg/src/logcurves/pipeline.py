"""End-to-end pipeline: log files in, Curve Document out.

Each stage is timed from inside the pipeline so the benchmark command can
report the same per-stage breakdown the analyze command prints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import events as events_mod
from . import ingest as ingest_mod
from .curvedoc import (CurveDocument, DocCheckpoint, DocEmbedding, DocMeta,
                       SeriesInfo)
from .distance import DistanceConfig, Semimetric
from .events import EventConfig, geometric_window
from .projection import BlendConfig, JointResult, embed_blends
from .templates import ClusterConfig, TemplateTree, checkpoints_from_events, unify_universes

STAGES = ("ingest", "events", "templates", "distance", "projection", "document")


@dataclass
class PipelineConfig:
    # ingest
    base_year: Optional[int] = None
    extra_timestamp_patterns: list = field(default_factory=list)
    extra_severity_keywords: dict = field(default_factory=dict)
    # events
    target_points: int = 60
    k_gaps: int = 10
    window_length: int = 8
    window_decay: float = 2.0
    severity_threshold: float = 32.0
    # templates
    tree_depth: int = 4
    similarity_threshold: float = 0.4
    max_children: int = 100
    max_template_len: int = 500
    # distance
    w_ins: float = 1.0
    w_del: float = 1.0
    w_sub: float = 1.0
    string_metric: str = "levenshtein"
    # projection
    alphas: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5])
    mds_tol: float = 1e-6
    mds_max_iter: int = 300
    seed: int = 0
    threads: int = 1

    def ingest_config(self) -> ingest_mod.IngestConfig:
        kwargs = {}
        if self.base_year is not None:
            kwargs["base_year"] = self.base_year
        return ingest_mod.IngestConfig(
            extra_timestamp_patterns=list(self.extra_timestamp_patterns),
            extra_severity_keywords=dict(self.extra_severity_keywords), **kwargs)

    def event_config(self) -> EventConfig:
        return EventConfig(self.target_points, self.k_gaps,
                           geometric_window(self.window_length, self.window_decay),
                           self.severity_threshold)

    def cluster_config(self) -> ClusterConfig:
        return ClusterConfig(self.tree_depth, self.similarity_threshold,
                             self.max_children, self.max_template_len,
                             ingest=self.ingest_config())

    def distance_config(self) -> DistanceConfig:
        return DistanceConfig(self.w_ins, self.w_del, self.w_sub, self.string_metric)

    def blend_config(self) -> BlendConfig:
        return BlendConfig(list(self.alphas))

    def snapshot(self) -> dict:
        snap = {
            "target_points": self.target_points,
            "k_gaps": self.k_gaps,
            "window_length": self.window_length,
            "window_decay": self.window_decay,
            "severity_threshold": self.severity_threshold,
            "tree_depth": self.tree_depth,
            "similarity_threshold": self.similarity_threshold,
            "max_children": self.max_children,
            "max_template_len": self.max_template_len,
            "w_ins": self.w_ins,
            "w_del": self.w_del,
            "w_sub": self.w_sub,
            "string_metric": self.string_metric,
            "alphas": list(self.alphas),
            "mds_tol": self.mds_tol,
            "mds_max_iter": self.mds_max_iter,
            "seed": self.seed,
        }
        if self.base_year is not None:
            snap["base_year"] = self.base_year
        return snap


@dataclass
class SeriesSpec:
    series_id: str
    label: str
    paths: list[Path]


@dataclass
class RunStats:
    records: int
    events: int
    templates: int
    checkpoints: int
    quality: list[tuple[float, float, float]]  # (alpha, stress, r_squared)
    timings: dict[str, float]

    @property
    def total_seconds(self) -> float:
        return sum(self.timings.values())


@dataclass
class PipelineResult:
    document: CurveDocument
    joint: JointResult
    stats: RunStats
    templates: list = field(default_factory=list)  # unified Template objects


def run_pipeline(series: Sequence[SeriesSpec], config: Optional[PipelineConfig] = None,
                 ) -> PipelineResult:
    """Ingest, segment, template, measure and project one or more series."""
    config = config or PipelineConfig()
    timings = dict.fromkeys(STAGES, 0.0)
    icfg = config.ingest_config()
    ecfg = config.event_config()
    ccfg = config.cluster_config()

    per_series = []
    n_records = n_events = 0
    for spec in series:
        t0 = time.perf_counter()
        result = ingest_mod.ingest_files(spec.paths, icfg)
        t1 = time.perf_counter()
        evs = events_mod.segment(result.records, ecfg)
        t2 = time.perf_counter()
        tree = TemplateTree(ccfg)
        cps = checkpoints_from_events(evs, result.records, tree, spec.series_id)
        t3 = time.perf_counter()
        timings["ingest"] += t1 - t0
        timings["events"] += t2 - t1
        timings["templates"] += t3 - t2
        n_records += len(result.records)
        n_events += len(evs)
        per_series.append((cps, tree.templates))

    t0 = time.perf_counter()
    remapped, universe = unify_universes(per_series)
    texts = [t.text for t in universe]
    checkpoints = [cp for group in remapped for cp in group]
    tags = [cp.series_id for cp in checkpoints]
    sem = Semimetric(texts, config.distance_config()).matrix(checkpoints,
                                                             threads=config.threads)
    t1 = time.perf_counter()
    timestamps = [cp.timestamp for cp in checkpoints]
    embeddings = embed_blends(sem, timestamps, config.blend_config(),
                              max_iter=config.mds_max_iter, tol=config.mds_tol,
                              seed=config.seed)
    joint = JointResult(checkpoints, tags, sem, embeddings)
    t2 = time.perf_counter()
    timings["distance"] = t1 - t0
    timings["projection"] = t2 - t1

    t2 = time.perf_counter()
    doc = build_document(series, joint, texts, config)
    timings["document"] = time.perf_counter() - t2

    stats = RunStats(n_records, n_events, len(universe), len(joint.checkpoints),
                     [(e.alpha, e.stress, e.r_squared) for e in joint.embeddings],
                     timings)
    return PipelineResult(doc, joint, stats, universe)


def build_document(series: Sequence[SeriesSpec], joint: JointResult,
                   universe_texts: Sequence[str], config: PipelineConfig) -> CurveDocument:
    checkpoints = [
        DocCheckpoint(cp.index, cp.series_id, cp.timestamp, cp.record_count,
                      [universe_texts[i] for i in sorted(cp.template_ids)])
        for cp in joint.checkpoints
    ]
    embeddings = [
        DocEmbedding(e.alpha, [[float(x), float(y)] for x, y in e.points],
                     float(e.stress), float(e.r_squared))
        for e in joint.embeddings
    ]
    # deterministic documents: stamp with the end of the observed data,
    # not the wall clock
    latest = max(cp.timestamp for cp in joint.checkpoints)
    created = datetime.fromtimestamp(latest / 1000, tz=timezone.utc)
    meta = DocMeta(created.strftime("%Y-%m-%dT%H:%M:%S.") + f"{latest % 1000:03d}Z",
                   config.snapshot(),
                   [str(p) for spec in series for p in spec.paths])
    doc = CurveDocument(
        1,
        [SeriesInfo(s.series_id, s.label) for s in series],
        checkpoints, embeddings, meta)
    doc.validate()
    return doc
