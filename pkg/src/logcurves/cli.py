"""Command-line entry point.

Subcommands: analyze (logs -> Curve Document, optional SVG), overlay (two or
more log collections in one shared frame), render (document -> SVG), enrich
(attach LLM summaries as annotations), bench (per-stage runtime/throughput
table). Settings merge defaults < config file < flags.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import fields
from pathlib import Path

from . import curvedoc, enrich as enrich_mod
from .ingest import EmptyInput, make_strftime_pattern
from .pipeline import STAGES, PipelineConfig, SeriesSpec, run_pipeline
from .synth import throughput_log


class ConfigError(ValueError):
    """Invalid flags, config file, or input paths."""


_NUMERIC_KEYS = {
    "target_points": int, "k_gaps": int, "window_length": int,
    "window_decay": float, "severity_threshold": float, "tree_depth": int,
    "similarity_threshold": float, "max_children": int, "max_template_len": int,
    "w_ins": float, "w_del": float, "w_sub": float, "mds_tol": float,
    "mds_max_iter": int, "seed": int, "threads": int, "base_year": int,
}


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline settings")
    g.add_argument("--target-points", type=int, help="desired checkpoint count (default 60)")
    g.add_argument("--k-gaps", type=int, help="number of largest time gaps that split events (default 10)")
    g.add_argument("--window-length", type=int, help="severity smoothing window length (default 8)")
    g.add_argument("--window-decay", type=float, help="severity window decay factor (default 2.0)")
    g.add_argument("--severity-threshold", type=float, help="smoothed severity change threshold (default 32.0)")
    g.add_argument("--tree-depth", type=int, help="template parse tree depth (default 4)")
    g.add_argument("--similarity-threshold", type=float, help="template merge similarity in (0,1] (default 0.4)")
    g.add_argument("--max-children", type=int, help="max children per parse tree node (default 100)")
    g.add_argument("--max-template-len", type=int, help="template text truncation length (default 500)")
    g.add_argument("--w-ins", type=float, help="insertion weight for the edit distance (default 1.0)")
    g.add_argument("--w-del", type=float, help="deletion weight for the edit distance (default 1.0)")
    g.add_argument("--w-sub", type=float, help="substitution weight for the edit distance (default 1.0)")
    g.add_argument("--string-metric", choices=["levenshtein", "qgram"],
                   help="template string metric (default levenshtein)")
    g.add_argument("--alpha", type=float, action="append", dest="alphas", metavar="A",
                   help="time blend preset in [0,1]; repeatable (default 0.0 0.25 0.5)")
    g.add_argument("--mds-tol", type=float, help="SMACOF relative stress tolerance (default 1e-6)")
    g.add_argument("--mds-max-iter", type=int, help="SMACOF iteration cap (default 300)")
    g.add_argument("--seed", type=int, help="random seed for the projection (default 0)")
    g.add_argument("--threads", type=int, help="worker cap for the distance matrix (default 1)")
    g.add_argument("--base-year", type=int, help="year assumed for year-less timestamps (default: current)")
    g.add_argument("--extra-timestamp-pattern", action="append", default=None,
                   metavar="ID=REGEX=STRFTIME", dest="extra_timestamp_patterns",
                   help="additional timestamp recognizer; repeatable")
    g.add_argument("--extra-severity-keyword", action="append", default=None,
                   metavar="WORD=LEVEL", dest="extra_severity_keywords",
                   help="additional severity keyword mapping; repeatable")
    g.add_argument("--config", type=Path, help="flat key=value config file (keys match flag names)")
    g.add_argument("--offline", action="store_true",
                   help="refuse network access (analysis never uses the network; enrich fails fast)")
    s = p.add_argument_group("output settings")
    s.add_argument("--output", "-o", type=Path, help="output path (default: derived from input)")
    s.add_argument("--format", choices=["json", "svg", "both"], default=None,
                   help="what analyze/overlay write (default json)")
    s.add_argument("--dump-templates", type=Path, metavar="PATH",
                   help="also write extracted templates as id<TAB>count<TAB>text")
    s.add_argument("--dump-matrix", type=Path, metavar="PATH",
                   help="also write the checkpoint distance matrix as CSV")
    s.add_argument("--svg-width", type=float, default=900.0, help="SVG width (default 900)")
    s.add_argument("--svg-height", type=float, default=600.0, help="SVG height (default 600)")
    s.add_argument("--curve-tension", type=float, default=0.5, help="spline tension in [0,1] (default 0.5)")
    s.add_argument("--point-radius", type=float, default=3.0, help="base point radius (default 3)")
    s.add_argument("--show-labels", action="store_true", help="label points with checkpoint indices")


def _parse_config_file(path: Path) -> dict:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for ln, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _build_pipeline_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    file_values = _parse_config_file(args.config) if getattr(args, "config", None) else {}
    valid = {f.name for f in fields(PipelineConfig)}

    for key, raw in file_values.items():
        if key == "alpha" or key == "alphas":
            try:
                cfg.alphas = [float(v) for v in raw.replace(",", " ").split()]
            except ValueError as exc:
                raise ConfigError(f"config key alphas: {exc}") from exc
            continue
        if key not in valid:
            raise ConfigError(f"unknown config key: {key}")
        if key == "string_metric":
            cfg.string_metric = raw
            continue
        conv = _NUMERIC_KEYS.get(key)
        if conv is None:
            raise ConfigError(f"config key {key} cannot be set from a file")
        try:
            setattr(cfg, key, conv(raw))
        except ValueError as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc

    for key in _NUMERIC_KEYS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            setattr(cfg, key, flag_val)
    if getattr(args, "string_metric", None):
        cfg.string_metric = args.string_metric
    if getattr(args, "alphas", None):
        cfg.alphas = args.alphas

    for spec in getattr(args, "extra_timestamp_patterns", None) or []:
        parts = spec.split("=", 2)
        if len(parts) != 3:
            raise ConfigError(f"--extra-timestamp-pattern needs ID=REGEX=STRFTIME, got {spec!r}")
        cfg.extra_timestamp_patterns.append(make_strftime_pattern(*parts))
    for spec in getattr(args, "extra_severity_keywords", None) or []:
        word, _, level = spec.partition("=")
        try:
            cfg.extra_severity_keywords[word] = int(level)
        except ValueError as exc:
            raise ConfigError(f"--extra-severity-keyword needs WORD=LEVEL, got {spec!r}") from exc

    try:
        cfg.event_config()
        cfg.cluster_config()
        cfg.distance_config()
        cfg.blend_config()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return cfg


def _style(args) -> curvedoc.CurveStyle:
    try:
        return curvedoc.CurveStyle(args.svg_width, args.svg_height,
                                   args.point_radius, args.curve_tension,
                                   args.show_labels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _check_inputs(paths) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        if not p.is_file():
            raise ConfigError(f"input file not readable: {p}")
        out.append(p)
    return out


def _print_summary(stats) -> None:
    print(f"records:     {stats.records}")
    print(f"events:      {stats.events}")
    print(f"templates:   {stats.templates}")
    for alpha, stress, r2 in stats.quality:
        print(f"alpha {alpha:<5g} stress {stress:.6f}  R^2 {r2:.6f}")
    for stage, seconds in stats.timings.items():
        print(f"stage {stage:<11s} {seconds:8.3f} s")
    print(f"total        {stats.total_seconds:8.3f} s")


def _write_dumps(result, args) -> None:
    if getattr(args, "dump_templates", None):
        from .templates import dump_templates
        args.dump_templates.write_text(dump_templates(result.templates), encoding="utf-8")
        print(f"wrote {args.dump_templates}")
    if getattr(args, "dump_matrix", None):
        args.dump_matrix.write_text(result.joint.semantic.to_csv(), encoding="utf-8")
        print(f"wrote {args.dump_matrix}")


def _write_outputs(doc, args, default_stem: Path) -> None:
    fmt = args.format or "json"
    out = args.output or default_stem.with_suffix(".curve.json")
    style = _style(args)
    if fmt in ("json", "both"):
        data = curvedoc.serialize(doc)
        Path(out).write_bytes(data)
        print(f"wrote {out}")
    if fmt in ("svg", "both"):
        for emb in doc.embeddings:
            svg_path = Path(str(out).removesuffix(".curve.json") + f".alpha{emb.alpha:g}.svg")
            svg_path.write_text(curvedoc.render_svg(doc, emb.alpha, style), encoding="utf-8")
            print(f"wrote {svg_path}")


def cmd_analyze(args) -> int:
    paths = _check_inputs(args.inputs)
    cfg = _build_pipeline_config(args)
    series = [SeriesSpec("s0", args.label[0] if args.label else "series", paths)]
    result = run_pipeline(series, cfg)
    _print_summary(result.stats)
    _write_outputs(result.document, args, paths[0])
    _write_dumps(result, args)
    return 0


def cmd_overlay(args) -> int:
    if len(args.groups) < 2:
        raise ConfigError("overlay needs at least two input groups (use analyze for one)")
    cfg = _build_pipeline_config(args)
    series = []
    labels = args.label or []
    for k, group in enumerate(args.groups):
        paths = _check_inputs(group.split(","))
        label = labels[k] if k < len(labels) else f"series {k}"
        series.append(SeriesSpec(f"s{k}", label, paths))
    result = run_pipeline(series, cfg)
    _print_summary(result.stats)
    _write_outputs(result.document, args, Path(series[0].paths[0]))
    _write_dumps(result, args)
    return 0


def cmd_render(args) -> int:
    doc = _load_document(args.document)
    alphas = args.alphas or [emb.alpha for emb in doc.embeddings]
    style = _style(args)
    out_base = args.output or args.document
    for alpha in alphas:
        try:
            svg = curvedoc.render_svg(doc, alpha, style)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        path = Path(str(out_base).removesuffix(".curve.json").removesuffix(".svg")
                    + f".alpha{alpha:g}.svg")
        path.write_text(svg, encoding="utf-8")
        print(f"wrote {path}")
    return 0


def _load_document(path) -> curvedoc.CurveDocument:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"document not readable: {path}")
    try:
        return curvedoc.deserialize(path.read_bytes())
    except curvedoc.SchemaError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_enrich(args) -> int:
    doc = _load_document(args.document)
    kind = "pairwise" if args.pair is not None else "single"
    indices = (args.checkpoint, args.pair) if args.pair is not None else (args.checkpoint,)
    try:
        request = enrich_mod.EnrichRequest(kind, indices, max_templates=args.max_templates)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    provider = enrich_mod.ProviderConfig(
        endpoint=args.endpoint, model=args.model, auth_env=args.auth_env,
        timeout=args.timeout, max_retries=args.max_retries, offline=args.offline)
    if args.dry_run:
        print(enrich_mod.build_prompt(request, doc))
        return 0
    text = enrich_mod.enrich(request, provider, doc)
    out = args.output or args.document
    Path(out).write_bytes(curvedoc.serialize(doc))
    print(f"annotated checkpoint(s) {indices}; wrote {out}")
    print(text)
    return 0


def cmd_bench(args) -> int:
    input_path = Path(args.input) if args.input else None
    sizes = sorted(args.sizes)
    workdir = Path(args.workdir or ".")
    workdir.mkdir(parents=True, exist_ok=True)
    if input_path is None:
        input_path = workdir / f"bench-synthetic-{max(sizes)}.log"
        if not input_path.exists():
            print(f"generating {max(sizes)} synthetic lines at {input_path}")
            throughput_log(input_path, max(sizes))
    if not input_path.is_file():
        raise ConfigError(f"input file not readable: {input_path}")
    with open(input_path, encoding="utf-8", errors="replace") as fh:
        all_lines = fh.readlines()
    if len(all_lines) < max(sizes):
        raise ConfigError(f"input has {len(all_lines)} lines, need {max(sizes)}")

    cfg = _build_pipeline_config(args)
    rows = []
    for size in sizes:
        trunc = workdir / f"bench-{size}.log"
        with open(trunc, "w", encoding="utf-8") as fh:
            fh.writelines(all_lines[:size])
        per_stage = dict.fromkeys(STAGES, 0.0)
        total = 0.0
        for _ in range(args.repeats):
            result = run_pipeline([SeriesSpec("s0", "bench", [trunc])], cfg)
            for stage, seconds in result.stats.timings.items():
                per_stage[stage] += seconds
            total += result.stats.total_seconds
        mean_total = total / args.repeats
        row = {"size": size, "repeats": args.repeats,
               **{s: per_stage[s] / args.repeats for s in STAGES},
               "total_s": mean_total, "records_per_s": size / mean_total}
        rows.append(row)
        print(f"size {size:>9d}  total {mean_total:8.3f} s  "
              f"throughput {row['records_per_s']:10.0f} rec/s")

    header = list(rows[0].keys())
    csv_lines = [",".join(header)]
    for row in rows:
        csv_lines.append(",".join(
            format(row[k], ".6f") if isinstance(row[k], float) else str(row[k])
            for k in header))
    csv_path = args.output or (workdir / "bench.csv")
    Path(csv_path).write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    print(f"wrote {csv_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logcurves",
        description="Turn raw log collections into Time Curve documents and SVG plots.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze log files into a Curve Document")
    p.add_argument("inputs", nargs="+", help="log files (one series)")
    p.add_argument("--label", action="append", help="series label")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("overlay", help="joint projection of several log collections")
    p.add_argument("groups", nargs="+",
                   help="one series per argument; comma-separate files within a series")
    p.add_argument("--label", action="append", help="series labels (repeatable)")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("render", help="render SVG from an existing Curve Document")
    p.add_argument("document", help="input .curve.json")
    p.add_argument("--alpha", type=float, action="append", dest="alphas",
                   help="alpha preset(s) to render (default: all)")
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--svg-width", type=float, default=900.0)
    p.add_argument("--svg-height", type=float, default=600.0)
    p.add_argument("--curve-tension", type=float, default=0.5)
    p.add_argument("--point-radius", type=float, default=3.0)
    p.add_argument("--show-labels", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("enrich", help="summarize checkpoints via an LLM endpoint")
    p.add_argument("document", help="input .curve.json (annotated in place unless --output)")
    p.add_argument("--checkpoint", type=int, required=True, help="checkpoint index")
    p.add_argument("--pair", type=int, help="second checkpoint for pairwise comparison")
    p.add_argument("--endpoint", required=True, help="chat-completion endpoint URL")
    p.add_argument("--model", default="gpt-4o", help="model name sent to the endpoint")
    p.add_argument("--auth-env", default="LOGCURVES_API_TOKEN",
                   help="environment variable holding the bearer token")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--max-retries", type=int, default=2)
    p.add_argument("--max-templates", type=int, default=200)
    p.add_argument("--offline", action="store_true",
                   help="refuse any network call (always fails enrich)")
    p.add_argument("--dry-run", action="store_true", help="print the prompt and exit")
    p.add_argument("--output", "-o", type=Path)
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("bench", help="per-stage runtime and throughput")
    p.add_argument("--input", help="log file to truncate per size (default: synthesize)")
    p.add_argument("--sizes", type=lambda s: [int(v) for v in s.split(",")],
                   default=[100_000, 200_000], help="comma-separated line counts")
    p.add_argument("--repeats", type=int, default=10,
                   help="runs per size, averaged (default 10)")
    p.add_argument("--workdir", help="where to put truncated inputs and CSV")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmptyInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except enrich_mod.ProviderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
