"""Map log records to masked templates and reduce events to checkpoints.

Template extraction follows the fixed-depth parse-tree clustering scheme:
records are routed by token count, then by their leading tokens (tokens with
digits take the wildcard branch), and matched against leaf clusters by
positional token equality. Variable positions degrade to the ``<*>``
wildcard as clusters absorb more records.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .events import Event
from .ingest import LEVEL_NAMES, IngestConfig, LogRecord, find_severity_token

WILDCARD = "<*>"

# Ordered masking rules. UUID must precede HEX, otherwise the hex rule eats
# the first UUID segment; NUM runs last so structured forms keep their shape.
DEFAULT_MASK_RULES: list[tuple[re.Pattern, str]] = [
    (re.compile(r"(?<!\d)(?:\d{1,3}\.){3}\d{1,3}(?!\d)"), "<IP>"),
    (re.compile(r"\b[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}\b"), "<UUID>"),
    (re.compile(r"\b(?=[0-9a-fA-F]*[a-fA-F])[0-9a-fA-F]{8,}\b"), "<HEX>"),
    (re.compile(r"(?<!\d)\d{2,}(?!\d)"), "<NUM>"),
]


@dataclass
class ClusterConfig:
    tree_depth: int = 4
    similarity_threshold: float = 0.4
    max_children: int = 100
    max_template_len: int = 500
    mask_rules: list[tuple[re.Pattern, str]] = field(default_factory=lambda: list(DEFAULT_MASK_RULES))
    ingest: Optional[IngestConfig] = None  # for severity keyword detection

    def __post_init__(self):
        if self.tree_depth < 3:
            raise ValueError("tree_depth must be >= 3")
        if not 0 < self.similarity_threshold <= 1:
            raise ValueError("similarity_threshold must be in (0, 1]")


@dataclass
class Template:
    id: int
    tokens: list[str]
    match_count: int = 1

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class Checkpoint:
    index: int
    timestamp: int
    template_ids: frozenset[int]
    record_count: int
    series_id: str = "default"


def mask(body: str, config: ClusterConfig) -> list[str]:
    """Mask variable parts of a record body and split it into tokens.

    The first severity keyword becomes a canonical per-level token (so WARN
    and WARNING unify while WARN and ERROR stay distinct), the mask rules run
    in order, and the result is truncated before splitting.
    """
    sev = find_severity_token(body, config.ingest)
    if sev is not None:
        level, (a, b) = sev
        body = body[:a] + "<" + LEVEL_NAMES[level] + ">" + body[b:]
    for rx, placeholder in config.mask_rules:
        body = rx.sub(placeholder, body)
    return body[: config.max_template_len].split()


def _has_digits(token: str) -> bool:
    return any(c.isdigit() for c in token)


class _Node:
    __slots__ = ("children", "clusters")

    def __init__(self):
        self.children: dict = {}
        self.clusters: list[Template] = []


class TemplateTree:
    """Fixed-depth parse tree; single writer during extraction."""

    def __init__(self, config: Optional[ClusterConfig] = None):
        self.config = config or ClusterConfig()
        self.root: dict[int, _Node] = {}
        self.templates: list[Template] = []

    def _descend(self, tokens: Sequence[str]) -> _Node:
        node = self.root.get(len(tokens))
        if node is None:
            node = self.root[len(tokens)] = _Node()
        internal = self.config.tree_depth - 2
        max_children = self.config.max_children
        for token in tokens[:internal]:
            children = node.children
            child = children.get(token)
            if child is not None:
                node = child
                continue
            if _has_digits(token):
                token = WILDCARD
                child = children.get(token)
                if child is not None:
                    node = child
                    continue
                node = children[token] = _Node()
                continue
            if WILDCARD in children:
                if len(children) < max_children:
                    node = children.setdefault(token, _Node())
                else:
                    node = children[WILDCARD]
            else:
                if len(children) + 1 < max_children:
                    node = children.setdefault(token, _Node())
                else:
                    node = children.setdefault(WILDCARD, _Node())
        return node

    def assign(self, tokens: Sequence[str]) -> int:
        """Assign a masked token sequence to a template, creating or merging."""
        node = self._descend(tokens)
        best, best_sim, best_params = None, -1.0, -1
        for cluster in node.clusters:
            sim, params = _seq_similarity(cluster.tokens, tokens)
            if sim > best_sim or (sim == best_sim and params > best_params):
                best, best_sim, best_params = cluster, sim, params
        if best is not None and best_sim >= self.config.similarity_threshold:
            if best_sim < 1.0:
                best.tokens = [a if a == b else WILDCARD for a, b in zip(best.tokens, tokens)]
            best.match_count += 1
            return best.id
        template = Template(len(self.templates), list(tokens))
        self.templates.append(template)
        node.clusters.append(template)
        return template.id


def _seq_similarity(template: Sequence[str], tokens: Sequence[str]) -> tuple[float, int]:
    """Positional equality ratio, plus wildcard count for tie-breaking."""
    same = params = 0
    for a, b in zip(template, tokens):
        if a == WILDCARD:
            params += 1
        elif a == b:
            same += 1
    return same / len(template), params


def assign_template(tokens: Sequence[str], tree: TemplateTree) -> int:
    return tree.assign(tokens)


def checkpoints_from_events(events: Sequence[Event], records: Sequence[LogRecord],
                            tree: TemplateTree, series_id: str = "default") -> list[Checkpoint]:
    """Assign every record a template and reduce each event to a checkpoint."""
    config = tree.config
    checkpoints = []
    for idx, ev in enumerate(events):
        ids = set()
        for rec in records[ev.begin:ev.end]:
            ids.add(tree.assign(mask(rec.body, config)))
        checkpoints.append(Checkpoint(idx, ev.start_timestamp, frozenset(ids),
                                      len(ev), series_id))
    return checkpoints


def dump_templates(templates: Sequence[Template]) -> str:
    """One template per line: id, match_count, text (tab-separated)."""
    return "".join(f"{t.id}\t{t.match_count}\t{t.text}\n" for t in templates)


def unify_universes(per_series: Sequence[tuple[list[Checkpoint], list[Template]]],
                    ) -> tuple[list[list[Checkpoint]], list[Template]]:
    """Merge per-series template id spaces by canonical template text.

    Identical template texts from different series map to one global id so
    cross-series distances see them as equal.
    """
    by_text: dict[str, Template] = {}
    unified: list[Template] = []
    remapped: list[list[Checkpoint]] = []
    for checkpoints, templates in per_series:
        mapping = {}
        for t in templates:
            hit = by_text.get(t.text)
            if hit is None:
                hit = Template(len(unified), list(t.tokens), t.match_count)
                by_text[t.text] = hit
                unified.append(hit)
            else:
                hit.match_count += t.match_count
            mapping[t.id] = hit.id
        remapped.append([
            Checkpoint(cp.index, cp.timestamp,
                       frozenset(mapping[i] for i in cp.template_ids),
                       cp.record_count, cp.series_id)
            for cp in checkpoints
        ])
    return remapped, unified
