"""Deterministic synthetic log generators.

Used by the test suite and the benchmark harness: a cyclic failure/recovery
run, a bursty stream with planted time gaps, near-identical instance groups
with one divergent member, and bulk corpora with a controlled template
budget for throughput measurements.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

_EPOCH_2024_03_01 = int(datetime(2024, 3, 1, tzinfo=timezone.utc).timestamp() * 1000)


def _iso(ms: int) -> str:
    dt = datetime.fromtimestamp(ms / 1000, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


STARTUP_BODIES = [
    "INFO Service starting, build {n}",
    "INFO Loading configuration from /etc/curve/app-{n}.conf",
    "INFO Listening on 10.0.0.8:{n}",
]
NORMAL_BODIES = [
    "INFO Processed batch {n} in {n} ms",
    "INFO Heartbeat acknowledged by peer node-{n}",
    "INFO Cache refresh finished, {n} entries",
    "INFO Request {n} served from shard {n}",
    "DEBUG Queue depth {n} within limits",
]
FAILURE_BODIES = [
    "ERROR Connection lost to node-{n}",
    "ERROR Request {n} failed: upstream timeout",
    "ERROR Replica {n} marked unreachable",
    "WARN Failover initiated for partition {n}",
]
RECOVERY_BODIES = [
    "INFO Reconnected to node-{n}",
    "INFO Rebalancing partitions, round {n}",
    "INFO State restored from snapshot {n}",
    "INFO Resuming normal processing at offset {n}",
]
SHUTDOWN_BODIES = [
    "INFO Shutdown requested by operator",
    "INFO Draining {n} in-flight requests",
    "INFO Service stopped cleanly",
]
DIVERGENT_BODIES = [
    "WARN An illegal reflective access operation has occurred",
    "ERROR Illegal access by module worker-{n}",
    "ERROR Stack inspection failed for thread {n}",
]


@dataclass
class CyclicLogInfo:
    path: Path
    line_count: int
    burst_starts_ms: list[int] = field(default_factory=list)
    failure_marker: str = "Connection lost to node"
    recovery_marker: str = "Rebalancing partitions"


def cyclic_failure_log(path: str | Path, cycles: int = 5, period_minutes: float = 12.0,
                       burst_len: int = 25, recovery_len: int = 30, seed: int = 7,
                       start_ms: int = _EPOCH_2024_03_01) -> CyclicLogInfo:
    """Failure/recovery run: bursts start exactly every `period_minutes`.

    Each cycle emits normal processing, then an ERROR burst at the period
    mark, then recovery messages; startup and shutdown frame the run.
    """
    rng = random.Random(seed)
    period_ms = int(period_minutes * 60_000)
    info = CyclicLogInfo(Path(path), 0)
    lines: list[str] = []

    def emit(ms: int, body_tpl: str):
        body = body_tpl.replace("{n}", str(rng.randint(10, 99_999)), 1)
        while "{n}" in body:
            body = body.replace("{n}", str(rng.randint(10, 99_999)), 1)
        lines.append(f"{_iso(ms)} {body}")

    t = start_ms
    for body in STARTUP_BODIES:
        emit(t, body)
        t += rng.randint(150, 400)

    for cycle in range(cycles):
        burst_at = start_ms + (cycle + 1) * period_ms
        # normal processing until just before the burst
        while t < burst_at:
            emit(t, NORMAL_BODIES[rng.randrange(len(NORMAL_BODIES))])
            t += rng.randint(2_000, 4_500)
        t = burst_at
        info.burst_starts_ms.append(t)
        for k in range(burst_len):
            emit(t, FAILURE_BODIES[k % len(FAILURE_BODIES)])
            t += rng.randint(30, 120)
        for k in range(recovery_len):
            emit(t, RECOVERY_BODIES[k % len(RECOVERY_BODIES)])
            t += rng.randint(300, 900)

    for body in SHUTDOWN_BODIES:
        emit(t, body)
        t += rng.randint(150, 400)

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    info.line_count = len(lines)
    return info


@dataclass
class BurstyLogInfo:
    path: Path
    record_count: int
    burst_start_indices: list[int] = field(default_factory=list)
    gap_boundary_indices: list[int] = field(default_factory=list)  # record index after each gap


def bursty_log(path: str | Path, records: int = 10_000, bursts: int = 5,
               period_minutes: float = 12.0, burst_len: int = 30,
               planted_gaps: int = 5, seed: int = 11,
               start_ms: int = _EPOCH_2024_03_01) -> BurstyLogInfo:
    """Stream with ERROR bursts on a fixed period plus distinct giant gaps."""
    rng = random.Random(seed)
    period_ms = int(period_minutes * 60_000)
    info = BurstyLogInfo(Path(path), records)

    burst_at = {(k + 1) * period_ms for k in range(bursts)}
    normal_span = records - bursts * burst_len
    # spread the planted gaps between bursts, away from burst boundaries
    gap_positions = {int(records * (k + 0.5) / planted_gaps) for k in range(planted_gaps)}
    gap_sizes = [300_000 + 10_000 * k for k in range(planted_gaps)]  # distinct, far above cadence

    lines: list[str] = []
    t = start_ms
    elapsed = 0
    burst_remaining = 0
    next_burst = sorted(burst_at)
    gap_iter = iter(gap_sizes)
    i = 0
    while i < records:
        if burst_remaining == 0 and next_burst and elapsed >= next_burst[0]:
            next_burst.pop(0)
            burst_remaining = burst_len
            info.burst_start_indices.append(i)
        if burst_remaining > 0:
            body = FAILURE_BODIES[burst_remaining % len(FAILURE_BODIES)]
            burst_remaining -= 1
            step = rng.randint(20, 80)
        else:
            body = NORMAL_BODIES[rng.randrange(len(NORMAL_BODIES))]
            step = rng.randint(300, 500)
        if i in gap_positions:
            step = next(gap_iter)
            info.gap_boundary_indices.append(i + 1)
        body = body.replace("{n}", str(rng.randint(10, 99_999)))
        while "{n}" in body:
            body = body.replace("{n}", str(rng.randint(10, 99_999)), 1)
        lines.append(f"{_iso(t)} {body}")
        t += step
        elapsed = t - start_ms
        i += 1

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return info


@dataclass
class InstanceGroupInfo:
    paths: list[Path]
    divergent_index: int  # which instance carries the planted error block
    divergence_start_ms: int
    divergent_marker: str = "illegal reflective access"


def instance_group(directory: str | Path, instances: int = 3, records: int = 1_500,
                   divergent_index: int = 2, seed: int = 23,
                   start_ms: int = _EPOCH_2024_03_01) -> InstanceGroupInfo:
    """Near-identical application instances; one hits a planted error block.

    Instances share the same schedule and template pool with per-instance
    variable parts; occasional rare housekeeping lines give matched
    checkpoints a small natural displacement.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    mid = records // 2
    divergence_at = start_ms + mid * 1_000
    paths = []
    rare = [
        "INFO Housekeeping task {w} finished in {n} ms",
        "INFO Compaction of segment {w} complete",
        "DEBUG Metrics flushed to collector {w}",
    ]
    words = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot"]
    for inst in range(instances):
        rng = random.Random(seed * 1000 + inst)
        lines = []
        t = start_ms
        for body in STARTUP_BODIES:
            lines.append(f"{_iso(t)} {body.replace('{n}', str(rng.randint(10, 99)))}")
            t += 200
        for i in range(records):
            if inst == divergent_index and mid <= i < mid + 25:
                body = DIVERGENT_BODIES[i % len(DIVERGENT_BODIES)]
            elif rng.random() < 0.03:
                body = rare[rng.randrange(len(rare))].replace("{w}", words[rng.randrange(len(words))])
            else:
                body = NORMAL_BODIES[rng.randrange(len(NORMAL_BODIES))]
            body = body.replace("{n}", str(rng.randint(10, 99_999)))
            while "{n}" in body:
                body = body.replace("{n}", str(rng.randint(10, 99_999)), 1)
            lines.append(f"{_iso(start_ms + 600 + i * 1_000)} {body}")
        for body in SHUTDOWN_BODIES:
            body = body.replace("{n}", str(rng.randint(10, 999)))
            lines.append(f"{_iso(start_ms + 600 + records * 1_000)} {body}")
        p = directory / f"instance{inst}.log"
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(p)
    return InstanceGroupInfo(paths, divergent_index, divergence_at)


_COMPONENTS = ["scheduler", "worker", "io", "network", "cache", "storage", "auth",
               "metrics", "planner", "executor"]
_SUFFIXES = ["primary", "replica", "edge", "core", "batch", "stream", "shadow",
             "canary", "legacy", "beta"]
_ACTIONS = [
    "completed batch {n} of {n} in {n} ms",
    "acknowledged heartbeat from 10.{o}.{o}.{o}:9042 after {n} ms",
    "flushed {n} dirty pages to segment {n}",
    "accepted connection from 192.168.{o}.{o} on port {n}",
    "retried request {n} against replica {n} with backoff {n} ms",
    "compacted level {d} into {n} chunks totalling {n} bytes",
    "evicted {n} entries, hit ratio {n} percent over window {n}",
    "scheduled job {n} on queue {d} with priority {d}",
    "validated token for session {h} in {n} us",
    "rotated log file number {n} of size {n} bytes",
]


def throughput_log(path: str | Path, lines: int, template_budget: int = 100,
                   seed: int = 31, pad_len: int = 0, error_bursts: int = 20,
                   start_ms: int = _EPOCH_2024_03_01) -> Path:
    """Bulk corpus with ~`template_budget` masked template shapes.

    Shapes pair components with action messages; variable parts (numbers,
    addresses, hex ids) vary per line and mask away. Errors come in short
    clustered bursts so the event count stays at curve scale. `pad_len`
    appends a static per-action context tail pushing line lengths past the
    template-length truncation limit.
    """
    rng = random.Random(seed)
    # digit-free component names keep them out of the wildcard branch, so
    # each (component, action) shape lands in its own leaf
    n_comp = max(1, -(-template_budget // len(_ACTIONS)))
    components = list(_COMPONENTS)
    for suffix in _SUFFIXES:
        if len(components) >= n_comp:
            break
        components += [f"{c}-{suffix}" for c in _COMPONENTS]
    shapes = [(ci, c, a, k) for ci, c in enumerate(components[:n_comp])
              for k, a in enumerate(_ACTIONS)][:template_budget]
    pads = {}
    if pad_len:
        # long static context tails on a slice of the shapes, with lengths
        # spread in steps: most of the corpus stays short, the padded tail
        # runs past the truncation limit (like real mixed corpora)
        for k in (len(_ACTIONS) - 2, len(_ACTIONS) - 1):
            for sub in range(20):
                srng = random.Random(seed + 100 * k + sub)
                length = int(pad_len * (0.5 + 0.5 * (sub + 1) / 20))
                pads[(k, sub)] = " ctx=" + "".join(
                    srng.choice("qwertyuiopasdfghjklzxcvbnm") for _ in range(length))
    burst_at = {int(lines * (b + 0.5) / error_bursts): 5 for b in range(error_bursts)} \
        if error_bursts else {}

    t = start_ms
    err_left = 0
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(lines):
            ci, comp, action, k = shapes[rng.randrange(len(shapes))]
            body = action
            while "{n}" in body:
                body = body.replace("{n}", str(rng.randint(10, 999_999)), 1)
            while "{o}" in body:
                body = body.replace("{o}", str(rng.randint(0, 255)), 1)
            while "{d}" in body:
                body = body.replace("{d}", str(rng.randint(0, 9)), 1)
            while "{h}" in body:
                body = body.replace("{h}", f"{rng.getrandbits(48):012x}", 1)
            err_left = burst_at.get(i, err_left)
            if err_left > 0:
                sev = "ERROR"
                err_left -= 1
            else:
                sev = "INFO"
            line = f"{_iso(t)} {sev} [{comp}] {body}"
            pad = pads.get((k, ci % 20))
            if pad:
                line += pad
            fh.write(line + "\n")
            t += rng.randint(5, 50)
    return Path(path)
