"""Segment the ordered record stream into consecutive events.

Three split rules combine in a single left-to-right sweep: a maximum event
size derived from the desired point count, the k largest time gaps, and
change points of a smoothed severity signal (fast rise on errors, slow decay
back to the base level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .ingest import LogRecord


class Trigger(Enum):
    STREAM_START = "stream_start"
    SIZE_LIMIT = "size_limit"
    TIME_GAP = "time_gap"
    SEVERITY_RISE = "severity_rise"
    SEVERITY_FALL = "severity_fall"


def geometric_window(length: int = 8, decay: float = 2.0) -> np.ndarray:
    """Normalized asymmetric window w_j proportional to decay**(-j)."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    w = decay ** -np.arange(length, dtype=float)
    return w / w.sum()


@dataclass
class EventConfig:
    target_points: int = 60
    k_gaps: int = 10
    window: np.ndarray = field(default_factory=geometric_window)
    # INFO level plus a small constant: a single error in an all-INFO stream
    # pushes the smoothed signal above this, plain INFO never does.
    severity_threshold: float = 32.0

    def __post_init__(self):
        if self.target_points < 1:
            raise ValueError("target_points must be >= 1")
        if self.k_gaps < 0:
            raise ValueError("k_gaps must be >= 0")
        w = np.asarray(self.window, dtype=float)
        if w.ndim != 1 or (w <= 0).any() or (np.diff(w) > 0).any():
            raise ValueError("window weights must be positive and non-increasing")
        if not math.isclose(w.sum(), 1.0, rel_tol=1e-9):
            raise ValueError("window weights must sum to 1")
        self.window = w


@dataclass
class Event:
    begin: int  # record index, inclusive
    end: int  # record index, exclusive
    start_timestamp: int
    trigger: Trigger

    def __len__(self) -> int:
        return self.end - self.begin


def max_event_size(n: int, target_points: int) -> int:
    """Records per event needed to land near the desired point count."""
    if n < 1:
        raise ValueError("need at least one record")
    return max(1, math.ceil(n / target_points))


def k_largest_gap_positions(timestamps: Sequence[int], k: int) -> set[int]:
    """Boundary indices after the k largest time gaps.

    A returned index b means a new event starts at record b. While the
    (k+1)-th largest gap equals the k-th, k is decremented; at k == 0 the
    gaps are ambiguous and ignored entirely.
    """
    ts = np.asarray(timestamps, dtype=np.int64)
    gaps = np.diff(ts)
    k = min(k, len(gaps))
    if k <= 0:
        return set()
    desc = np.sort(gaps)[::-1]
    while k > 0 and k < len(gaps) and desc[k] == desc[k - 1]:
        k -= 1
    if k == 0:
        return set()
    order = np.argsort(-gaps, kind="stable")
    return {int(i) + 1 for i in order[:k]}


def smooth_severity(levels: Sequence[int], window: np.ndarray) -> np.ndarray:
    """Causal convolution of severity levels with the window weights.

    Near the start, weights are renormalized over the valid indices so an
    all-constant input stays constant.
    """
    s = np.asarray(levels, dtype=float)
    w = np.asarray(window, dtype=float)
    n, length = len(s), len(w)
    if n == 0:
        return np.empty(0)
    f = np.convolve(s, w)[:n]
    head = min(length - 1, n)
    if head:
        f[:head] /= np.cumsum(w)[:head]
    return f


def severity_change_points(f: Sequence[float], threshold: float) -> dict[int, Trigger]:
    """Indices where the smoothed signal crosses the threshold."""
    f = np.asarray(f, dtype=float)
    points: dict[int, Trigger] = {}
    for i in range(1, len(f)):
        if f[i - 1] <= threshold < f[i]:
            points[i] = Trigger.SEVERITY_RISE
        elif f[i - 1] > threshold >= f[i]:
            points[i] = Trigger.SEVERITY_FALL
    return points


def segment(records: Sequence[LogRecord], config: EventConfig) -> list[Event]:
    """Single sweep over the sorted records, splitting on any rule.

    Trigger precedence (gap > severity > size) is recorded for diagnostics
    only; it never moves a boundary.
    """
    n = len(records)
    if n == 0:
        raise ValueError("cannot segment an empty record sequence")
    mes = max_event_size(n, config.target_points)
    timestamps = [r.timestamp for r in records]
    gap_bounds = k_largest_gap_positions(timestamps, config.k_gaps) if n >= 2 else set()
    f = smooth_severity([r.severity for r in records], config.window)
    change_points = severity_change_points(f, config.severity_threshold)

    events: list[Event] = []
    begin = 0
    trigger = Trigger.STREAM_START
    for i in range(1, n):
        cut = None
        if i in gap_bounds:
            cut = Trigger.TIME_GAP
        elif i in change_points:
            cut = change_points[i]
        elif i - begin == mes:
            cut = Trigger.SIZE_LIMIT
        if cut is not None:
            events.append(Event(begin, i, records[begin].timestamp, trigger))
            begin, trigger = i, cut
    events.append(Event(begin, n, records[begin].timestamp, trigger))
    return events
