"""Set-of-strings semimetric between checkpoints.

Template similarity is a weighted Levenshtein distance normalized by the
longer string (and by the largest edit weight, keeping values in [0, 1]).
Checkpoint distance aggregates template distances twice: a directed
mean-of-minima per side, then a cardinality-weighted logarithmic
symmetrization. The result is symmetric, zero exactly on equal template
sets, and bounded by [0, 1]; the triangle inequality does not hold.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .templates import Checkpoint

_NUMPY_MIN_LEN = 96  # switch the DP inner loop to numpy for long strings


@dataclass
class DistanceConfig:
    w_ins: float = 1.0
    w_del: float = 1.0
    w_sub: float = 1.0
    metric: str = "levenshtein"  # or "qgram"

    def __post_init__(self):
        if min(self.w_ins, self.w_del, self.w_sub) <= 0:
            raise ValueError("edit weights must be positive")
        if self.metric not in ("levenshtein", "qgram"):
            raise ValueError(f"unknown string metric: {self.metric}")

    @property
    def max_weight(self) -> float:
        return max(self.w_ins, self.w_del, self.w_sub)


@dataclass
class DistanceMatrix:
    n: int
    values: np.ndarray  # symmetric, zero diagonal, entries in [0, 1]

    def to_csv(self) -> str:
        """Row-major CSV with a header of checkpoint indices, 17 significant digits."""
        lines = ["," + ",".join(str(i) for i in range(self.n))]
        for i in range(self.n):
            lines.append(str(i) + "," + ",".join(format(v, ".17g") for v in self.values[i]))
        return "\n".join(lines) + "\n"


def levenshtein(a: str, b: str, w_ins: float = 1.0, w_del: float = 1.0,
                w_sub: float = 1.0, cutoff: Optional[float] = None) -> Optional[float]:
    """Weighted edit distance; with unit weights, the classic edit count.

    `cutoff` enables an early abort: once the distance provably exceeds it,
    None is returned instead of the exact value.
    """
    if a == b:
        return 0.0
    la, lb = len(a), len(b)
    if la == 0:
        return lb * w_ins
    if lb == 0:
        return la * w_del
    if w_ins == w_del == w_sub:
        w = w_ins
        if la > lb:
            a, b = b, a  # keep the bit word on the shorter string
        units = _myers(a, b, None if cutoff is None else cutoff / w)
        return None if units is None else units * w
    return _lev_weighted(a, b, w_ins, w_del, w_sub, cutoff)


def pattern_bitmasks(pattern: str) -> dict[str, int]:
    """Per-character position bitmask of a pattern (for the bit-parallel DP)."""
    peq: dict[str, int] = {}
    bit = 1
    for c in pattern:
        peq[c] = peq.get(c, 0) | bit
        bit <<= 1
    return peq


def _myers(a: str, b: str, cutoff: Optional[float],
           peq: Optional[dict[str, int]] = None) -> Optional[int]:
    """Unit-cost edit distance, bit-parallel over one big-int word.

    Column-wise simulation of the DP band deltas: the pattern `a` (must not
    be longer than `b`) occupies one arbitrary-precision integer, and each
    text character advances all pattern rows at once. The running score is
    the DP cell in the last pattern row; it changes by at most one per
    column, which gives the abort bound.
    """
    m = len(a)
    mask = (1 << m) - 1
    top = 1 << (m - 1)
    if peq is None:
        peq = pattern_bitmasks(a)
    get = peq.get
    pv = mask
    mv = 0
    score = m
    remaining = len(b)
    for c in b:
        eq = get(c, 0)
        xv = eq | mv
        d0 = ((((eq & pv) + pv) ^ pv) | xv) & mask
        hp = mv | (~(d0 | pv) & mask)
        hn = pv & d0
        if hp & top:
            score += 1
        elif hn & top:
            score -= 1
        hp = ((hp << 1) | 1) & mask
        hn = (hn << 1) & mask
        pv = hn | (~(d0 | hp) & mask)
        mv = hp & d0
        remaining -= 1
        if cutoff is not None and score - remaining > cutoff:
            return None
    return score


def _lev_weighted(a: str, b: str, w_ins: float, w_del: float, w_sub: float,
                  cutoff: Optional[float]) -> Optional[float]:
    # Full three-way minimum: the diagonal shortcut for equal characters is
    # only safe when all weights coincide.
    if max(len(a), len(b)) >= _NUMPY_MIN_LEN:
        return _lev_numpy(a, b, w_ins, w_del, w_sub, cutoff)
    lb = len(b)
    prev = [j * w_ins for j in range(lb + 1)]
    for i in range(1, len(a) + 1):
        ca = a[i - 1]
        left = i * w_del
        cur = [left]
        row_min = left
        for j in range(1, lb + 1):
            v = prev[j - 1] + (0.0 if ca == b[j - 1] else w_sub)
            if prev[j] + w_del < v:
                v = prev[j] + w_del
            if left + w_ins < v:
                v = left + w_ins
            cur.append(v)
            left = v
            if v < row_min:
                row_min = v
        if cutoff is not None and row_min > cutoff:
            return None
        prev = cur
    return prev[lb]


def _lev_numpy(a: str, b: str, w_ins: float, w_del: float, w_sub: float,
               cutoff: Optional[float]):
    # Row recurrence with the insertion chain resolved by a prefix-min scan:
    # dp[i][j] = w_ins*j + min_{k<=j}(tmp[k] - w_ins*k), tmp = sub/del candidates.
    A = np.frombuffer(a.encode("utf-32-le"), dtype=np.uint32)
    B = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    lb = len(B)
    jw = np.arange(lb + 1) * float(w_ins)
    prev = jw.copy()
    tmp = np.empty(lb + 1)
    for i in range(1, len(A) + 1):
        tmp[0] = i * w_del
        np.minimum(prev[:-1] + np.where(A[i - 1] == B, 0.0, w_sub),
                   prev[1:] + w_del, out=tmp[1:])
        np.subtract(tmp, jw, out=tmp)
        np.minimum.accumulate(tmp, out=tmp)
        np.add(tmp, jw, out=tmp)
        prev, tmp = tmp, prev
        if cutoff is not None and prev.min() > cutoff:
            return None
    out = float(prev[lb])
    return int(round(out)) if w_ins == w_del == w_sub == 1.0 else out


def qgram_distance(a: str, b: str) -> float:
    """Padded bigram profile distance, normalized to [0, 1]."""
    if a == b:
        return 0.0
    ga = _bigrams(a)
    gb = _bigrams(b)
    diff = 0
    for g, c in ga.items():
        diff += abs(c - gb.get(g, 0))
    for g, c in gb.items():
        if g not in ga:
            diff += c
    return diff / (len(a) + len(b) + 2)


def _bigrams(s: str) -> dict[str, int]:
    padded = "\x02" + s + "\x03"
    grams: dict[str, int] = {}
    for i in range(len(padded) - 1):
        g = padded[i : i + 2]
        grams[g] = grams.get(g, 0) + 1
    return grams


def norm_template_distance(a: str, b: str, config: Optional[DistanceConfig] = None) -> float:
    """Edit distance normalized by the longer string and the largest weight."""
    config = config or DistanceConfig()
    if not a and not b:
        return 0.0
    if config.metric == "qgram":
        return qgram_distance(a, b)
    d = levenshtein(a, b, config.w_ins, config.w_del, config.w_sub)
    return d / (config.max_weight * max(len(a), len(b)))


class Semimetric:
    """Checkpoint distance engine with a template-pair cache and pruning.

    The cache maps unordered template-id pairs to normalized distances
    (ordered pairs when insertion and deletion weights differ, since the
    directed edit distance is then asymmetric). Inside the per-template
    minimum, candidates are scanned outward from the closest length, so the
    length lower bound cuts off each side of the scan as soon as it cannot
    beat the current minimum.
    """

    def __init__(self, universe: Sequence[str], config: Optional[DistanceConfig] = None):
        self.universe = list(universe)
        self.config = config or DistanceConfig()
        self._symmetric = self.config.w_ins == self.config.w_del
        self._cache: dict[tuple[int, int], float] = {}
        # (template id, target id set) -> min distance; checkpoint pairs
        # overwhelmingly share target sets, so scans amortize across pairs
        self._min_cache: dict[tuple[int, frozenset], float] = {}
        self._bound_cache: dict[tuple[int, int], float] = {}
        self._lengths = [len(t) for t in self.universe]
        self._signatures = self._build_signatures()
        self._peq: dict[int, dict[str, int]] = {}

    def _build_signatures(self) -> np.ndarray:
        # character histogram per template (ASCII exact, one shared bucket
        # beyond); edits >= L1 difference / 2, a cheap second lower bound
        sig = np.zeros((len(self.universe), 129), dtype=np.int32)
        for k, text in enumerate(self.universe):
            row = sig[k]
            for c in text:
                o = ord(c)
                row[o if o < 128 else 128] += 1
        return sig

    def _pair_bound(self, i: int, j: int, max_len: int) -> float:
        """Normalized lower bound on d(i, j) from character counts."""
        key = (i, j) if i < j else (j, i)
        b = self._bound_cache.get(key)
        if b is None:
            cfg = self.config
            l1 = int(np.abs(self._signatures[i] - self._signatures[j]).sum())
            min_w = min(cfg.w_ins, cfg.w_del, cfg.w_sub)
            b = (l1 // 2) * min_w / cfg.max_weight
            self._bound_cache[key] = b
        return b / max_len

    def template_distance(self, i: int, j: int) -> float:
        """Normalized distance between templates by id, memoized."""
        if i == j:
            return 0.0
        key = (i, j) if (not self._symmetric or i < j) else (j, i)
        hit = self._cache.get(key)
        if hit is None:
            hit = norm_template_distance(self.universe[i], self.universe[j], self.config)
            self._cache[key] = hit
        return hit

    def _compute_pair(self, i: int, j: int, max_len: int) -> float:
        cfg = self.config
        if cfg.metric == "qgram":
            return qgram_distance(self.universe[i], self.universe[j])
        if cfg.w_ins == cfg.w_del == cfg.w_sub:
            # reuse the pattern bitmasks of the shorter template
            if self._lengths[j] < self._lengths[i] or \
                    (self._lengths[j] == self._lengths[i] and j < i):
                i, j = j, i
            peq = self._peq.get(i)
            if peq is None:
                peq = self._peq[i] = pattern_bitmasks(self.universe[i])
            a, b = self.universe[i], self.universe[j]
            raw = (0 if a == b else _myers(a, b, None, peq)) * cfg.w_ins
        else:
            raw = levenshtein(self.universe[i], self.universe[j], cfg.w_ins,
                              cfg.w_del, cfg.w_sub)
        return raw / (cfg.max_weight * max_len)

    def _min_distance(self, i: int, candidates: list[tuple[int, int]]) -> float:
        """min over candidate templates of d(universe[i], .).

        `candidates` is a (length, id) list sorted by length. The length
        lower bound grows monotonically as the scan moves away from la on
        either side, so a side is dropped once its bound reaches the
        current minimum; pairs that do get computed are cached globally.
        """
        cache = self._cache
        lengths = self._lengths
        symmetric = self._symmetric
        cfg = self.config
        la = lengths[i]
        factor = min(cfg.w_ins, cfg.w_del) / cfg.max_weight
        best = 1.0
        n = len(candidates)
        hi = bisect_left(candidates, (la, -1))
        lo = hi - 1
        while lo >= 0 or hi < n:
            if hi >= n or (lo >= 0 and la - candidates[lo][0] <= candidates[hi][0] - la):
                lc, j = candidates[lo]
                lo -= 1
                from_lo = True
            else:
                lc, j = candidates[hi]
                hi += 1
                from_lo = False
            max_len = lc if lc > la else la
            bound = factor * abs(la - lc) / max_len
            if bound >= best:
                if from_lo:
                    lo = -1  # shorter candidates only raise the bound
                else:
                    hi = n  # longer candidates only raise the bound
                continue
            key = (i, j) if (not symmetric or i < j) else (j, i)
            d = cache.get(key)
            if d is None:
                # second lower bound (character counts) before the real DP;
                # unlike the length bound it does not close the scan sides
                if self._pair_bound(i, j, max_len) >= best:
                    continue
                d = self._compute_pair(i, j, max_len)
                cache[key] = d
            if d < best:
                best = d
                if best == 0.0:
                    break
        return best

    def candidate_list(self, checkpoint: Checkpoint) -> list[tuple[int, int]]:
        """(length, id) pairs of a checkpoint's templates, sorted by length."""
        return sorted((self._lengths[j], j) for j in checkpoint.template_ids)

    def directed(self, x: Checkpoint, y: Checkpoint,
                 candidates: Optional[list[tuple[int, int]]] = None) -> float:
        """Directed distance: mean over x's templates of the minimum into y."""
        y_ids = y.template_ids
        missing = [i for i in x.template_ids if i not in y_ids]
        if not missing:
            return 0.0
        min_cache = self._min_cache
        mins = []
        for i in missing:
            key = (i, y_ids)
            v = min_cache.get(key)
            if v is None:
                if candidates is None:
                    candidates = self.candidate_list(y)
                v = self._min_distance(i, candidates)
                min_cache[key] = v
            mins.append(v)
        return math.fsum(mins) / len(x.template_ids)

    def checkpoint_distance(self, x: Checkpoint, y: Checkpoint,
                            x_candidates: Optional[list[tuple[int, int]]] = None,
                            y_candidates: Optional[list[tuple[int, int]]] = None) -> float:
        """Logarithmic cardinality-weighted symmetrization of both directions."""
        if x.template_ids == y.template_ids:
            return 0.0
        nx, ny = len(x.template_ids), len(y.template_ids)
        if nx == 1 and ny == 1:
            (i,) = x.template_ids
            (j,) = y.template_ids
            if self._symmetric:
                return self.template_distance(i, j)
            # asymmetric edit weights: keep the distance symmetric by
            # averaging both directions (equal to d(x0, y0) otherwise)
            return (self.template_distance(i, j) + self.template_distance(j, i)) / 2.0
        # a singleton side has log-weight zero; only the other term survives
        if nx == 1:
            return self.directed(y, x, x_candidates)
        if ny == 1:
            return self.directed(x, y, y_candidates)
        return (math.log2(nx) * self.directed(x, y, y_candidates)
                + math.log2(ny) * self.directed(y, x, x_candidates)) / math.log2(nx * ny)

    def matrix(self, checkpoints: Sequence[Checkpoint], threads: int = 1) -> DistanceMatrix:
        n = len(checkpoints)
        values = np.zeros((n, n))
        candidates = [self.candidate_list(cp) for cp in checkpoints]

        def fill_row(i: int):
            for j in range(i + 1, n):
                d = self.checkpoint_distance(checkpoints[i], checkpoints[j],
                                             candidates[i], candidates[j])
                values[i, j] = values[j, i] = d

        if threads > 1 and n > 2:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                list(ex.map(fill_row, range(n)))
        else:
            for i in range(n):
                fill_row(i)
        return DistanceMatrix(n, values)


def directed_distance(x: Checkpoint, y: Checkpoint, universe: Sequence[str],
                      config: Optional[DistanceConfig] = None) -> float:
    return Semimetric(universe, config).directed(x, y)


def checkpoint_distance(x: Checkpoint, y: Checkpoint, universe: Sequence[str],
                        config: Optional[DistanceConfig] = None) -> float:
    return Semimetric(universe, config).checkpoint_distance(x, y)


def distance_matrix(checkpoints: Sequence[Checkpoint], universe: Sequence[str],
                    config: Optional[DistanceConfig] = None,
                    threads: int = 1) -> DistanceMatrix:
    return Semimetric(universe, config).matrix(checkpoints, threads=threads)
