"""2-D embedding of checkpoints by stress-minimizing MDS.

The input dissimilarity is a convex blend of the semantic distance matrix
and normalized pairwise time differences; the blend weight controls how far
the curve unfolds chronologically. Classical (eigendecomposition) MDS gives
a deterministic start, SMACOF majorization refines it. Projection quality is
reported as normalized stress and as the coefficient of determination
between input dissimilarities and embedded distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distance import DistanceConfig, DistanceMatrix, Semimetric
from .templates import Checkpoint


class DegenerateInput(ValueError):
    """Distance matrix contains negative or non-finite entries."""


class UndefinedFit(ArithmeticError):
    """R-squared is undefined: zero variance but nonzero residuals."""


@dataclass
class BlendConfig:
    presets: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5])

    def __post_init__(self):
        for a in self.presets:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha must be in [0, 1], got {a}")


@dataclass
class Embedding:
    alpha: float
    points: np.ndarray  # n x 2, centered
    stress: float  # normalized (Kruskal stress-1 against the blended input)
    r_squared: float
    stress_history: list[float] = field(default_factory=list, repr=False)


def blend_distances(d_sem: np.ndarray | DistanceMatrix, timestamps: Sequence[int],
                    alpha: float) -> np.ndarray:
    """(1 - alpha) * semantic distance + alpha * normalized time distance."""
    d = d_sem.values if isinstance(d_sem, DistanceMatrix) else np.asarray(d_sem, dtype=float)
    if alpha == 0.0:
        return d.copy()
    ts = np.asarray(timestamps, dtype=float)
    span = ts.max() - ts.min()
    if span == 0:
        t = np.zeros_like(d)
    else:
        t = np.abs(ts[:, None] - ts[None, :]) / span
    return (1.0 - alpha) * d + alpha * t


def classical_mds_init(d: np.ndarray) -> np.ndarray:
    """Deterministic 2-D coordinates from double-centered eigendecomposition."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n == 1:
        return np.zeros((1, 2))
    if n == 2:
        half = d[0, 1] / 2.0
        return np.array([[-half, 0.0], [half, 0.0]])
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (d * d) @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1][:2]
    coords = np.zeros((n, 2))
    for k, idx in enumerate(order):
        lam = max(evals[idx], 0.0)
        vec = evecs[:, idx]
        # canonical sign: largest-magnitude component positive
        pivot = np.argmax(np.abs(vec))
        if vec[pivot] < 0:
            vec = -vec
        coords[:, k] = vec * np.sqrt(lam)
    return coords - coords.mean(axis=0)


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def _raw_stress(d: np.ndarray, e: np.ndarray) -> float:
    r = d - e
    return float((r * r).sum()) / 2.0  # matrices are symmetric; count pairs once


def smacof_refine(d: np.ndarray, init_points: np.ndarray, max_iter: int = 300,
                  tol: float = 1e-6, seed: int = 0) -> tuple[np.ndarray, list[float]]:
    """Guttman-transform iteration from a fixed start; returns (points, stress history).

    Coincident start points with nonzero target distance get a tiny seeded
    jitter so the majorization can separate them; pairs at (numerically)
    zero embedded distance are left out of the transform.
    """
    d = np.asarray(d, dtype=float)
    if not np.isfinite(d).all() or (d < 0).any():
        raise DegenerateInput("distance matrix entries must be finite and non-negative")
    n = d.shape[0]
    x = np.array(init_points, dtype=float, copy=True)
    if n <= 1:
        return np.zeros((n, 2)), [0.0]
    eps = 1e-12
    e = _pairwise(x)
    off = ~np.eye(n, dtype=bool)
    collapsed = (e < eps) & (d > 0) & off
    if collapsed.any():
        rng = np.random.default_rng(seed)
        scale = max(d.max(), 1.0) * 1e-9
        x += rng.normal(0.0, scale, size=x.shape)
        x -= x.mean(axis=0)
        e = _pairwise(x)

    history = [_raw_stress(d, e)]
    for _ in range(max_iter):
        ratio = np.where(e > eps, d / np.where(e > eps, e, 1.0), 0.0)
        np.fill_diagonal(ratio, 0.0)
        b = -ratio
        np.fill_diagonal(b, ratio.sum(axis=1))
        nxt = (b @ x) / n
        nxt -= nxt.mean(axis=0)
        e = _pairwise(nxt)
        stress = _raw_stress(d, e)
        prev = history[-1]
        if stress > prev:  # numerically converged; majorization cannot increase
            break
        x = nxt
        history.append(stress)
        if prev == 0.0 or (prev - stress) / prev < tol:
            break
    return x, history


def normalized_stress(d: np.ndarray, raw: float) -> float:
    denom = float((d * d).sum()) / 2.0
    if denom == 0.0:
        return 0.0
    return float(np.sqrt(raw / denom))


def r_squared(d: np.ndarray, points: np.ndarray) -> float:
    """Coefficient of determination between dissimilarities and embedded distances."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    iu = np.triu_indices(n, k=1)
    dv = d[iu]
    if dv.size == 0:
        return 1.0
    ev = _pairwise(np.asarray(points, dtype=float))[iu]
    ss_res = float(((dv - ev) ** 2).sum())
    ss_tot = float(((dv - dv.mean()) ** 2).sum())
    if ss_tot == 0.0:
        if ss_res <= 1e-12 * (1.0 + float((dv * dv).sum())):
            return 1.0
        raise UndefinedFit("all dissimilarities equal but residuals nonzero")
    return 1.0 - ss_res / ss_tot


def embed(d: np.ndarray, alpha: float, max_iter: int = 300, tol: float = 1e-6,
          seed: int = 0) -> Embedding:
    """Classical init plus SMACOF refinement for one blended matrix."""
    init = classical_mds_init(d)
    points, history = smacof_refine(d, init, max_iter=max_iter, tol=tol, seed=seed)
    return Embedding(alpha, points, normalized_stress(d, history[-1]),
                     r_squared(d, points), history)


@dataclass
class JointResult:
    checkpoints: list[Checkpoint]  # concatenated, series-grouped
    series_tags: list[str]
    semantic: DistanceMatrix
    embeddings: list[Embedding]


def embed_blends(sem: DistanceMatrix, timestamps: Sequence[int],
                 blend: Optional[BlendConfig] = None, max_iter: int = 300,
                 tol: float = 1e-6, seed: int = 0) -> list[Embedding]:
    """One embedding per blend preset over a shared semantic matrix."""
    blend = blend or BlendConfig()
    return [
        embed(blend_distances(sem, timestamps, alpha), alpha,
              max_iter=max_iter, tol=tol, seed=seed)
        for alpha in blend.presets
    ]


def joint_embed(series: Sequence[Sequence[Checkpoint]], universe: Sequence[str],
                dist_config: Optional[DistanceConfig] = None,
                blend: Optional[BlendConfig] = None, max_iter: int = 300,
                tol: float = 1e-6, seed: int = 0, threads: int = 1) -> JointResult:
    """Embed one or more checkpoint series in a shared coordinate frame.

    All checkpoints go into a single distance matrix and a single embedding
    per blend preset; time normalization uses the global time span.
    """
    if not series:
        raise ValueError("need at least one series")
    checkpoints = [cp for group in series for cp in group]
    tags = [cp.series_id for cp in checkpoints]
    sem = Semimetric(universe, dist_config).matrix(checkpoints, threads=threads)
    timestamps = [cp.timestamp for cp in checkpoints]
    embeddings = embed_blends(sem, timestamps, blend, max_iter=max_iter,
                              tol=tol, seed=seed)
    return JointResult(checkpoints, tags, sem, embeddings)
