"""Silhouette scoring and optimal-cluster-count selection over dendrogram cuts.

For point i with intra-cluster mean distance a(i) and smallest mean
distance to another cluster b(i), the silhouette is
s(i) = (b(i) - a(i)) / max(a(i), b(i)), in [-1, 1].  Singletons score 0
by convention.  ``sweep_k`` evaluates the average silhouette for every
cut in a k-range and picks the argmax (ties toward smaller k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import Dendrogram, DistanceMatrix, KOutOfRange, cut

DEFAULT_K_CAP = 300


class SingleCluster(ValueError):
    """Silhouette needs at least two clusters."""


def _column_index(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ids = np.unique(labels)
    col = np.searchsorted(ids, labels)
    return ids, col


def silhouette_samples(assignment, dist: DistanceMatrix) -> np.ndarray:
    """s(i) for every point, vectorized over the squared-up distance matrix."""
    labels = np.asarray(assignment)
    n = dist.n
    if labels.shape != (n,):
        raise ValueError(f"assignment must cover all {n} items")
    ids, col = _column_index(labels)
    if len(ids) < 2:
        raise SingleCluster("only one cluster present")

    square = dist.square()
    onehot = (col[:, None] == np.arange(len(ids))[None, :]).astype(np.float64)
    sums = square @ onehot
    sizes = onehot.sum(axis=0)
    rows = np.arange(n)

    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[rows, col] / (sizes[col] - 1.0)
        between = sums / sizes[None, :]
        between[rows, col] = np.inf
        b = between.min(axis=1)
        s = (b - a) / np.maximum(a, b)
    s[~np.isfinite(s)] = 0.0
    s[sizes[col] == 1] = 0.0
    return s


def silhouette_point(i: int, assignment, dist: DistanceMatrix) -> float:
    """s(i) for a single point (singletons score 0)."""
    return float(silhouette_samples(assignment, dist)[i])


def average_silhouette(assignment, dist: DistanceMatrix) -> float:
    """Arithmetic mean of s(i) over all points."""
    return float(silhouette_samples(assignment, dist).mean())


@dataclass
class SilhouetteReport:
    per_point: np.ndarray
    average: float
    k: int


def score_assignment(assignment, dist: DistanceMatrix) -> SilhouetteReport:
    per_point = silhouette_samples(assignment, dist)
    return SilhouetteReport(
        per_point=per_point,
        average=float(per_point.mean()),
        k=len(np.unique(np.asarray(assignment))),
    )


@dataclass
class KSweepResult:
    """Average silhouette per k and the argmax (smallest k on ties)."""

    curve: dict[int, float]
    best_k: int

    @property
    def best_average(self) -> float:
        return self.curve[self.best_k]


def sweep_k(
    dend: Dendrogram,
    dist: DistanceMatrix,
    k_min: int = 2,
    k_max: int | None = None,
) -> KSweepResult:
    """Average silhouette of cut(dend, k) for each k in [k_min, k_max].

    ``k_max`` defaults to min(n - 1, 300); the bounds must satisfy
    2 <= k_min <= k_max <= n - 1.
    """
    n = dend.n_leaves
    if k_max is None:
        k_max = min(n - 1, DEFAULT_K_CAP)
    if not 2 <= k_min <= k_max <= n - 1:
        raise KOutOfRange(f"need 2 <= k_min <= k_max <= {n - 1}, got [{k_min}, {k_max}]")
    curve: dict[int, float] = {}
    best_k = k_min
    best = -np.inf
    for k in range(k_min, k_max + 1):
        avg = average_silhouette(cut(dend, k), dist)
        curve[k] = avg
        if avg > best:
            best = avg
            best_k = k
    return KSweepResult(curve=curve, best_k=best_k)
