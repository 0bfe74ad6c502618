"""Agglomerative hierarchical clustering and cophenetic model selection.

Builds dendrograms over condensed distance matrices with single,
complete, or average linkage, computes cophenetic distances and the
cophenetic correlation coefficient (the Pearson correlation between the
original and dendrogrammatic distances), and cuts a dendrogram into a
flat cluster assignment.

Merging always picks the globally closest pair; equal distances are
broken toward the lexicographically smallest (min_id, max_id) cluster
pair, so results are fully deterministic.  Inter-cluster distances are
maintained with the Lance-Williams recurrences; a brute-force reference
in the test suite pins their correctness.  The full (2n-1)^2 working
matrix targets vocabulary-scale inputs (a few thousand items).

Leaves are 0..n-1 and merge m creates node n+m.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding.vectors import EmbeddingMatrix, ZeroVector

LINKAGES = ("single", "complete", "average")
METRICS = ("cosine", "euclidean")


class UnknownToken(KeyError):
    """An item has no vector in the embedding."""


class TooFewItems(ValueError):
    """Pairwise distances need at least two items."""


class DegenerateVariance(ValueError):
    """Pearson correlation undefined: one side has zero variance."""


class KOutOfRange(ValueError):
    """Requested cluster count outside 1..n."""


def condensed_size(n: int) -> int:
    return n * (n - 1) // 2


def condensed_index(n: int, i: int, j: int) -> int:
    """Flat index of pair (i, j), i < j, in row-major condensed order."""
    if i > j:
        i, j = j, i
    if i == j or j >= n:
        raise IndexError(f"invalid pair ({i}, {j}) for n={n}")
    return n * i - i * (i + 1) // 2 + (j - i - 1)


@dataclass
class DistanceMatrix:
    """Condensed upper-triangular pairwise distances over n items."""

    n: int
    values: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (condensed_size(self.n),):
            raise ValueError(
                f"expected {condensed_size(self.n)} condensed values, got {self.values.shape}"
            )
        if self.n >= 2 and self.values.min(initial=np.inf) < 0:
            raise ValueError("distances must be non-negative")

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        return float(self.values[condensed_index(self.n, i, j)])

    def square(self) -> np.ndarray:
        full = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        full[iu] = self.values
        full[(iu[1], iu[0])] = self.values
        return full

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"{self.n} {self.metric}\n")
            for v in self.values:
                handle.write(repr(float(v)) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DistanceMatrix":
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().split()
            if len(header) != 2:
                raise ValueError("distance file header must be '<n> <metric>'")
            n, metric = int(header[0]), header[1]
            values = np.asarray([float(line) for line in handle if line.strip()])
        return cls(n=n, values=values, metric=metric)


@dataclass
class Dendrogram:
    """Ordered merge list (left, right, height, size); node n+m for merge m."""

    n_leaves: int
    merges: list[tuple[int, int, float, int]]
    labels: list[str] | None = None

    def __post_init__(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError(
                f"{self.n_leaves} leaves require {self.n_leaves - 1} merges, "
                f"got {len(self.merges)}"
            )
        if self.labels is not None and len(self.labels) != self.n_leaves:
            raise ValueError("labels must cover every leaf")

    @property
    def root(self) -> int:
        return self.n_leaves + len(self.merges) - 1

    def heights(self) -> np.ndarray:
        return np.asarray([m[2] for m in self.merges])


def pairwise_distances(
    emb: EmbeddingMatrix, items: Sequence[str], metric: str = "cosine"
) -> DistanceMatrix:
    """Condensed pairwise distances between the items' vectors.

    ``cosine`` is 1 - cosine similarity (range [0, 2]); ``euclidean``
    is the L2 norm of the difference.  Raises :class:`UnknownToken` for
    items without vectors and :class:`TooFewItems` for n < 2.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    missing = [w for w in items if w not in emb]
    if missing:
        raise UnknownToken(f"items without vectors: {missing[:5]}")
    if len(items) < 2:
        raise TooFewItems("need at least 2 items")
    x = np.stack([emb.vector(w) for w in items])
    iu = np.triu_indices(len(items), 1)
    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        if np.any(norms == 0.0):
            raise ZeroVector("cosine distance undefined for zero vectors")
        unit = x / norms[:, None]
        dist = 1.0 - unit @ unit.T
        # 1 - s cannot resolve distances below float epsilon; snap the
        # residue so identical vectors come out at exactly zero
        dist[np.abs(dist) < 1e-14] = 0.0
    else:
        sq = np.einsum("ij,ij->i", x, x)
        dist = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
        np.sqrt(np.maximum(dist, 0.0, out=dist), out=dist)
    return DistanceMatrix(n=len(items), values=np.maximum(dist[iu], 0.0), metric=metric)


def agglomerate(dist: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Greedy bottom-up merging of the closest cluster pair.

    Ties break toward the smallest (min_id, max_id) pair of cluster
    ids.  Heights are non-decreasing for all three supported linkages.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    n = dist.n
    if n < 2:
        raise TooFewItems("need at least 2 items to cluster")
    total = 2 * n - 1
    dmat = np.full((total, total), np.inf)
    dmat[:n, :n] = dist.square()
    np.fill_diagonal(dmat, np.inf)
    sizes = np.ones(total, dtype=np.int64)
    alive = np.zeros(total, dtype=bool)
    alive[:n] = True

    # nn_dist[i] = distance to the closest active partner with a larger
    # id; numpy argmin over it yields the smallest-id row, and the
    # per-row argmin the smallest partner, giving the documented
    # tie-break for free.
    nn_dist = np.full(total, np.inf)
    nn_id = np.full(total, -1, dtype=np.int64)

    def refresh_row(i: int) -> None:
        partners = np.flatnonzero(alive[i + 1 :]) + i + 1
        if partners.size == 0:
            nn_dist[i] = np.inf
            nn_id[i] = -1
            return
        row = dmat[i, partners]
        best = int(np.argmin(row))
        nn_dist[i] = row[best]
        nn_id[i] = partners[best]

    for i in range(n):
        refresh_row(i)

    merges: list[tuple[int, int, float, int]] = []
    for step in range(n - 1):
        i = int(np.argmin(nn_dist))
        j = int(nn_id[i])
        height = float(nn_dist[i])
        new = n + step
        merges.append((i, j, height, int(sizes[i] + sizes[j])))

        alive[i] = alive[j] = False
        nn_dist[i] = nn_dist[j] = np.inf
        others = np.flatnonzero(alive)
        if others.size:
            d_i = dmat[i, others]
            d_j = dmat[j, others]
            if linkage == "single":
                row = np.minimum(d_i, d_j)
            elif linkage == "complete":
                row = np.maximum(d_i, d_j)
            else:
                row = (sizes[i] * d_i + sizes[j] * d_j) / (sizes[i] + sizes[j])
            dmat[new, others] = row
            dmat[others, new] = row
        sizes[new] = sizes[i] + sizes[j]
        alive[new] = True

        for k in others:
            if nn_id[k] == i or nn_id[k] == j:
                refresh_row(int(k))
            elif dmat[k, new] < nn_dist[k]:
                nn_dist[k] = dmat[k, new]
                nn_id[k] = new
        # `new` has the largest id: no larger partners, so its row stays inf.

    return Dendrogram(n_leaves=n, merges=merges)


def cophenetic_matrix(dend: Dendrogram) -> DistanceMatrix:
    """t(i, j) = height of the lowest merge joining leaves i and j; ultrametric."""
    n = dend.n_leaves
    values = np.zeros(condensed_size(n))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for m, (left, right, height, _) in enumerate(dend.merges):
        left_members = members.pop(left)
        right_members = members.pop(right)
        for a in left_members:
            for b in right_members:
                values[condensed_index(n, a, b)] = height
        members[n + m] = left_members + right_members
    return DistanceMatrix(n=n, values=values, metric="cophenetic")


def cophenetic_coefficient(dist: DistanceMatrix, coph: DistanceMatrix) -> float:
    """Pearson correlation between original and cophenetic condensed distances.

    Raises :class:`DegenerateVariance` when either side is constant.
    """
    if dist.n != coph.n:
        raise ValueError("distance and cophenetic matrices cover different item counts")
    x = dist.values - dist.values.mean()
    t = coph.values - coph.values.mean()
    sx = float(np.sqrt(np.sum(x * x)))
    st = float(np.sqrt(np.sum(t * t)))
    if sx == 0.0 or st == 0.0:
        raise DegenerateVariance("all pairwise distances equal on one side")
    return float(np.sum(x * t) / (sx * st))


@dataclass
class ModelComparison:
    """Cophenetic ranking of embedding models over a shared item list."""

    ranking: list[tuple[str, float]]
    items: list[str]
    dropped: list[str]

    @property
    def winner(self) -> str:
        return self.ranking[0][0]


def compare_models(
    models: Sequence[tuple[str, EmbeddingMatrix]],
    items: Sequence[str],
    metric: str = "cosine",
    linkage: str = "average",
) -> ModelComparison:
    """Rank models by the cophenetic coefficient of their dendrograms.

    Items missing from any model's vocabulary are dropped (with a
    warning) so every model is scored on the same list.
    """
    if not models:
        raise ValueError("need at least one model")
    kept = [w for w in items if all(w in emb for _, emb in models)]
    dropped = [w for w in items if w not in set(kept)]
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} items missing from at least one model "
            f"(e.g. {dropped[:3]})",
            stacklevel=2,
        )
    if len(kept) < 2:
        raise TooFewItems("fewer than 2 items shared by all models")
    scores = []
    for name, emb in models:
        dist = pairwise_distances(emb, kept, metric)
        dend = agglomerate(dist, linkage)
        scores.append((name, cophenetic_coefficient(dist, cophenetic_matrix(dend))))
    ranking = sorted(scores, key=lambda item: -item[1])
    return ModelComparison(ranking=ranking, items=kept, dropped=dropped)


def cut(dend: Dendrogram, k: int) -> np.ndarray:
    """Undo the last k-1 merges; label the k components 0..k-1.

    Component labels follow the order of each component's smallest
    member id.
    """
    n = dend.n_leaves
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside 1..{n}")
    parent = list(range(2 * n - 1))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m, (left, right, _, _) in enumerate(dend.merges[: n - k]):
        node = n + m
        parent[find(left)] = node
        parent[find(right)] = node

    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for leaf in range(n):
        root = find(leaf)
        if root not in seen:
            seen[root] = len(seen)
        labels[leaf] = seen[root]
    return labels


# ---------------------------------------------------------------------------
# Dendrogram file format: one JSON merge record per line, leaf ids
# 0..n-1, node n+m for merge m; sidecar "<path>.labels" maps leaf id
# (line number) to token.
# ---------------------------------------------------------------------------

def save_dendrogram(dend: Dendrogram, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for left, right, height, size in dend.merges:
            record = {"left": left, "right": right, "height": height, "size": size}
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    if dend.labels is not None:
        sidecar = path.with_name(path.name + ".labels")
        sidecar.write_text("".join(t + "\n" for t in dend.labels), encoding="utf-8")


def load_dendrogram(path: str | Path) -> Dendrogram:
    path = Path(path)
    merges = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            rec = json.loads(line)
            merges.append((int(rec["left"]), int(rec["right"]), float(rec["height"]), int(rec["size"])))
    labels = None
    sidecar = path.with_name(path.name + ".labels")
    if sidecar.exists():
        labels = [line.rstrip("\n") for line in sidecar.read_text(encoding="utf-8").splitlines()]
    return Dendrogram(n_leaves=len(merges) + 1, merges=merges, labels=labels)
