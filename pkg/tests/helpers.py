"""Independent oracles and fixtures shared across the test suite.

Everything here recomputes results from first principles (direct
definitions, no Lance-Williams shortcuts, no vectorized paths) so the
library implementations are checked against a second route.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from lexhier.cluster import DistanceMatrix
from lexhier.preprocess import RawDocument, default_lemmatizer, load_stopwords, preprocess


# ---------------------------------------------------------------------------
# Clustering oracle: recompute every inter-cluster distance from scratch
# ---------------------------------------------------------------------------

def naive_agglomerate(dist: DistanceMatrix, linkage: str):
    """Reference agglomeration: direct linkage over member pairs each step."""
    square = dist.square()
    clusters: dict[int, list[int]] = {i: [i] for i in range(dist.n)}
    merges = []
    next_id = dist.n
    while len(clusters) > 1:
        best = None
        ids = sorted(clusters)
        for a, b in itertools.combinations(ids, 2):
            pair = [square[x, y] for x in clusters[a] for y in clusters[b]]
            if linkage == "single":
                d = min(pair)
            elif linkage == "complete":
                d = max(pair)
            else:
                d = sum(pair) / len(pair)
            key = (d, a, b)
            if best is None or key < best:
                best = key
        d, a, b = best
        merges.append((a, b, d, len(clusters[a]) + len(clusters[b])))
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        next_id += 1
    return merges


def pearson_oracle(x, t) -> float:
    x = [float(v) for v in x]
    t = [float(v) for v in t]
    mx = sum(x) / len(x)
    mt = sum(t) / len(t)
    num = sum((a - mx) * (b - mt) for a, b in zip(x, t))
    dx = sum((a - mx) ** 2 for a in x) ** 0.5
    dt = sum((b - mt) ** 2 for b in t) ** 0.5
    return num / (dx * dt)


def silhouette_oracle(i: int, labels, square) -> float:
    """Direct double-loop evaluation of the silhouette definitions."""
    labels = list(labels)
    n = len(labels)
    own = labels[i]
    co_members = [j for j in range(n) if labels[j] == own and j != i]
    if not co_members:
        return 0.0
    a = sum(square[i][j] for j in co_members) / len(co_members)
    b = None
    for other in sorted(set(labels)):
        if other == own:
            continue
        members = [j for j in range(n) if labels[j] == other]
        mean = sum(square[i][j] for j in members) / len(members)
        b = mean if b is None else min(b, mean)
    if max(a, b) == 0.0:
        return 0.0
    return (b - a) / max(a, b)


def adjusted_rand_index(a, b) -> float:
    pairs = Counter(zip(a, b))
    ca = Counter(a)
    cb = Counter(b)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = sum(comb2(v) for v in pairs.values())
    sum_a = sum(comb2(v) for v in ca.values())
    sum_b = sum(comb2(v) for v in cb.values())
    total = comb2(len(list(a)))
    expected = sum_a * sum_b / total
    top = (sum_a + sum_b) / 2.0
    return (sum_ij - expected) / (top - expected)


def metrics_oracle(y_true, y_pred, n_classes):
    """Accuracy / macro P, R, F1 computed directly from prediction lists."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    accuracy = sum(t == p for t, p in zip(y_true, y_pred)) / len(y_true)
    precisions, recalls, f1s = [], [], []
    for c in range(n_classes):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    k = n_classes
    return accuracy, sum(precisions) / k, sum(recalls) / k, sum(f1s) / k


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def numerical_gradients(loss_fn, arrays, eps: float = 1e-6):
    """Central finite differences of loss_fn() wrt each array, in place."""
    grads = []
    for arr in arrays:
        grad = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            up = loss_fn()
            arr[idx] = orig - eps
            down = loss_fn()
            arr[idx] = orig
            grad[idx] = (up - down) / (2.0 * eps)
            it.iternext()
        grads.append(grad)
    return grads


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    denom = max(float(np.linalg.norm(analytic) + np.linalg.norm(numeric)), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------

def random_distance_matrix(rng: np.random.Generator, n: int, metric: str) -> DistanceMatrix:
    """Distances over random points (euclidean) or random directions (cosine)."""
    points = rng.normal(size=(n, 3))
    iu = np.triu_indices(n, 1)
    if metric == "cosine":
        unit = points / np.linalg.norm(points, axis=1, keepdims=True)
        values = (1.0 - unit @ unit.T)[iu]
        values = np.maximum(values, 0.0)
    else:
        diff = points[:, None, :] - points[None, :, :]
        values = np.sqrt((diff**2).sum(axis=2))[iu]
    return DistanceMatrix(n=n, values=values, metric=metric)


def random_assignment(rng: np.random.Generator, n: int, k_max: int = 6) -> np.ndarray:
    """Random labels with at least two non-empty clusters."""
    while True:
        k = int(rng.integers(2, min(k_max, n) + 1))
        labels = rng.integers(0, k, size=n)
        if len(np.unique(labels)) >= 2:
            return labels


# ---------------------------------------------------------------------------
# Planted-concept corpus: disjoint co-occurrence blocks
# ---------------------------------------------------------------------------

_PREFIXES = ("ka", "mo", "tu", "ve", "zi", "po", "ra", "hu")
_MID = "abcdefhiklmnoprtuv"
_LAST = "bcfklmnprtvz"


def planted_vocabulary(n_concepts: int, words_per_concept: int) -> list[list[str]]:
    """Synthetic alphabetic words per concept, stable under the preprocessor."""
    lemmatizer = default_lemmatizer()
    stops = load_stopwords()
    concepts = []
    seen: set[str] = set()
    for c in range(n_concepts):
        words = []
        for mid1, mid2, last in itertools.product(_MID, _MID, _LAST):
            word = _PREFIXES[c] + mid1 + mid2 + last
            if word in stops or word in seen or lemmatizer.lemma(word) != word:
                continue
            seen.add(word)
            words.append(word)
            if len(words) == words_per_concept:
                break
        concepts.append(words)
    return concepts


def planted_corpus(
    concepts: list[list[str]], n_sentences: int, seed: int
) -> tuple[list[str], dict[str, int]]:
    """Raw corpus lines drawing each sentence from one concept's words."""
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(n_sentences):
        c = int(rng.integers(len(concepts)))
        length = int(rng.integers(6, 11))
        lines.append(" ".join(rng.choice(concepts[c], size=length, replace=True)))
    truth = {w: c for c, words in enumerate(concepts) for w in words}
    return lines, truth


def preprocessed_stream(lines: list[str]):
    stream = []
    for i, line in enumerate(lines):
        stream.extend(preprocess(RawDocument(str(i), line)))
    return stream
