"""GloVe: weighted least-squares embeddings over a co-occurrence table.

The co-occurrence builder counts, for every center token, the context
tokens within the window, weighting each pair by 1/distance.  Symmetric
context looks both ways; asymmetric context looks left only.  Training
minimizes

    J = 1/2 * sum_ij f(X_ij) (w_i . w~_j + b_i + b~_j - log X_ij)^2

by AdaGrad over the nonzero entries, with f(x) = min(1, (x/x_max)^alpha).
The returned vectors are the sums of word and context vectors.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .vectors import EmbeddingMatrix
from .word2vec import TrainConfig, build_vocab

X_MAX = 100.0
WEIGHT_ALPHA = 0.75


class EmptyInput(ValueError):
    """Co-occurrence table has no entries to train on."""


@dataclass
class CooccurrenceTable:
    """Sparse (token_i, token_j) -> weighted count map with its vocabulary."""

    vocab: list[str]
    counts: dict[tuple[str, str], float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.counts)

    def get(self, token_i: str, token_j: str) -> float:
        return self.counts.get((token_i, token_j), 0.0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Entries as parallel (i, j, count) arrays in deterministic order."""
        index = {t: i for i, t in enumerate(self.vocab)}
        items = sorted(self.counts.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]]))
        rows = np.asarray([index[a] for (a, _), _ in items], dtype=np.int64)
        cols = np.asarray([index[b] for (_, b), _ in items], dtype=np.int64)
        vals = np.asarray([v for _, v in items], dtype=np.float64)
        return rows, cols, vals


def build_cooccurrence(
    corpus: Sequence[list[str]],
    window: int = 10,
    symmetric: bool = True,
    min_count: int = 1,
) -> CooccurrenceTable:
    """Accumulate 1/distance-weighted co-occurrence counts within sentences.

    Tokens below ``min_count`` are excluded from the vocabulary and from
    counting.  An empty or single-token corpus yields an empty table.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    try:
        vocab = [t for t, _ in build_vocab(corpus, min_count)]
    except ValueError:
        return CooccurrenceTable(vocab=[])
    known = set(vocab)
    counts: dict[tuple[str, str], float] = {}

    def bump(a: str, b: str, w: float) -> None:
        counts[(a, b)] = counts.get((a, b), 0.0) + w

    for sentence in corpus:
        tokens = [t for t in sentence if t in known]
        for t, center in enumerate(tokens):
            for p in range(max(0, t - window), t):
                weight = 1.0 / (t - p)
                bump(center, tokens[p], weight)
                if symmetric:
                    # mirror immediately so X[i,j] and X[j,i] accumulate
                    # identical addends in identical order (exact equality)
                    bump(tokens[p], center, weight)
    return CooccurrenceTable(vocab=vocab, counts=counts)


def glove_weight(x, x_max: float = X_MAX, alpha: float = WEIGHT_ALPHA):
    """Loss weight f(x) = min(1, (x/x_max)^alpha); monotone, f(x_max) = 1."""
    return np.minimum(1.0, (np.asarray(x, dtype=np.float64) / x_max) ** alpha)


def glove_entry_loss(
    w_i: np.ndarray,
    w_j: np.ndarray,
    b_i: float,
    b_j: float,
    x: float,
    x_max: float = X_MAX,
    alpha: float = WEIGHT_ALPHA,
) -> float:
    """One entry's contribution: 1/2 f(x) (w_i.w~_j + b_i + b~_j - log x)^2."""
    diff = float(w_i @ w_j) + b_i + b_j - np.log(x)
    return float(0.5 * glove_weight(x, x_max, alpha) * diff * diff)


def glove_entry_gradients(
    w_i: np.ndarray,
    w_j: np.ndarray,
    b_i: float,
    b_j: float,
    x: float,
    x_max: float = X_MAX,
    alpha: float = WEIGHT_ALPHA,
):
    """Gradients of :func:`glove_entry_loss` wrt (w_i, w~_j, b_i, b~_j)."""
    diff = float(w_i @ w_j) + b_i + b_j - np.log(x)
    fdiff = float(glove_weight(x, x_max, alpha)) * diff
    return fdiff * w_j, fdiff * w_i, fdiff, fdiff


def train_glove(
    cooc: CooccurrenceTable,
    cfg: TrainConfig | None = None,
    epoch_callback: Callable[[int, float], None] | None = None,
) -> EmbeddingMatrix:
    """AdaGrad-fit GloVe vectors; deterministic for a fixed seed and one worker.

    ``epoch_callback(epoch, loss)`` receives the running loss summed
    over that epoch's updates.
    """
    cfg = cfg or TrainConfig(architecture="glove")
    if len(cooc) == 0:
        raise EmptyInput("co-occurrence table is empty")
    rows, cols, vals = cooc.arrays()
    log_vals = np.log(vals)
    weights = glove_weight(vals)

    n, dim = len(cooc.vocab), cfg.dim
    rng = np.random.default_rng(cfg.seed)
    scale = 0.5 / (dim + 1)
    w_main = (rng.random((n, dim)) - 0.5) * 2 * scale
    w_ctx = (rng.random((n, dim)) - 0.5) * 2 * scale
    b_main = (rng.random(n) - 0.5) * 2 * scale
    b_ctx = (rng.random(n) - 0.5) * 2 * scale
    g_w_main = np.ones((n, dim))
    g_w_ctx = np.ones((n, dim))
    g_b_main = np.ones(n)
    g_b_ctx = np.ones(n)

    lr = cfg.resolved_learning_rate
    epochs = cfg.resolved_epochs

    def run(order, loss_acc):
        for e in order:
            i, j = rows[e], cols[e]
            wi = w_main[i].copy()
            wj = w_ctx[j]
            diff = float(wi @ wj) + b_main[i] + b_ctx[j] - log_vals[e]
            fdiff = weights[e] * diff
            loss_acc[0] += 0.5 * fdiff * diff
            gi = fdiff * wj
            gj = fdiff * wi
            w_main[i] -= lr * gi / np.sqrt(g_w_main[i])
            w_ctx[j] -= lr * gj / np.sqrt(g_w_ctx[j])
            b_main[i] -= lr * fdiff / np.sqrt(g_b_main[i])
            b_ctx[j] -= lr * fdiff / np.sqrt(g_b_ctx[j])
            g_w_main[i] += gi * gi
            g_w_ctx[j] += gj * gj
            g_b_main[i] += fdiff * fdiff
            g_b_ctx[j] += fdiff * fdiff

    for epoch in range(epochs):
        order = rng.permutation(len(vals))
        loss_acc = [0.0]
        if cfg.workers <= 1:
            run(order, loss_acc)
        else:
            shards = [order[w :: cfg.workers] for w in range(cfg.workers)]
            accs = [[0.0] for _ in shards]
            threads = [
                threading.Thread(target=run, args=(shard, acc))
                for shard, acc in zip(shards, accs)
            ]
            for th in threads:
                th.start()
            for th in threads:
                th.join()
            loss_acc[0] = sum(a[0] for a in accs)
        if epoch_callback is not None:
            epoch_callback(epoch, loss_acc[0])

    return EmbeddingMatrix(cooc.vocab, w_main + w_ctx)
