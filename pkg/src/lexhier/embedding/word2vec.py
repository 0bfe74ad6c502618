"""Skip-gram and CBOW word embeddings with negative sampling.

Plain-numpy SGD implementations of the two word2vec objectives:
skip-gram trains the center word's vector against each context word;
CBOW averages the context vectors and trains them against the center
word.  Negatives are drawn from the unigram distribution raised to
3/4.  Single-worker training with a fixed seed is bit-reproducible;
multi-worker training performs unsynchronized (hogwild) updates and
varies run to run.

Context windows never cross sentence boundaries.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .vectors import EmbeddingMatrix

LR_FLOOR_FRACTION = 1e-4  # linear decay ends at this fraction of the initial rate
_NEG_BLOCK = 8192


class EmptyVocab(ValueError):
    """No token survives the minimum-count cutoff."""


@dataclass
class TrainConfig:
    """Shared training knobs for skip-gram, CBOW and GloVe.

    ``window``, ``epochs`` and ``learning_rate`` default per
    architecture when left as None: window 5 (word2vec) / 10 (GloVe),
    epochs 5 (word2vec) / 15 (GloVe), learning rate 0.025 (skip-gram) /
    0.05 (CBOW, GloVe).
    """

    dim: int = 300
    window: int | None = None
    min_count: int = 5
    architecture: str = "skipgram"
    negative_samples: int = 5
    epochs: int | None = None
    learning_rate: float | None = None
    seed: int = 0
    symmetric_context: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.dim < 1 or self.min_count < 1 or self.negative_samples < 0:
            raise ValueError("dim, min_count must be >= 1 and negative_samples >= 0")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")
        if self.architecture not in ("skipgram", "cbow", "glove"):
            raise ValueError(f"unknown architecture {self.architecture!r}")

    @property
    def resolved_window(self) -> int:
        if self.window is not None:
            return self.window
        return 10 if self.architecture == "glove" else 5

    @property
    def resolved_epochs(self) -> int:
        if self.epochs is not None:
            return self.epochs
        return 15 if self.architecture == "glove" else 5

    @property
    def resolved_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return 0.025 if self.architecture == "skipgram" else 0.05


def build_vocab(corpus: Sequence[list[str]], min_count: int = 5) -> list[tuple[str, int]]:
    """Tokens with count >= min_count, ordered by count desc then lexicographic."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: dict[str, int] = {}
    for sentence in corpus:
        for token in sentence:
            counts[token] = counts.get(token, 0) + 1
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    if not kept:
        raise EmptyVocab(f"no token occurs at least {min_count} times")
    kept.sort(key=lambda item: (-item[1], item[0]))
    return kept


# ---------------------------------------------------------------------------
# Per-update loss and gradients (the exact quantities the trainers apply;
# finite-difference tests pin them)
# ---------------------------------------------------------------------------

def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def negative_sampling_loss(center: np.ndarray, outputs: np.ndarray, labels: np.ndarray) -> float:
    """-sum_i [y_i log s(u_i.v) + (1-y_i) log s(-u_i.v)] for one training pair.

    ``outputs`` stacks the positive target row (label 1) and the
    negative rows (label 0).
    """
    scores = outputs @ center
    signs = 1.0 - 2.0 * labels
    return float(np.sum(np.logaddexp(0.0, signs * scores)))


def negative_sampling_gradients(
    center: np.ndarray, outputs: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`negative_sampling_loss` wrt center and outputs."""
    scores = outputs @ center
    residual = _sigmoid(scores) - labels
    grad_center = residual @ outputs
    grad_outputs = np.outer(residual, center)
    return grad_center, grad_outputs


def cbow_loss(contexts: np.ndarray, outputs: np.ndarray, labels: np.ndarray) -> float:
    """Negative-sampling loss with the center replaced by the context mean."""
    return negative_sampling_loss(contexts.mean(axis=0), outputs, labels)


def cbow_gradients(
    contexts: np.ndarray, outputs: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of :func:`cbow_loss` wrt each context row and the output rows."""
    h = contexts.mean(axis=0)
    grad_h, grad_outputs = negative_sampling_gradients(h, outputs, labels)
    grad_contexts = np.tile(grad_h / contexts.shape[0], (contexts.shape[0], 1))
    return grad_contexts, grad_outputs


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

class _NegativeSampler:
    """Block-buffered draws from the unigram^(3/4) noise distribution."""

    def __init__(self, counts: np.ndarray, rng: np.random.Generator):
        noise = counts.astype(np.float64) ** 0.75
        self._cum = np.cumsum(noise / noise.sum())
        self._cum[-1] = 1.0
        self._rng = rng
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0

    def draw(self, n: int) -> np.ndarray:
        if self._pos + n > len(self._buf):
            self._buf = np.searchsorted(self._cum, self._rng.random(_NEG_BLOCK))
            self._pos = 0
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out


def _encode_sentences(corpus, index):
    encoded = []
    for sentence in corpus:
        ids = [index[t] for t in sentence if t in index]
        if ids:
            encoded.append(np.asarray(ids, dtype=np.int64))
    return encoded


def _count_updates(sentences, window, cbow):
    total = 0
    for ids in sentences:
        length = len(ids)
        if cbow:
            total += sum(1 for t in range(length) if min(t, window) + min(length - 1 - t, window) > 0)
        else:
            total += sum(min(t, window) + min(length - 1 - t, window) for t in range(length))
    return total


def _train_word2vec(corpus, cfg: TrainConfig, cbow: bool) -> EmbeddingMatrix:
    vocab = build_vocab(corpus, cfg.min_count)
    tokens = [t for t, _ in vocab]
    counts = np.asarray([c for _, c in vocab], dtype=np.float64)
    index = {t: i for i, t in enumerate(tokens)}
    sentences = _encode_sentences(corpus, index)

    rng = np.random.default_rng(cfg.seed)
    dim = cfg.dim
    w_in = (rng.random((len(tokens), dim)) - 0.5) / dim
    w_out = np.zeros((len(tokens), dim))

    window = cfg.resolved_window
    epochs = cfg.resolved_epochs
    lr0 = cfg.resolved_learning_rate
    per_epoch = _count_updates(sentences, window, cbow)
    total = max(1, per_epoch * epochs)
    progress = [0]

    def run(sents, sampler):
        k = cfg.negative_samples
        labels_full = np.zeros(k + 1)
        labels_full[0] = 1.0
        for _ in range(epochs):
            for ids in sents:
                length = len(ids)
                for t in range(length):
                    lo = max(0, t - window)
                    hi = min(length, t + window + 1)
                    context = [ids[p] for p in range(lo, hi) if p != t]
                    if not context:
                        continue
                    if cbow:
                        target = ids[t]
                        negs = sampler.draw(k)
                        rows = [target] + [n for n in negs if n != target]
                        out_ids = np.asarray(rows, dtype=np.int64)
                        labels = labels_full[: len(rows)]
                        ctx_ids = np.asarray(context, dtype=np.int64)
                        ctx = w_in[ctx_ids]
                        grad_ctx, grad_out = cbow_gradients(ctx, w_out[out_ids], labels)
                        lr = lr0 * max(LR_FLOOR_FRACTION, 1.0 - progress[0] / total)
                        np.add.at(w_out, out_ids, -lr * grad_out)
                        np.add.at(w_in, ctx_ids, -lr * grad_ctx)
                        progress[0] += 1
                    else:
                        center = ids[t]
                        for ctx_id in context:
                            negs = sampler.draw(k)
                            rows = [ctx_id] + [n for n in negs if n != ctx_id]
                            out_ids = np.asarray(rows, dtype=np.int64)
                            labels = labels_full[: len(rows)]
                            v = w_in[center]
                            grad_c, grad_out = negative_sampling_gradients(
                                v, w_out[out_ids], labels
                            )
                            lr = lr0 * max(LR_FLOOR_FRACTION, 1.0 - progress[0] / total)
                            np.add.at(w_out, out_ids, -lr * grad_out)
                            w_in[center] -= lr * grad_c
                            progress[0] += 1

    if cfg.workers <= 1:
        run(sentences, _NegativeSampler(counts, rng))
    else:
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.workers)
        shards = [sentences[i :: cfg.workers] for i in range(cfg.workers)]
        threads = [
            threading.Thread(
                target=run, args=(shard, _NegativeSampler(counts, np.random.default_rng(s)))
            )
            for shard, s in zip(shards, seeds)
        ]
        for th in threads:
            th.start()
        for th in threads:
            th.join()

    return EmbeddingMatrix(tokens, w_in)


def train_skipgram(corpus: Sequence[list[str]], cfg: TrainConfig | None = None) -> EmbeddingMatrix:
    """Train skip-gram vectors; matrix rows follow the vocab order of build_vocab."""
    cfg = cfg or TrainConfig(architecture="skipgram")
    return _train_word2vec(corpus, cfg, cbow=False)


def train_cbow(corpus: Sequence[list[str]], cfg: TrainConfig | None = None) -> EmbeddingMatrix:
    """Train CBOW vectors; matrix rows follow the vocab order of build_vocab."""
    cfg = cfg or TrainConfig(architecture="cbow")
    return _train_word2vec(corpus, cfg, cbow=True)
