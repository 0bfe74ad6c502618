"""Embedding matrices: vocabulary-indexed dense vectors with text-file I/O.

The file format is one header line ``<vocab_size> <dim>`` followed by
one ``<token> <v1> ... <vdim>`` line per word, space-separated decimal
floats at 9 significant digits.  A save -> load -> save cycle is
byte-stable.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class ZeroVector(ValueError):
    """Cosine similarity is undefined for a zero-norm vector."""


class MalformedHeader(ValueError):
    """Vector file does not start with a ``<vocab_size> <dim>`` line."""


class DimensionMismatch(ValueError):
    """A vector row does not match the header dimension."""


class DuplicateToken(ValueError):
    """The same token appears twice in a vocabulary."""


class EmbeddingMatrix:
    """Ordered vocabulary plus an ``n x d`` float64 matrix of word vectors."""

    def __init__(self, vocab: Sequence[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(vocab):
            raise DimensionMismatch(
                f"vectors shape {vectors.shape} does not match vocab of {len(vocab)}"
            )
        if vectors.shape[1] < 1:
            raise DimensionMismatch("vector dimension must be >= 1")
        self.vocab = list(vocab)
        self.vectors = vectors
        self.index = {}
        for i, token in enumerate(self.vocab):
            if token in self.index:
                raise DuplicateToken(token)
            self.index[token] = i

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]

    def subset(self, tokens: Iterable[str]) -> "EmbeddingMatrix":
        """Restrict to the given tokens, keeping their order; unknown tokens error."""
        tokens = list(tokens)
        rows = [self.index[t] for t in tokens]
        return EmbeddingMatrix(tokens, self.vectors[rows].copy())

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"{len(self.vocab)} {self.dim}\n")
            for token, row in zip(self.vocab, self.vectors):
                values = " ".join(format(v, ".9g") for v in row)
                handle.write(f"{token} {values}\n")

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingMatrix":
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().split()
            if len(header) != 2:
                raise MalformedHeader(f"expected '<vocab_size> <dim>', got {header!r}")
            try:
                n, dim = int(header[0]), int(header[1])
            except ValueError as err:
                raise MalformedHeader(str(err)) from None
            vocab = []
            vectors = np.empty((n, dim), dtype=np.float64)
            for i in range(n):
                parts = handle.readline().split()
                if len(parts) != dim + 1:
                    raise DimensionMismatch(
                        f"row {i}: expected {dim} values, got {len(parts) - 1}"
                    )
                vocab.append(parts[0])
                vectors[i] = [float(x) for x in parts[1:]]
        return cls(vocab, vectors)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), in [-1, 1]. Raises :class:`ZeroVector` on zero norms."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vector")
    return float(np.dot(u, v) / (nu * nv))


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cosine similarity, in [0, 2]."""
    return 1.0 - cosine_similarity(u, v)
