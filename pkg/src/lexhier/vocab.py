"""Frequent-noun extraction and candidate-based keyword filtering.

Counts tokens over a preprocessed corpus, keeps the top-k nouns under a
pluggable part-of-speech predicate, then filters them down to
domain-relevant keywords by cosine distance to a small set of candidate
words (default: restaurant, food, beverage).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .embedding.vectors import EmbeddingMatrix

# A tagger is a predicate: True when the token is a noun.
PosTagger = Callable[[str], bool]

DEFAULT_CANDIDATES = ("restaurant", "food", "beverage")
DEFAULT_THRESHOLD = 0.5

# Derivational suffixes that mark a token as a likely noun when it is
# not in the lexicon.
DEFAULT_NOUN_SUFFIXES = (
    "tion", "sion", "ment", "ness", "ity", "ance", "ence",
    "ship", "hood", "ism", "ist", "age", "ery", "eria", "ette",
)


class MissingCandidate(KeyError):
    """A configured candidate word has no vector in the embedding."""


@dataclass
class CandidateFilterConfig:
    candidates: tuple[str, ...] = DEFAULT_CANDIDATES
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidate set must be non-empty")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")


def count_frequencies(corpus: Iterable[list[str]]) -> Counter:
    """Exact token counts over an iterable of token sentences."""
    counts: Counter = Counter()
    for sentence in corpus:
        counts.update(sentence)
    return counts


def top_k_nouns(freq: Counter, tagger: PosTagger, k: int) -> list[str]:
    """The k highest-count noun tokens, ties broken lexicographically.

    Returns fewer than k when the supply of nouns is short.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(freq.items(), key=lambda item: (-item[1], item[0]))
    out = []
    for token, _ in ranked:
        if tagger(token):
            out.append(token)
            if len(out) == k:
                break
    return out


def filter_by_candidates(
    nouns: list[str],
    emb: EmbeddingMatrix,
    cfg: CandidateFilterConfig | None = None,
) -> list[str]:
    """Keep nouns whose minimum cosine distance to any candidate is below the threshold.

    Nouns absent from the embedding vocabulary are dropped; order is
    preserved.  Raises :class:`MissingCandidate` when a candidate has no
    vector.
    """
    cfg = cfg or CandidateFilterConfig()
    missing = [c for c in cfg.candidates if c not in emb]
    if missing:
        raise MissingCandidate(f"candidates without vectors: {missing}")
    cand = np.stack([emb.vector(c) for c in cfg.candidates])
    cand_norm = cand / np.linalg.norm(cand, axis=1, keepdims=True)

    kept = []
    for word in nouns:
        if word not in emb:
            continue
        v = emb.vector(word)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        dist = 1.0 - cand_norm @ (v / norm)
        if dist.min() < cfg.threshold:
            kept.append(word)
    return kept


# ---------------------------------------------------------------------------
# Taggers
# ---------------------------------------------------------------------------

@dataclass
class LexiconTagger:
    """Lexicon-plus-suffix noun tagger, deterministic per token.

    A token is a noun when it appears in the lexicon, ends in a common
    noun suffix, or (when a frequency table and floor are supplied)
    occurs at least ``freq_floor`` times.
    """

    lexicon: frozenset[str]
    suffixes: tuple[str, ...] = DEFAULT_NOUN_SUFFIXES
    freq: Counter | None = None
    freq_floor: int | None = None

    def __call__(self, token: str) -> bool:
        if token in self.lexicon:
            return True
        if token.endswith(self.suffixes):
            return True
        if self.freq is not None and self.freq_floor is not None:
            return self.freq.get(token, 0) >= self.freq_floor
        return False


@dataclass
class PretaggedTagger:
    """Tagger built from a pre-tagged corpus (``token/TAG`` format).

    A token is a noun when its majority tag starts with N; ties go to
    noun.
    """

    noun_votes: dict[str, int] = field(default_factory=dict)
    other_votes: dict[str, int] = field(default_factory=dict)

    def add(self, token: str, tag: str) -> None:
        votes = self.noun_votes if tag.upper().startswith("N") else self.other_votes
        votes[token] = votes.get(token, 0) + 1

    def __call__(self, token: str) -> bool:
        noun = self.noun_votes.get(token, 0)
        return noun > 0 and noun >= self.other_votes.get(token, 0)


def all_nouns(_token: str) -> bool:
    """Degenerate tagger treating every token as a noun."""
    return True


def load_noun_lexicon(path: str | Path | None = None) -> frozenset[str]:
    """Noun lexicon, one token per line; packaged default if no path."""
    if path:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("lexhier.data").joinpath("noun_lexicon.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def default_tagger() -> LexiconTagger:
    return LexiconTagger(lexicon=load_noun_lexicon())


def read_pretagged(path: str | Path) -> PretaggedTagger:
    """Build a tagger from a whitespace-separated ``token/TAG`` corpus file."""
    tagger = PretaggedTagger()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            for pair in line.split():
                token, sep, tag = pair.rpartition("/")
                if not sep or not token:
                    raise ValueError(f"malformed token/TAG pair: {pair!r}")
                tagger.add(token, tag)
    return tagger
