"""Raw text -> cleaned, lemmatized, lowercase token stream.

A token stream is a list of sentences, each sentence a list of tokens.
The pipeline is tokenize -> clean -> lemmatize; after it, every token
matches ``[a-z]+``, is not a stopword, and is a fixed point of the
lemmatizer.  All functions are pure and safe to run in parallel over
documents.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

TokenStream = list[list[str]]

_SENTENCE_TERMINATORS = frozenset(".!?")
_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class RawDocument:
    """One ingestion unit: an opaque id plus unicode text (may be empty)."""

    id: str
    text: str


def _is_token_char(ch: str) -> bool:
    # Token boundaries are whitespace and Unicode punctuation; symbols
    # (emoji, currency signs) stay inside tokens and are dropped later
    # by clean().
    if ch.isspace():
        return False
    return not unicodedata.category(ch).startswith("P")


def tokenize(doc: RawDocument | str) -> TokenStream:
    """Split raw text into sentences of tokens, casing preserved.

    Sentences end at runs of terminal punctuation (``. ! ?``); tokens
    are maximal runs of non-whitespace, non-punctuation characters, so
    hyphenated forms split into their parts.  Empty input yields an
    empty stream.
    """
    text = doc.text if isinstance(doc, RawDocument) else doc
    sentences: TokenStream = []
    sentence: list[str] = []
    token: list[str] = []

    def flush_token():
        if token:
            sentence.append("".join(token))
            token.clear()

    def flush_sentence():
        flush_token()
        if sentence:
            sentences.append(list(sentence))
            sentence.clear()

    for ch in text:
        if ch in _SENTENCE_TERMINATORS:
            flush_sentence()
        elif _is_token_char(ch):
            token.append(ch)
        else:
            flush_token()
    flush_sentence()
    return sentences


def clean(stream: TokenStream, stops: Iterable[str] = ()) -> TokenStream:
    """Lowercase tokens, drop non-alphabetic ones and stopwords.

    A token containing any character outside ``a-z``/``A-Z`` is dropped
    entirely (numbers, emoji, accented forms), keeping the output
    alphabet strictly ``[a-z]+``.  Stopwords are matched after
    lowercasing.  Sentence structure and token order are preserved;
    sentences left empty are removed.  Idempotent.
    """
    stopset = stops if isinstance(stops, (set, frozenset)) else set(stops)
    out: TokenStream = []
    for sentence in stream:
        kept = [
            tok.lower()
            for tok in sentence
            if tok.isascii() and tok.isalpha() and tok.lower() not in stopset
        ]
        if kept:
            out.append(kept)
    return out


class Lemmatizer:
    """Rule-based English suffix stripper with an exception table.

    Rules cover plural ``-s``/``-es``/``-ies``, past ``-ed`` and
    progressive ``-ing`` (with doubled-consonant undoubling and
    silent-e restoration); the exception table handles irregular forms
    and protects words the rules would mangle.  Rules are applied to a
    fixed point, so the map is idempotent by construction.
    """

    def __init__(self, exceptions: dict[str, str] | None = None):
        self.exceptions = dict(exceptions or {})

    def lemma(self, word: str) -> str:
        seen = set()
        current = word
        while current not in seen:
            seen.add(current)
            hit = self.exceptions.get(current)
            if hit is not None:
                return hit
            reduced = _strip_suffix_once(current)
            if reduced == current:
                return current
            current = reduced
        return current

    def __call__(self, word: str) -> str:
        return self.lemma(word)


def _measure(stem: str) -> int:
    # Number of vowel->consonant transitions; distinguishes one-syllable
    # stems that need a restored silent e ("mak" -> "make") from longer
    # ones that do not ("order").
    m = 0
    prev_vowel = False
    for ch in stem:
        is_vowel = ch in _VOWELS
        if prev_vowel and not is_vowel:
            m += 1
        prev_vowel = is_vowel
    return m


def _has_vowel(stem: str) -> bool:
    return any(ch in _VOWELS for ch in stem)


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    c1, v, c2 = stem[-3], stem[-2], stem[-1]
    return c1 not in _VOWELS and v in _VOWELS and c2 not in _VOWELS and c2 not in "wxy"


def _restore_stem(stem: str) -> str:
    # After -ing/-ed removal: undouble a doubled final consonant
    # ("runn" -> "run") except ll/ss/zz, else restore a silent e on
    # short CVC stems ("mak" -> "make").
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in "lsz"
    ):
        return stem[:-1]
    if _ends_cvc(stem) and _measure(stem) == 1:
        return stem + "e"
    return stem


def _strip_suffix_once(word: str) -> str:
    n = len(word)
    if word.endswith("ies") and n >= 4:
        stem = word[:-3]
        return stem + "y" if len(stem) >= 2 else word[:-1]
    if word.endswith("ied") and n >= 4:
        stem = word[:-3]
        return stem + "y" if len(stem) >= 2 else word[:-1]
    if n >= 5 and word.endswith(("sses", "xes", "ches", "shes")):
        return word[:-2]
    if n >= 5 and word.endswith("zzes"):
        return word[:-3]
    if n >= 6 and word.endswith("oes"):
        return word[:-2]
    if word.endswith("ing") and n >= 6 and _has_vowel(word[:-3]):
        return _restore_stem(word[:-3])
    if word.endswith("ed") and n >= 5 and not word.endswith("eed") and _has_vowel(word[:-2]):
        return _restore_stem(word[:-2])
    if (
        word.endswith("s")
        and n >= 4
        and not word.endswith(("ss", "us", "is"))
    ):
        return word[:-1]
    return word


def lemmatize(stream: TokenStream, lemmatizer: Lemmatizer | None = None) -> TokenStream:
    """Replace each token by its lemma. Expects a cleaned stream; idempotent."""
    lem = lemmatizer if lemmatizer is not None else default_lemmatizer()
    return [[lem.lemma(tok) for tok in sentence] for sentence in stream]


def preprocess(
    doc: RawDocument | str,
    stops: Iterable[str] | None = None,
    lemmatizer: Lemmatizer | None = None,
) -> TokenStream:
    """Full cleaning pipeline for one document.

    Tokenizes, cleans, lemmatizes, then re-applies the stopword filter
    (a lemma may land on a stopword even when the inflected form did
    not).
    """
    stopset = set(load_stopwords() if stops is None else stops)
    lem = lemmatizer if lemmatizer is not None else default_lemmatizer()
    stream = lemmatize(clean(tokenize(doc), stopset), lem)
    return clean(stream, stopset)


# ---------------------------------------------------------------------------
# Data files and corpus I/O
# ---------------------------------------------------------------------------

def packaged_text(name: str) -> str:
    """Raw text of a packaged data file (stopwords, lemma exceptions, lexicon)."""
    return resources.files("lexhier.data").joinpath(name).read_text(encoding="utf-8")


_packaged = packaged_text


def load_stopwords(path: str | Path | None = None) -> set[str]:
    """Stopword list, one lowercase word per line; packaged default if no path."""
    text = Path(path).read_text(encoding="utf-8") if path else _packaged("stopwords.txt")
    return {line.strip() for line in text.splitlines() if line.strip()}


def load_lemma_exceptions(path: str | Path | None = None) -> dict[str, str]:
    """Exception table, one ``form lemma`` pair per line; packaged default if no path."""
    text = Path(path).read_text(encoding="utf-8") if path else _packaged("lemma_exceptions.txt")
    table: dict[str, str] = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ValueError(f"malformed lemma exception line: {line!r}")
        table[parts[0]] = parts[1]
    return table


def default_lemmatizer() -> Lemmatizer:
    return Lemmatizer(load_lemma_exceptions())


def read_corpus(path: str | Path) -> Iterator[RawDocument]:
    """Yield documents from a newline-delimited file or a directory of .txt files."""
    path = Path(path)
    if path.is_dir():
        for file in sorted(path.glob("*.txt")):
            yield RawDocument(id=file.stem, text=file.read_text(encoding="utf-8"))
    else:
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle):
                yield RawDocument(id=str(lineno), text=line.rstrip("\n"))


def read_token_file(path: str | Path) -> TokenStream:
    """Read a preprocessed corpus: one sentence per line, tokens space-separated."""
    stream: TokenStream = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens = line.split()
            if tokens:
                stream.append(tokens)
    return stream


def write_token_file(path: str | Path, stream: TokenStream) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for sentence in stream:
            handle.write(" ".join(sentence) + "\n")
