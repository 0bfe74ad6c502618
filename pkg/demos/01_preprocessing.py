#!/usr/bin/env python3
"""Walk through the text cleaning pipeline step by step.

Raw review text goes through three stages: sentence/token splitting,
cleaning (lowercase, drop non-alphabetic tokens and stopwords), and
rule-based lemmatization.  After the full pipeline every surviving
token is a lowercase alphabetic lemma.
"""

from lexhier import RawDocument, clean, lemmatize, preprocess, tokenize
from lexhier.preprocess import default_lemmatizer, load_stopwords

review = RawDocument(
    id="r042",
    text="The dishes were AMAZING!! Waitresses kept refilling our glasses... "
    "Prices went up 20% since 2023 :( but the wi-fi works.",
)

print("raw text:")
print(f"  {review.text}\n")

# stage 1: sentences and tokens, casing still intact
stream = tokenize(review)
print("tokenized sentences:")
for sentence in stream:
    print(f"  {sentence}")

# stage 2: lowercase, strip numbers/emoji, drop stopwords
stops = load_stopwords()
cleaned = clean(stream, stops)
print("\nafter cleaning (note: '20%', '2023', ':(' are gone):")
for sentence in cleaned:
    print(f"  {sentence}")

# stage 3: inflected forms collapse to their lemmas
lemmas = lemmatize(cleaned)
print("\nafter lemmatization:")
for sentence in lemmas:
    print(f"  {sentence}")

# the lemmatizer is idempotent: applying it twice changes nothing
assert lemmatize(lemmas) == lemmas

# single words, for a feel of the rule table
lem = default_lemmatizer()
print("\nselected lemma mappings:")
for word in ["dishes", "running", "berries", "tomatoes", "menus", "children", "went"]:
    print(f"  {word:10s} -> {lem.lemma(word)}")

# one call does all three stages (and re-checks stopwords afterwards)
print("\npreprocess() output:", preprocess(review))
