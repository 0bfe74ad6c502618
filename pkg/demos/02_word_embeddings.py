#!/usr/bin/env python3
"""Train skip-gram, CBOW and GloVe vectors on a tiny themed corpus.

The corpus interleaves three word families (beverages, desserts,
staff).  All three objectives should place same-family words closer
together than cross-family ones, visible in the cosine similarities.
"""

import numpy as np

from lexhier import TrainConfig, build_cooccurrence, cosine_similarity
from lexhier import train_cbow, train_glove, train_skipgram

rng = np.random.default_rng(0)

FAMILIES = {
    "beverage": ["coffee", "tea", "juice", "soda", "wine", "beer"],
    "dessert": ["cake", "pie", "brownie", "sorbet", "waffle", "custard"],
    "staff": ["waiter", "chef", "host", "manager", "server", "bartender"],
}

sentences = []
for _ in range(600):
    family = list(FAMILIES)[int(rng.integers(3))]
    words = rng.choice(FAMILIES[family], size=5, replace=True)
    sentences.append(list(words))

cfg = TrainConfig(dim=24, window=4, min_count=1, epochs=4, seed=1)

models = {
    "skip-gram": train_skipgram(sentences, cfg),
    "cbow": train_cbow(
        sentences, TrainConfig(dim=24, window=4, min_count=1, epochs=4, seed=1, architecture="cbow")
    ),
}
cooc = build_cooccurrence(sentences, window=4, symmetric=True)
models["glove"] = train_glove(
    cooc, TrainConfig(dim=24, architecture="glove", epochs=20, seed=1)
)

for name, emb in models.items():
    same = cosine_similarity(emb.vector("coffee"), emb.vector("tea"))
    cross = cosine_similarity(emb.vector("coffee"), emb.vector("waiter"))
    print(f"{name:9s}  sim(coffee, tea) = {same:+.3f}   sim(coffee, waiter) = {cross:+.3f}")

# vectors survive a text-file round trip (9 significant digits)
emb = models["skip-gram"]
emb.save("/tmp/demo_vectors.txt")
from lexhier import EmbeddingMatrix

reloaded = EmbeddingMatrix.load("/tmp/demo_vectors.txt")
print("\nround-trip max error:", np.abs(reloaded.vectors - emb.vectors).max())

# nearest neighbors of "wine" under the skip-gram model
sims = sorted(
    ((cosine_similarity(emb.vector("wine"), emb.vector(w)), w) for w in emb.vocab if w != "wine"),
    reverse=True,
)
print("closest to 'wine':", [w for _, w in sims[:4]])
