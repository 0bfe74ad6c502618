#!/usr/bin/env python3
"""Classify unseen word vectors into discovered concepts.

Three classifiers over the same labeled vectors: a two-hidden-layer
feed-forward network, k-nearest-neighbor voting, and a random forest.
Held-out words from each concept test generalization; the trained
models survive a save/load round trip with identical predictions.
"""

import numpy as np

from lexhier import LabeledDataset, evaluate, split, train_knn, train_mlp, train_random_forest
from lexhier.classify import load_model, save_model

rng = np.random.default_rng(11)

# three concept regions in a 6-dimensional vector space
names = ["beverage", "dessert", "staff"]
centers = rng.normal(size=(3, 6)) * 3.0
x = np.concatenate([c + rng.normal(0, 0.5, (40, 6)) for c in centers])
y = np.repeat(np.arange(3), 40)
dataset = LabeledDataset(x, y, names)

train, test = split(dataset, train_fraction=0.8, seed=2)
print(f"{len(train)} training / {len(test)} held-out examples\n")

models = {
    "neural net": train_mlp(train, epochs=200, learning_rate=0.5, seed=0, hidden=(300, 300)),
    "5-nn": train_knn(train, k=5, metric="euclidean"),
    "random forest": train_random_forest(train, n_trees=100, seed=0),
}

print(f"{'classifier':14s} {'accuracy':>8s} {'precision':>9s} {'recall':>7s} {'f1':>7s}")
for name, model in models.items():
    r = evaluate(model, test)
    print(f"{name:14s} {r.accuracy:8.3f} {r.precision:9.3f} {r.recall:7.3f} {r.f1:7.3f}")

# a brand-new vector near the dessert region
query = centers[1] + rng.normal(0, 0.5, 6)
votes = {name: names[int(m.predict(query[None, :])[0])] for name, m in models.items()}
print("\nunseen vector classified as:", votes)

# model files reload to the exact same predictor
save_model(models["random forest"], "/tmp/demo_forest.json")
reloaded = load_model("/tmp/demo_forest.json")
assert np.array_equal(reloaded.predict(test.x), models["random forest"].predict(test.x))
print("random forest round-tripped through /tmp/demo_forest.json")
