#!/usr/bin/env python3
"""Pick the number of clusters by sweeping silhouette over dendrogram cuts.

For each candidate k the dendrogram is cut into k flat clusters and the
average silhouette (cohesion vs separation, in [-1, 1]) is computed;
the k with the highest average wins.  Four planted groups -> the curve
peaks at k = 4.
"""

import numpy as np

from lexhier import (
    EmbeddingMatrix,
    agglomerate,
    average_silhouette,
    cut,
    pairwise_distances,
    silhouette_point,
    sweep_k,
)

rng = np.random.default_rng(5)

# four well-separated 2-D blobs, 8 points each
centers = np.array([[0.0, 0.0], [8.0, 0.0], [0.0, 8.0], [8.0, 8.0]])
points = np.concatenate([c + rng.normal(0, 0.4, (8, 2)) for c in centers])
words = [f"w{i:02d}" for i in range(len(points))]
emb = EmbeddingMatrix(words, points)

dist = pairwise_distances(emb, words, metric="euclidean")
dend = agglomerate(dist, linkage="average")

result = sweep_k(dend, dist, k_min=2, k_max=10)
print(" k   average silhouette")
for k, avg in result.curve.items():
    marker = "  <- best" if k == result.best_k else ""
    print(f"{k:2d}   {avg:+.4f}{marker}")

labels = cut(dend, result.best_k)
print("\ncluster sizes at best k:", np.bincount(labels).tolist())

# per-point values: points deep inside a blob score near 1
s0 = silhouette_point(0, labels, dist)
print(f"s(point 0) = {s0:.4f}")
print("average    =", round(average_silhouette(labels, dist), 4))
