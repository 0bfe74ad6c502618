#!/usr/bin/env python3
"""From flat clusters to a labeled concept tree.

The cut clusters are exported to a hand-editable review file; a
reviewer names each cluster and can exclude badly merged members with a
'!' line.  Building the tree keeps labeled clusters as leaves and
mirrors the dendrogram's merge structure above them.
"""

import numpy as np

from lexhier import (
    EmbeddingMatrix,
    agglomerate,
    build_concept_tree,
    classify_lookup,
    cut,
    export_review,
    import_review,
    pairwise_distances,
)

# three semantic groups, with one oddball we will exclude by hand
words = ["ale", "lager", "stout", "espresso", "latte", "mocha", "fork", "spoon", "knife"]
coords = np.array(
    [[0.0], [0.3], [0.6],        # beers
     [5.0], [5.3], [5.6],        # coffees
     [20.0], [20.3], [11.0]]     # cutlery, with "knife" drifted toward coffee
)
emb = EmbeddingMatrix(words, coords)
dist = pairwise_distances(emb, words, metric="euclidean")
dend = agglomerate(dist, linkage="average")
dend.labels = words

labels = cut(dend, 3)
review = export_review(labels, dend, dist)
print("exported review file:")
print(review.format_text())

# the reviewer names the clusters and kicks "knife" out of the cluster
# it drifted into, by adding a "!knife" line under its member line
review.save("/tmp/demo_review.txt")
text = open("/tmp/demo_review.txt").read()
text = text.replace("# cluster 0:", "# cluster 0: beers")
text = text.replace("# cluster 1:", "# cluster 1: coffees")
text = text.replace("# cluster 2:", "# cluster 2: cutlery")
text = text.replace("\nknife\n", "\nknife\n!knife\n")
open("/tmp/demo_review.txt", "w").write(text)

labeled = import_review("/tmp/demo_review.txt")
tree = build_concept_tree(labeled, dend)
print("concept tree outline:")
print(tree.to_outline())

for word in ["stout", "latte", "knife", "napkin"]:
    path = classify_lookup(tree, word)
    shown = " > ".join(path) if path else "(not in the tree)"
    print(f"{word:8s} {shown}")
