"""Classifiers that map word vectors to concept labels, plus evaluation.

Three models: a feed-forward network with two hidden layers trained by
full-batch gradient descent on cross-entropy, a k-nearest-neighbor
voter, and a random forest of Gini-split trees on bootstrap samples.
All are deterministic for a fixed seed, and all survive a save/load
round trip with identical predictions.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding.vectors import ZeroVector
from .hierarchy import ConceptTree


class EmptyDataset(ValueError):
    """No examples to train or evaluate on."""


class KExceedsData(ValueError):
    """kNN needs k <= number of training examples."""


class ClassTooSmall(UserWarning):
    """A class is too small to stratify; it is split unstratified."""


@dataclass
class LabeledDataset:
    """Vectors with integer concept labels; ``label_names[i]`` names class i."""

    x: np.ndarray
    y: np.ndarray
    label_names: list[str]

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.ndim != 2 or len(self.x) != len(self.y):
            raise ValueError("x must be (n, d) with one label per row")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= len(self.label_names)):
            raise ValueError("labels must index into label_names")

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.x[idx], self.y[idx], self.label_names)


def dataset_from_concepts(tree: ConceptTree, emb) -> LabeledDataset:
    """One example per leaf member that has a vector; classes follow leaf order."""
    leaves = tree.leaves()
    names = [leaf.label for leaf in leaves]
    xs, ys = [], []
    for class_id, leaf in enumerate(leaves):
        for token in leaf.members:
            if token in emb:
                xs.append(emb.vector(token))
                ys.append(class_id)
    if not xs:
        raise EmptyDataset("no concept member has a vector")
    return LabeledDataset(np.stack(xs), np.asarray(ys), names)


def split(
    dataset: LabeledDataset, train_fraction: float = 0.8, seed: int = 0
) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified train/test split, deterministic for a fixed seed.

    Classes with a single example cannot be stratified; they are pooled
    and split at the global fraction with a :class:`ClassTooSmall`
    warning.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    if len(dataset) == 0:
        raise EmptyDataset("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    pool: list[int] = []
    for label in np.unique(dataset.y):
        idx = np.flatnonzero(dataset.y == label)
        if len(idx) < 2:
            warnings.warn(
                f"class {dataset.label_names[label]!r} has {len(idx)} example(s); "
                "splitting unstratified",
                ClassTooSmall,
                stacklevel=2,
            )
            pool.extend(int(i) for i in idx)
            continue
        idx = rng.permutation(idx)
        n_train = int(round(train_fraction * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train_idx.extend(int(i) for i in idx[:n_train])
        test_idx.extend(int(i) for i in idx[n_train:])
    if pool:
        pool_arr = rng.permutation(np.asarray(pool))
        n_train = int(round(train_fraction * len(pool_arr)))
        train_idx.extend(int(i) for i in pool_arr[:n_train])
        test_idx.extend(int(i) for i in pool_arr[n_train:])
    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))


# ---------------------------------------------------------------------------
# Feed-forward network
# ---------------------------------------------------------------------------

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def mlp_forward(params: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Class probabilities; params alternate weight matrices and bias rows."""
    h = x
    n_layers = len(params) // 2
    for layer in range(n_layers):
        z = h @ params[2 * layer] + params[2 * layer + 1]
        h = np.maximum(z, 0.0) if layer < n_layers - 1 else z
    return _softmax(h)


def mlp_loss_and_gradients(
    params: list[np.ndarray], x: np.ndarray, y: np.ndarray
) -> tuple[float, list[np.ndarray]]:
    """Mean cross-entropy and its gradients wrt every parameter array."""
    n_layers = len(params) // 2
    pre: list[np.ndarray] = []
    post = [x]
    h = x
    for layer in range(n_layers):
        z = h @ params[2 * layer] + params[2 * layer + 1]
        pre.append(z)
        h = np.maximum(z, 0.0) if layer < n_layers - 1 else z
        post.append(h)
    probs = _softmax(h)
    m = len(x)
    loss = float(-np.mean(np.log(probs[np.arange(m), y] + 1e-300)))

    grads: list[np.ndarray] = [np.empty(0)] * len(params)
    delta = probs.copy()
    delta[np.arange(m), y] -= 1.0
    delta /= m
    for layer in range(n_layers - 1, -1, -1):
        grads[2 * layer] = post[layer].T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ params[2 * layer].T) * (pre[layer - 1] > 0.0)
    return loss, grads


class MLPClassifier:
    """d -> hidden -> hidden -> classes, ReLU inside, softmax out."""

    kind = "mlp"

    def __init__(
        self,
        hidden: tuple[int, ...] = (300, 300),
        epochs: int = 300,
        learning_rate: float = 0.5,
        seed: int = 0,
    ):
        self.hidden = tuple(hidden)
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.params: list[np.ndarray] = []
        self.label_names: list[str] = []
        self.loss_history: list[float] = []

    def fit(self, train: LabeledDataset) -> "MLPClassifier":
        if len(train) == 0:
            raise EmptyDataset("cannot train on an empty dataset")
        rng = np.random.default_rng(self.seed)
        sizes = [train.x.shape[1], *self.hidden, len(train.label_names)]
        self.params = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            self.params.append(rng.normal(0.0, math.sqrt(2.0 / fan_in), (fan_in, fan_out)))
            self.params.append(np.zeros(fan_out))
        self.label_names = list(train.label_names)
        self.loss_history = []
        for _ in range(self.epochs):
            loss, grads = mlp_loss_and_gradients(self.params, train.x, train.y)
            self.loss_history.append(loss)
            for p, g in zip(self.params, grads):
                p -= self.learning_rate * g
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return mlp_forward(self.params, np.atleast_2d(np.asarray(x, dtype=np.float64)))

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.predict_proba(x).argmax(axis=1)


def train_mlp(
    train: LabeledDataset,
    epochs: int = 300,
    learning_rate: float = 0.5,
    seed: int = 0,
    hidden: tuple[int, ...] = (300, 300),
) -> MLPClassifier:
    return MLPClassifier(hidden, epochs, learning_rate, seed).fit(train)


# ---------------------------------------------------------------------------
# k nearest neighbors
# ---------------------------------------------------------------------------

class KNNClassifier:
    """Majority vote among the k nearest training vectors.

    Vote ties break toward the candidate with the smaller summed
    distance, then the smaller label id.
    """

    kind = "knn"

    def __init__(self, k: int = 5, metric: str = "cosine"):
        if metric not in ("cosine", "euclidean"):
            raise ValueError("metric must be cosine or euclidean")
        self.k = k
        self.metric = metric
        self.train_x = np.empty((0, 0))
        self.train_y = np.empty(0, dtype=np.int64)
        self.label_names: list[str] = []

    def fit(self, train: LabeledDataset) -> "KNNClassifier":
        if len(train) == 0:
            raise EmptyDataset("cannot train on an empty dataset")
        if self.k > len(train):
            raise KExceedsData(f"k={self.k} exceeds {len(train)} training examples")
        self.train_x = train.x.copy()
        self.train_y = train.y.copy()
        self.label_names = list(train.label_names)
        return self

    def _distances(self, x: np.ndarray) -> np.ndarray:
        if self.metric == "cosine":
            norms_t = np.linalg.norm(self.train_x, axis=1)
            norms_q = np.linalg.norm(x, axis=1)
            if np.any(norms_t == 0.0) or np.any(norms_q == 0.0):
                raise ZeroVector("cosine distance undefined for zero vectors")
            return 1.0 - (x / norms_q[:, None]) @ (self.train_x / norms_t[:, None]).T
        diff = x[:, None, :] - self.train_x[None, :, :]
        return np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        dists = self._distances(x)
        out = np.empty(len(x), dtype=np.int64)
        for q in range(len(x)):
            order = np.argsort(dists[q], kind="stable")[: self.k]
            votes = self.train_y[order]
            cand = {}
            for label, d in zip(votes, dists[q][order]):
                count, total = cand.get(int(label), (0, 0.0))
                cand[int(label)] = (count + 1, total + float(d))
            out[q] = min(
                cand.items(), key=lambda item: (-item[1][0], item[1][1], item[0])
            )[0]
        return out


def train_knn(train: LabeledDataset, k: int = 5, metric: str = "cosine") -> KNNClassifier:
    return KNNClassifier(k=k, metric=metric).fit(train)


def predict_knn(model: KNNClassifier, vector: np.ndarray) -> int:
    return int(model.predict(np.atleast_2d(vector))[0])


# ---------------------------------------------------------------------------
# Random forest
# ---------------------------------------------------------------------------

def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _best_split(x, y, n_classes, features):
    """(feature, threshold, gain) of the best Gini split, or None."""
    n = len(y)
    parent = _gini(np.bincount(y, minlength=n_classes))
    best = None
    best_gain = 0.0
    for f in features:
        order = np.argsort(x[:, f], kind="stable")
        xv = x[order, f]
        yv = y[order]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), yv] = 1.0
        left_counts = np.cumsum(onehot, axis=0)
        boundaries = np.flatnonzero(xv[:-1] != xv[1:])
        for b in boundaries:
            lc = left_counts[b]
            rc = left_counts[-1] - lc
            nl, nr = b + 1, n - b - 1
            weighted = (nl * _gini(lc) + nr * _gini(rc)) / n
            gain = parent - weighted
            if gain > best_gain + 1e-12:
                best_gain = gain
                best = (int(f), float((xv[b] + xv[b + 1]) / 2.0), gain)
    return best


def _build_tree(x, y, n_classes, rng, max_features, min_samples_split):
    counts = np.bincount(y, minlength=n_classes)
    if counts.max() == len(y) or len(y) < min_samples_split:
        return {"leaf": int(np.argmax(counts))}
    features = rng.choice(x.shape[1], size=max_features, replace=False)
    found = _best_split(x, y, n_classes, features)
    if found is None:
        return {"leaf": int(np.argmax(counts))}
    feature, threshold, _ = found
    mask = x[:, feature] <= threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _build_tree(x[mask], y[mask], n_classes, rng, max_features, min_samples_split),
        "right": _build_tree(x[~mask], y[~mask], n_classes, rng, max_features, min_samples_split),
    }


def _tree_predict(node: dict, row: np.ndarray) -> int:
    while "leaf" not in node:
        node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


class RandomForestClassifier:
    """Bagged Gini trees over random sqrt(d)-feature subsets; majority vote."""

    kind = "random_forest"

    def __init__(self, n_trees: int = 100, min_samples_split: int = 2, seed: int = 0):
        if n_trees < 1:
            raise ValueError("need at least one tree")
        self.n_trees = n_trees
        self.min_samples_split = min_samples_split
        self.seed = seed
        self.trees: list[dict] = []
        self.label_names: list[str] = []

    def fit(self, train: LabeledDataset) -> "RandomForestClassifier":
        if len(train) == 0:
            raise EmptyDataset("cannot train on an empty dataset")
        n, d = train.x.shape
        n_classes = len(train.label_names)
        max_features = min(d, math.ceil(math.sqrt(d)))
        self.trees = []
        for seq in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(seq)
            sample = rng.integers(0, n, size=n)
            self.trees.append(
                _build_tree(
                    train.x[sample],
                    train.y[sample],
                    n_classes,
                    rng,
                    max_features,
                    self.min_samples_split,
                )
            )
        self.label_names = list(train.label_names)
        return self

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        n_classes = len(self.label_names)
        out = np.empty(len(x), dtype=np.int64)
        for q, row in enumerate(x):
            votes = np.bincount(
                [_tree_predict(tree, row) for tree in self.trees], minlength=n_classes
            )
            out[q] = int(np.argmax(votes))
        return out


def train_random_forest(
    train: LabeledDataset, n_trees: int = 100, seed: int = 0
) -> RandomForestClassifier:
    return RandomForestClassifier(n_trees=n_trees, seed=seed).fit(train)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass
class EvaluationReport:
    """Accuracy plus macro-averaged precision/recall/F1 and the confusion matrix."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: list[dict] = field(default_factory=list)
    confusion: np.ndarray | None = None
    label_names: list[str] = field(default_factory=list)

    def format_table(self) -> str:
        lines = ["classifier metrics:"]
        lines.append(
            f"  accuracy {self.accuracy:.4f}  precision {self.precision:.4f}  "
            f"recall {self.recall:.4f}  f1 {self.f1:.4f}"
        )
        for row in self.per_class:
            lines.append(
                f"  {row['label']}: P {row['precision']:.4f} R {row['recall']:.4f} "
                f"F1 {row['f1']:.4f} (n={row['support']})"
            )
        return "\n".join(lines)


def evaluate(model, test: LabeledDataset) -> EvaluationReport:
    """Score predictions against test labels.

    Accuracy is trace(confusion)/total; precision, recall and F1 are
    macro-averaged over the model's label set, scoring 0 where a class
    denominator is empty.
    """
    if len(test) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    k = len(model.label_names)
    if test.y.max() >= k:
        raise ValueError("test labels outside the trained label set")
    preds = model.predict(test.x)
    confusion = np.zeros((k, k), dtype=np.int64)
    for truth, pred in zip(test.y, preds):
        confusion[truth, pred] += 1
    return report_from_confusion(confusion, list(model.label_names))


def report_from_confusion(confusion: np.ndarray, label_names: list[str]) -> EvaluationReport:
    confusion = np.asarray(confusion, dtype=np.int64)
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total)
    per_class = []
    for c in range(len(label_names)):
        tp = float(confusion[c, c])
        fp = float(confusion[:, c].sum() - tp)
        fn = float(confusion[c, :].sum() - tp)
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append(
            {
                "label": label_names[c],
                "precision": precision,
                "recall": recall,
                "f1": f1,
                "support": int(confusion[c, :].sum()),
            }
        )
    return EvaluationReport(
        accuracy=accuracy,
        precision=float(np.mean([r["precision"] for r in per_class])),
        recall=float(np.mean([r["recall"] for r in per_class])),
        f1=float(np.mean([r["f1"] for r in per_class])),
        per_class=per_class,
        confusion=confusion,
        label_names=list(label_names),
    )


# ---------------------------------------------------------------------------
# Model files: a self-describing JSON container with a kind tag
# ---------------------------------------------------------------------------

def save_model(model, path: str | Path) -> None:
    if model.kind == "mlp":
        payload = {
            "kind": "mlp",
            "hyper": {
                "hidden": list(model.hidden),
                "epochs": model.epochs,
                "learning_rate": model.learning_rate,
                "seed": model.seed,
            },
            "params": [p.tolist() for p in model.params],
            "label_names": model.label_names,
        }
    elif model.kind == "knn":
        payload = {
            "kind": "knn",
            "hyper": {"k": model.k, "metric": model.metric},
            "train_x": model.train_x.tolist(),
            "train_y": model.train_y.tolist(),
            "label_names": model.label_names,
        }
    elif model.kind == "random_forest":
        payload = {
            "kind": "random_forest",
            "hyper": {
                "n_trees": model.n_trees,
                "min_samples_split": model.min_samples_split,
                "seed": model.seed,
            },
            "trees": model.trees,
            "label_names": model.label_names,
        }
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    kind = payload.get("kind")
    if kind == "mlp":
        model = MLPClassifier(
            hidden=tuple(payload["hyper"]["hidden"]),
            epochs=payload["hyper"]["epochs"],
            learning_rate=payload["hyper"]["learning_rate"],
            seed=payload["hyper"]["seed"],
        )
        model.params = [np.asarray(p, dtype=np.float64) for p in payload["params"]]
        model.label_names = list(payload["label_names"])
        return model
    if kind == "knn":
        model = KNNClassifier(k=payload["hyper"]["k"], metric=payload["hyper"]["metric"])
        model.train_x = np.asarray(payload["train_x"], dtype=np.float64)
        model.train_y = np.asarray(payload["train_y"], dtype=np.int64)
        model.label_names = list(payload["label_names"])
        return model
    if kind == "random_forest":
        model = RandomForestClassifier(
            n_trees=payload["hyper"]["n_trees"],
            min_samples_split=payload["hyper"]["min_samples_split"],
            seed=payload["hyper"]["seed"],
        )
        model.trees = payload["trees"]
        model.label_names = list(payload["label_names"])
        return model
    raise ValueError(f"unknown model kind {kind!r}")
