"""End-to-end pipeline: corpus -> concepts, with a manual labeling gate.

``run_all`` executes preprocess, extract-nouns, train-embeddings (one
model per configured architecture), compare-models, cluster (winner),
select-k, cut and export-review, then stops: cluster labeling is human
work.  After the review file is labeled, ``resume`` continues with
build-tree, classifier training and evaluation.

Every stage writes its artifacts into the output directory and records
(input hashes, parameters, outputs) in ``manifest.json``; a stage whose
recorded inputs and parameters are unchanged is skipped on rerun.  With
a fixed seed and a single worker, reruns are byte-identical.

Configuration is a flat ``key=value`` file with section prefixes
(for example ``embedding.dim=300``); paths resolve relative to the
config file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import classify as cls
from . import cluster as clu
from . import hierarchy as hier
from . import silhouette as sil
from . import vocab as voc
from .embedding import EmbeddingMatrix, TrainConfig, train_cbow, train_glove, train_skipgram
from .embedding.glove import build_cooccurrence
from .preprocess import (
    default_lemmatizer,
    Lemmatizer,
    load_lemma_exceptions,
    load_stopwords,
    packaged_text,
    preprocess,
    read_corpus,
    read_token_file,
    write_token_file,
)

GATE_STAGES = (
    "preprocess",
    "extract-nouns",
    "train-embeddings",
    "compare-models",
    "cluster",
    "select-k",
    "cut",
    "export-review",
)

_DEFAULTS = {
    "seed": "42",
    "workers": "1",
    "preprocess.stopwords": "",
    "preprocess.lemma_exceptions": "",
    "vocab.k": "10000",
    "vocab.candidates": "restaurant,food,beverage",
    "vocab.threshold": "0.5",
    "vocab.tagger": "lexicon",
    "vocab.noun_lexicon": "",
    "vocab.pretagged": "",
    "embedding.architectures": "skipgram,cbow",
    "embedding.dim": "300",
    "embedding.window": "",
    "embedding.min_count": "5",
    "embedding.negative": "5",
    "embedding.epochs": "5",
    "embedding.iterations": "15",
    "embedding.learning_rate": "",
    "embedding.symmetric": "true",
    "cluster.metric": "cosine",
    "cluster.linkage": "average",
    "select.k_min": "2",
    "select.k_max": "300",
    "hierarchy.review": "",
    "classify.kinds": "mlp,knn,rf",
    "classify.train_fraction": "0.8",
    "classify.mlp_epochs": "300",
    "classify.mlp_learning_rate": "0.5",
    "classify.mlp_hidden": "300,300",
    "classify.knn_k": "5",
    "classify.rf_trees": "100",
}

_REQUIRED = ("corpus", "output")


class ConfigError(ValueError):
    """Invalid or incomplete pipeline configuration."""


@dataclass
class PipelineConfig:
    base_dir: Path
    raw: dict[str, str]

    @classmethod
    def parse(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        raw = dict(_DEFAULTS)
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _DEFAULTS and key not in _REQUIRED:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            raw[key] = value.strip()
        missing = [k for k in _REQUIRED if k not in raw]
        if missing:
            raise ConfigError(f"{path}: missing required keys {missing}")
        return cls(base_dir=path.parent.resolve(), raw=raw)

    # -- typed accessors ----------------------------------------------------

    def _path(self, key: str) -> Path | None:
        value = self.raw.get(key, "")
        if not value:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    def _int(self, key: str) -> int:
        try:
            return int(self.raw[key])
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {self.raw[key]!r}") from None

    def _float(self, key: str) -> float:
        try:
            return float(self.raw[key])
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {self.raw[key]!r}") from None

    def _list(self, key: str) -> list[str]:
        return [part.strip() for part in self.raw[key].split(",") if part.strip()]

    @property
    def seed(self) -> int:
        return self._int("seed")

    @property
    def workers(self) -> int:
        return self._int("workers")

    @property
    def corpus(self) -> Path:
        return self._path("corpus")

    @property
    def output(self) -> Path:
        return self._path("output")

    @property
    def architectures(self) -> list[str]:
        return self._list("embedding.architectures")

    def train_config(self, arch: str) -> TrainConfig:
        window = self.raw["embedding.window"]
        lr = self.raw["embedding.learning_rate"]
        return TrainConfig(
            dim=self._int("embedding.dim"),
            window=int(window) if window else None,
            min_count=self._int("embedding.min_count"),
            architecture=arch,
            negative_samples=self._int("embedding.negative"),
            epochs=self._int("embedding.iterations" if arch == "glove" else "embedding.epochs"),
            learning_rate=float(lr) if lr else None,
            seed=self.seed,
            symmetric_context=self.raw["embedding.symmetric"].lower() in ("true", "1", "yes"),
            workers=self.workers,
        )

    def validate(self) -> None:
        if self.corpus is None or not self.corpus.exists():
            raise ConfigError(f"corpus path does not exist: {self.raw.get('corpus')!r}")
        if self.output is None:
            raise ConfigError("output directory is required")
        for key in (
            "preprocess.stopwords",
            "preprocess.lemma_exceptions",
            "vocab.noun_lexicon",
            "vocab.pretagged",
            "hierarchy.review",
        ):
            p = self._path(key)
            if p is not None and not p.exists():
                raise ConfigError(f"{key} path does not exist: {p}")
        for arch in self.architectures:
            if arch not in ("skipgram", "cbow", "glove"):
                raise ConfigError(f"unknown architecture {arch!r}")
        if self.raw["vocab.tagger"] not in ("lexicon", "pretagged", "all"):
            raise ConfigError("vocab.tagger must be lexicon, pretagged or all")
        if self.raw["cluster.metric"] not in clu.METRICS:
            raise ConfigError(f"cluster.metric must be one of {clu.METRICS}")
        if self.raw["cluster.linkage"] not in clu.LINKAGES:
            raise ConfigError(f"cluster.linkage must be one of {clu.LINKAGES}")
        for kind in self._list("classify.kinds"):
            if kind not in ("mlp", "knn", "rf"):
                raise ConfigError(f"unknown classifier kind {kind!r}")


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class Manifest:
    stages: dict[str, dict] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)

    @classmethod
    def load(cls, path: Path) -> "Manifest":
        if not path.exists():
            return cls()
        data = json.loads(path.read_text(encoding="utf-8"))
        stages = {s["stage"]: s for s in data["stages"]}
        return cls(stages=stages, order=[s["stage"] for s in data["stages"]])

    def record(self, name: str, inputs: dict[str, str], params: dict, outputs: list[str]):
        self.stages[name] = {
            "stage": name,
            "inputs": inputs,
            "params": params,
            "outputs": outputs,
        }
        if name not in self.order:
            self.order.append(name)

    def fresh(self, name: str, inputs: dict[str, str], params: dict, out_dir: Path) -> bool:
        """True when the stage's recorded inputs/params match and outputs exist."""
        rec = self.stages.get(name)
        if rec is None or rec["inputs"] != inputs or rec["params"] != params:
            return False
        return all((out_dir / out).exists() for out in rec["outputs"])

    def save(self, path: Path) -> None:
        data = {"stages": [self.stages[name] for name in self.order]}
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    executed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    output: Path | None = None
    gate_message: str = ""


class PipelineRunner:
    """Executes pipeline stages against an output directory."""

    def __init__(self, config: PipelineConfig, output: Path | None = None):
        config.validate()
        self.config = config
        self.out = (output or config.output).resolve()
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.out / "manifest.json"
        self.manifest = Manifest.load(self.manifest_path)
        self.report = RunReport(output=self.out)

    # -- plumbing ------------------------------------------------------------

    def _stage(
        self,
        name: str,
        inputs: dict[str, Path | str],
        params: dict,
        outputs: list[str],
        action: Callable[[], None],
    ) -> None:
        hashed = {}
        for key, value in sorted(inputs.items()):
            if isinstance(value, Path):
                hashed[key] = _sha256(value)
            else:
                hashed[key] = _sha256_text(value)
        if self.manifest.fresh(name, hashed, params, self.out):
            self.report.skipped.append(name)
            return
        action()
        self.manifest.record(name, hashed, params, outputs)
        self.manifest.save(self.manifest_path)
        self.report.executed.append(name)

    def _art(self, name: str) -> Path:
        return self.out / name

    def _stopwords(self):
        return load_stopwords(self.config._path("preprocess.stopwords"))

    def _lemmatizer(self) -> Lemmatizer:
        path = self.config._path("preprocess.lemma_exceptions")
        return Lemmatizer(load_lemma_exceptions(path)) if path else default_lemmatizer()

    def _tagger(self):
        mode = self.config.raw["vocab.tagger"]
        if mode == "all":
            return voc.all_nouns
        if mode == "pretagged":
            path = self.config._path("vocab.pretagged")
            if path is None:
                raise ConfigError("vocab.tagger=pretagged requires vocab.pretagged")
            return voc.read_pretagged(path)
        return voc.LexiconTagger(lexicon=voc.load_noun_lexicon(self.config._path("vocab.noun_lexicon")))

    def _tagger_inputs(self) -> dict[str, Path | str]:
        mode = self.config.raw["vocab.tagger"]
        extra: dict[str, Path | str] = {"tagger-mode": mode}
        if mode == "pretagged":
            extra["pretagged"] = self.config._path("vocab.pretagged")
        elif mode == "lexicon":
            lex = self.config._path("vocab.noun_lexicon")
            extra["noun-lexicon"] = lex if lex else packaged_text("noun_lexicon.txt")
        return extra

    def _vector_file(self, arch: str) -> str:
        return f"vectors-{arch}.txt"

    def _winner(self) -> str:
        ranking = (self.out / "comparison.tsv").read_text(encoding="utf-8").splitlines()
        return ranking[1].split("\t")[0]

    # -- gate stages ----------------------------------------------------------

    def run(self) -> RunReport:
        cfg = self.config
        corpus_path = cfg.corpus

        def do_preprocess():
            stops = self._stopwords()
            lem = self._lemmatizer()
            stream = []
            for doc in read_corpus(corpus_path):
                stream.extend(preprocess(doc, stops, lem))
            write_token_file(self._art("corpus.tokens"), stream)

        stop_path = cfg._path("preprocess.stopwords")
        lemma_path = cfg._path("preprocess.lemma_exceptions")
        self._stage(
            "preprocess",
            {
                "corpus": corpus_path,
                "stopwords": stop_path if stop_path else packaged_text("stopwords.txt"),
                "lemma-exceptions": lemma_path
                if lemma_path
                else packaged_text("lemma_exceptions.txt"),
            },
            {},
            ["corpus.tokens"],
            do_preprocess,
        )

        def do_nouns():
            stream = read_token_file(self._art("corpus.tokens"))
            freq = voc.count_frequencies(stream)
            nouns = voc.top_k_nouns(freq, self._tagger(), cfg._int("vocab.k"))
            self._art("nouns.txt").write_text("".join(t + "\n" for t in nouns), encoding="utf-8")

        self._stage(
            "extract-nouns",
            {"tokens": self._art("corpus.tokens"), **self._tagger_inputs()},
            {"k": cfg._int("vocab.k")},
            ["nouns.txt"],
            do_nouns,
        )

        archs = cfg.architectures
        vec_files = [self._vector_file(a) for a in archs]

        def do_train():
            stream = read_token_file(self._art("corpus.tokens"))
            for arch in archs:
                tc = cfg.train_config(arch)
                if arch == "skipgram":
                    emb = train_skipgram(stream, tc)
                elif arch == "cbow":
                    emb = train_cbow(stream, tc)
                else:
                    cooc = build_cooccurrence(
                        stream, tc.resolved_window, tc.symmetric_context, tc.min_count
                    )
                    emb = train_glove(cooc, tc)
                emb.save(self._art(self._vector_file(arch)))

        train_params = {
            "architectures": archs,
            "dim": cfg._int("embedding.dim"),
            "window": cfg.raw["embedding.window"] or "default",
            "min_count": cfg._int("embedding.min_count"),
            "negative": cfg._int("embedding.negative"),
            "epochs": cfg._int("embedding.epochs"),
            "iterations": cfg._int("embedding.iterations"),
            "learning_rate": cfg.raw["embedding.learning_rate"] or "default",
            "symmetric": cfg.raw["embedding.symmetric"],
            "seed": cfg.seed,
        }
        self._stage(
            "train-embeddings",
            {"tokens": self._art("corpus.tokens")},
            train_params,
            vec_files,
            do_train,
        )

        def do_compare():
            nouns = self._art("nouns.txt").read_text(encoding="utf-8").split()
            models = [(a, EmbeddingMatrix.load(self._art(self._vector_file(a)))) for a in archs]
            comparison = clu.compare_models(
                models, nouns, cfg.raw["cluster.metric"], cfg.raw["cluster.linkage"]
            )
            lines = ["model\tcophenetic_coefficient"]
            lines += [f"{name}\t{coeff!r}" for name, coeff in comparison.ranking]
            self._art("comparison.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

        self._stage(
            "compare-models",
            {
                "nouns": self._art("nouns.txt"),
                **{f: self._art(f) for f in vec_files},
            },
            {"metric": cfg.raw["cluster.metric"], "linkage": cfg.raw["cluster.linkage"]},
            ["comparison.tsv"],
            do_compare,
        )

        def do_cluster():
            winner = self._winner()
            emb = EmbeddingMatrix.load(self._art(self._vector_file(winner)))
            nouns = self._art("nouns.txt").read_text(encoding="utf-8").split()
            filter_cfg = voc.CandidateFilterConfig(
                candidates=tuple(cfg._list("vocab.candidates")),
                threshold=cfg._float("vocab.threshold"),
            )
            items = voc.filter_by_candidates(nouns, emb, filter_cfg)
            if len(items) < 2:
                raise clu.TooFewItems(
                    "candidate filter kept fewer than 2 keywords; raise vocab.threshold"
                )
            self._art("items.txt").write_text("".join(t + "\n" for t in items), encoding="utf-8")
            dist = clu.pairwise_distances(emb, items, cfg.raw["cluster.metric"])
            dist.save(self._art("distances.txt"))
            dend = clu.agglomerate(dist, cfg.raw["cluster.linkage"])
            dend.labels = items
            clu.save_dendrogram(dend, self._art("dendrogram.jsonl"))

        self._stage(
            "cluster",
            {
                "nouns": self._art("nouns.txt"),
                "comparison": self._art("comparison.tsv"),
            },
            {
                "metric": cfg.raw["cluster.metric"],
                "linkage": cfg.raw["cluster.linkage"],
                "candidates": cfg._list("vocab.candidates"),
                "threshold": cfg._float("vocab.threshold"),
            },
            ["items.txt", "distances.txt", "dendrogram.jsonl", "dendrogram.jsonl.labels"],
            do_cluster,
        )

        def do_select():
            dend = clu.load_dendrogram(self._art("dendrogram.jsonl"))
            dist = clu.DistanceMatrix.load(self._art("distances.txt"))
            k_max = min(cfg._int("select.k_max"), dend.n_leaves - 1)
            result = sil.sweep_k(dend, dist, cfg._int("select.k_min"), k_max)
            lines = ["k\taverage_silhouette"]
            lines += [f"{k}\t{result.curve[k]!r}" for k in sorted(result.curve)]
            lines.append(f"best\t{result.best_k}")
            self._art("silhouette.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

        self._stage(
            "select-k",
            {"dendrogram": self._art("dendrogram.jsonl"), "distances": self._art("distances.txt")},
            {"k_min": cfg._int("select.k_min"), "k_max": cfg._int("select.k_max")},
            ["silhouette.tsv"],
            do_select,
        )

        def do_cut():
            dend = clu.load_dendrogram(self._art("dendrogram.jsonl"))
            best_k = int(
                self._art("silhouette.tsv")
                .read_text(encoding="utf-8")
                .splitlines()[-1]
                .split("\t")[1]
            )
            labels = clu.cut(dend, best_k)
            lines = [f"{token}\t{labels[i]}" for i, token in enumerate(dend.labels)]
            self._art("assignment.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

        self._stage(
            "cut",
            {"dendrogram": self._art("dendrogram.jsonl"), "silhouette": self._art("silhouette.tsv")},
            {},
            ["assignment.tsv"],
            do_cut,
        )

        def do_export():
            dend = clu.load_dendrogram(self._art("dendrogram.jsonl"))
            dist = clu.DistanceMatrix.load(self._art("distances.txt"))
            assignment = _read_assignment(self._art("assignment.tsv"), dend.labels)
            review = hier.export_review(assignment, dend, dist)
            review.save(self._art("review.txt"))

        self._stage(
            "export-review",
            {"assignment": self._art("assignment.tsv"), "dendrogram": self._art("dendrogram.jsonl")},
            {},
            ["review.txt"],
            do_export,
        )

        self.report.gate_message = (
            f"labeling gate: edit {self._art('review.txt')} (name each cluster, "
            "prefix '!' lines to exclude members), then run 'resume'"
        )
        return self.report

    # -- post-gate stages ------------------------------------------------------

    def resume(self) -> RunReport:
        cfg = self.config
        for artifact in ("dendrogram.jsonl", "assignment.tsv", "comparison.tsv"):
            if not self._art(artifact).exists():
                raise ConfigError(f"missing {artifact}; run the pipeline first")
        review_path = cfg._path("hierarchy.review") or self._art("review.txt")

        def do_tree():
            review = hier.import_review(review_path)
            dend = clu.load_dendrogram(self._art("dendrogram.jsonl"))
            tree = hier.build_concept_tree(review, dend)
            tree.save(self._art("concept_tree.json"))
            self._art("concept_tree.outline.txt").write_text(
                tree.to_outline(), encoding="utf-8"
            )

        self._stage(
            "build-tree",
            {"review": review_path, "dendrogram": self._art("dendrogram.jsonl")},
            {},
            ["concept_tree.json", "concept_tree.outline.txt"],
            do_tree,
        )

        kinds = cfg._list("classify.kinds")
        winner = self._winner()
        emb_file = self._vector_file(winner)

        def make_dataset():
            tree = hier.ConceptTree.load(self._art("concept_tree.json"))
            emb = EmbeddingMatrix.load(self._art(emb_file))
            dataset = cls.dataset_from_concepts(tree, emb)
            return cls.split(dataset, cfg._float("classify.train_fraction"), cfg.seed)

        model_files = {kind: f"model-{kind}.json" for kind in kinds}
        classify_params = {
            "train_fraction": cfg._float("classify.train_fraction"),
            "seed": cfg.seed,
            "mlp_epochs": cfg._int("classify.mlp_epochs"),
            "mlp_learning_rate": cfg._float("classify.mlp_learning_rate"),
            "mlp_hidden": cfg._list("classify.mlp_hidden"),
            "knn_k": cfg._int("classify.knn_k"),
            "rf_trees": cfg._int("classify.rf_trees"),
        }

        for kind in kinds:
            def do_train(kind=kind):
                train, _ = make_dataset()
                if kind == "mlp":
                    hidden = tuple(int(h) for h in cfg._list("classify.mlp_hidden"))
                    model = cls.train_mlp(
                        train,
                        epochs=cfg._int("classify.mlp_epochs"),
                        learning_rate=cfg._float("classify.mlp_learning_rate"),
                        seed=cfg.seed,
                        hidden=hidden,
                    )
                elif kind == "knn":
                    model = cls.train_knn(
                        train, k=cfg._int("classify.knn_k"), metric=cfg.raw["cluster.metric"]
                    )
                else:
                    model = cls.train_random_forest(
                        train, n_trees=cfg._int("classify.rf_trees"), seed=cfg.seed
                    )
                cls.save_model(model, self._art(model_files[kind]))

            self._stage(
                f"train-{kind}",
                {"tree": self._art("concept_tree.json"), "vectors": self._art(emb_file)},
                classify_params,
                [model_files[kind]],
                do_train,
            )

        def do_evaluate():
            _, test = make_dataset()
            lines = ["classifier\taccuracy\tprecision\trecall\tf1"]
            for kind in kinds:
                model = cls.load_model(self._art(model_files[kind]))
                report = cls.evaluate(model, test)
                lines.append(
                    f"{kind}\t{report.accuracy:.4f}\t{report.precision:.4f}"
                    f"\t{report.recall:.4f}\t{report.f1:.4f}"
                )
            self._art("classification_report.tsv").write_text(
                "\n".join(lines) + "\n", encoding="utf-8"
            )

        self._stage(
            "evaluate",
            {
                "tree": self._art("concept_tree.json"),
                "vectors": self._art(emb_file),
                **{f"model-{kind}": self._art(model_files[kind]) for kind in kinds},
            },
            classify_params,
            ["classification_report.tsv"],
            do_evaluate,
        )
        return self.report


def _read_assignment(path: Path, tokens: list[str]):
    by_token = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        token, _, label = line.partition("\t")
        by_token[token] = int(label)
    return [by_token[t] for t in tokens]


def run_all(config: PipelineConfig, output: Path | None = None) -> RunReport:
    """Stages 1-8 up to the manual labeling gate."""
    return PipelineRunner(config, output).run()


def resume(config: PipelineConfig, output: Path | None = None) -> RunReport:
    """Post-gate stages: build-tree, classifier training, evaluation."""
    return PipelineRunner(config, output).resume()
