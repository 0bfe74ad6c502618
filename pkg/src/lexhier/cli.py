"""Command-line entry points for every pipeline stage.

Each subcommand reads and writes the plain-text artifact formats, so a
full run can be driven stage by stage or end to end with ``run`` /
``resume``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import classify as cls
from . import cluster as clu
from . import hierarchy as hier
from . import silhouette as sil
from . import vocab as voc
from .embedding import EmbeddingMatrix, TrainConfig, train_cbow, train_glove, train_skipgram
from .embedding.glove import build_cooccurrence
from .pipeline import PipelineConfig, resume, run_all
from .preprocess import (
    Lemmatizer,
    load_lemma_exceptions,
    load_stopwords,
    preprocess,
    read_corpus,
    read_token_file,
    write_token_file,
)


def _cmd_preprocess(args) -> int:
    stops = load_stopwords(args.stopwords)
    lem = Lemmatizer(load_lemma_exceptions(args.lemma_exceptions))
    stream = []
    for doc in read_corpus(args.input):
        stream.extend(preprocess(doc, stops, lem))
    write_token_file(args.output, stream)
    print(f"wrote {sum(len(s) for s in stream)} tokens in {len(stream)} sentences")
    return 0


def _make_tagger(args, freq=None):
    if getattr(args, "all_nouns", False):
        return voc.all_nouns
    if getattr(args, "pretagged", None):
        return voc.read_pretagged(args.pretagged)
    return voc.LexiconTagger(lexicon=voc.load_noun_lexicon(args.noun_lexicon), freq=freq)


def _cmd_extract_nouns(args) -> int:
    stream = read_token_file(args.corpus)
    freq = voc.count_frequencies(stream)
    nouns = voc.top_k_nouns(freq, _make_tagger(args, freq), args.k)
    emb = EmbeddingMatrix.load(args.vectors)
    cfg = voc.CandidateFilterConfig(
        candidates=tuple(args.candidates.split(",")), threshold=args.threshold
    )
    kept = voc.filter_by_candidates(nouns, emb, cfg)
    Path(args.output).write_text("".join(t + "\n" for t in kept), encoding="utf-8")
    print(f"{len(nouns)} frequent nouns -> {len(kept)} domain keywords")
    return 0


def _cmd_train_embeddings(args) -> int:
    stream = read_token_file(args.corpus)
    cfg = TrainConfig(
        dim=args.dim,
        window=args.window,
        min_count=args.min_count,
        architecture=args.arch,
        negative_samples=args.negative,
        epochs=args.iters,
        learning_rate=args.learning_rate,
        seed=args.seed,
        symmetric_context=not args.asymmetric,
        workers=args.workers,
    )
    if args.arch == "skipgram":
        emb = train_skipgram(stream, cfg)
    elif args.arch == "cbow":
        emb = train_cbow(stream, cfg)
    else:
        cooc = build_cooccurrence(
            stream, cfg.resolved_window, cfg.symmetric_context, cfg.min_count
        )
        emb = train_glove(cooc, cfg)
    emb.save(args.output)
    print(f"trained {args.arch}: {len(emb)} words x {emb.dim} dims")
    return 0


def _cmd_cluster(args) -> int:
    emb = EmbeddingMatrix.load(args.vectors)
    items = Path(args.items).read_text(encoding="utf-8").split()
    dist = clu.pairwise_distances(emb, items, args.metric)
    dend = clu.agglomerate(dist, args.linkage)
    dend.labels = items
    clu.save_dendrogram(dend, args.output_dendrogram)
    if args.output_distances:
        dist.save(args.output_distances)
    coeff = clu.cophenetic_coefficient(dist, clu.cophenetic_matrix(dend))
    print(f"clustered {len(items)} items; cophenetic coefficient {coeff:.4f}")
    return 0


def _cmd_cut(args) -> int:
    dend = clu.load_dendrogram(args.dendrogram)
    labels = clu.cut(dend, args.k)
    tokens = dend.labels or [str(i) for i in range(dend.n_leaves)]
    lines = [f"{token}\t{labels[i]}" for i, token in enumerate(tokens)]
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"cut into {args.k} clusters")
    return 0


def _cmd_select_k(args) -> int:
    dend = clu.load_dendrogram(args.dendrogram)
    dist = clu.DistanceMatrix.load(args.distances)
    result = sil.sweep_k(dend, dist, args.k_min, min(args.k_max, dend.n_leaves - 1))
    lines = ["k\taverage_silhouette"]
    lines += [f"{k}\t{result.curve[k]!r}" for k in sorted(result.curve)]
    lines.append(f"best\t{result.best_k}")
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"best k = {result.best_k} (average silhouette {result.best_average:.4f})")
    return 0


def _cmd_export_review(args) -> int:
    dend = clu.load_dendrogram(args.dendrogram)
    tokens = dend.labels or []
    by_token = {}
    for line in Path(args.assignment).read_text(encoding="utf-8").splitlines():
        token, _, label = line.partition("\t")
        by_token[token] = int(label)
    assignment = [by_token[t] for t in tokens]
    dist = clu.DistanceMatrix.load(args.distances) if args.distances else None
    review = hier.export_review(assignment, dend, dist)
    review.save(args.output)
    print(f"exported {len(review.blocks)} clusters for labeling -> {args.output}")
    return 0


def _cmd_build_tree(args) -> int:
    review = hier.import_review(Path(args.review))
    dend = clu.load_dendrogram(args.dendrogram)
    tree = hier.build_concept_tree(review, dend)
    tree.save(args.output)
    if args.outline:
        Path(args.outline).write_text(tree.to_outline(), encoding="utf-8")
    print(f"built concept tree with {len(tree.leaves())} leaf concepts")
    return 0


def _cmd_lookup(args) -> int:
    tree = hier.ConceptTree.load(args.tree)
    path = tree.lookup(args.word)
    if path is None:
        print(f"{args.word}: not in the concept tree")
        return 1
    print(" > ".join(path))
    return 0


def _read_dataset(data_path, vectors_path) -> cls.LabeledDataset:
    emb = EmbeddingMatrix.load(vectors_path)
    tokens, names = [], []
    name_ids: dict[str, int] = {}
    ys = []
    for line in Path(data_path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ValueError(f"expected 'token label' per line, got {line!r}")
        token, label = parts
        if token not in emb:
            continue
        if label not in name_ids:
            name_ids[label] = len(name_ids)
            names.append(label)
        tokens.append(token)
        ys.append(name_ids[label])
    x = np.stack([emb.vector(t) for t in tokens])
    return cls.LabeledDataset(x, np.asarray(ys), names)


def _cmd_classify(args) -> int:
    if args.action == "train":
        dataset = _read_dataset(args.data, args.vectors)
        train, test = cls.split(dataset, args.train_fraction, args.seed)
        if args.model == "mlp":
            model = cls.train_mlp(
                train, epochs=args.epochs, learning_rate=args.learning_rate, seed=args.seed
            )
        elif args.model == "knn":
            model = cls.train_knn(train, k=args.k)
        else:
            model = cls.train_random_forest(train, n_trees=args.trees, seed=args.seed)
        cls.save_model(model, args.output)
        report = cls.evaluate(model, test)
        print(report.format_table())
        return 0
    if args.action == "predict":
        model = cls.load_model(args.model_file)
        emb = EmbeddingMatrix.load(args.vectors)
        if args.word not in emb:
            print(f"{args.word}: no vector", file=sys.stderr)
            return 1
        label = int(model.predict(emb.vector(args.word))[0])
        print(f"{args.word} -> {model.label_names[label]}")
        return 0
    # evaluate
    model = cls.load_model(args.model_file)
    dataset = _read_dataset(args.data, args.vectors)
    report = cls.evaluate(model, dataset)
    print(report.format_table())
    return 0


def _cmd_run(args) -> int:
    config = PipelineConfig.parse(args.config)
    if args.seed is not None:
        config.raw["seed"] = str(args.seed)
    if args.workers is not None:
        config.raw["workers"] = str(args.workers)
    report = run_all(config, Path(args.output) if args.output else None)
    for name in report.executed:
        print(f"ran {name}")
    for name in report.skipped:
        print(f"skipped {name} (inputs unchanged)")
    print(report.gate_message)
    return 0


def _cmd_resume(args) -> int:
    config = PipelineConfig.parse(args.config)
    report = resume(config, Path(args.output) if args.output else None)
    for name in report.executed:
        print(f"ran {name}")
    for name in report.skipped:
        print(f"skipped {name} (inputs unchanged)")
    out = report.output / "classification_report.tsv"
    if out.exists():
        print(out.read_text(encoding="utf-8").rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexhier",
        description="Concept discovery: embeddings, clustering, cluster-count "
        "selection, concept hierarchies and classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="tokenize, clean and lemmatize a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--lemma-exceptions", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("extract-nouns", help="top-k nouns filtered by candidate distance")
    p.add_argument("--corpus", required=True, help="preprocessed token file")
    p.add_argument("--vectors", required=True)
    p.add_argument("--k", type=int, default=10000)
    p.add_argument("--candidates", default="restaurant,food,beverage")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--noun-lexicon", default=None)
    p.add_argument("--pretagged", default=None)
    p.add_argument("--all-nouns", action="store_true", help="treat every token as a noun")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_extract_nouns)

    p = sub.add_parser("train-embeddings", help="train skip-gram, CBOW or GloVe vectors")
    p.add_argument("--corpus", required=True, help="preprocessed token file")
    p.add_argument("--arch", choices=("skipgram", "cbow", "glove"), default="skipgram")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--asymmetric", action="store_true", help="left-only context (GloVe)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_train_embeddings)

    p = sub.add_parser("cluster", help="agglomerate items into a dendrogram")
    p.add_argument("--vectors", required=True)
    p.add_argument("--items", required=True, help="one token per line")
    p.add_argument("--metric", choices=clu.METRICS, default="cosine")
    p.add_argument("--linkage", choices=clu.LINKAGES, default="average")
    p.add_argument("--output-dendrogram", required=True)
    p.add_argument("--output-distances", default=None)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("cut", help="flat clusters from a dendrogram")
    p.add_argument("--dendrogram", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_cut)

    p = sub.add_parser("select-k", help="silhouette sweep over cluster counts")
    p.add_argument("--dendrogram", required=True)
    p.add_argument("--distances", required=True)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=300)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_select_k)

    p = sub.add_parser("export-review", help="write the hand-editable cluster review file")
    p.add_argument("--dendrogram", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--distances", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_export_review)

    p = sub.add_parser("build-tree", help="labeled review file -> concept tree")
    p.add_argument("--review", required=True)
    p.add_argument("--dendrogram", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--outline", default=None)
    p.set_defaults(func=_cmd_build_tree)

    p = sub.add_parser("lookup", help="concept path of a word")
    p.add_argument("--tree", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=_cmd_lookup)

    p = sub.add_parser("classify", help="train / predict / evaluate concept classifiers")
    p.add_argument("action", choices=("train", "predict", "evaluate"))
    p.add_argument("--model", choices=("mlp", "knn", "rf"), default="mlp")
    p.add_argument("--data", default=None, help="'token label' lines")
    p.add_argument("--vectors", default=None)
    p.add_argument("--model-file", default=None)
    p.add_argument("--word", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--trees", type=int, default=100)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("run", help="full pipeline up to the labeling gate")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", default=None, help="override the config output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("resume", help="continue after labeling: tree + classifiers")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_resume)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
