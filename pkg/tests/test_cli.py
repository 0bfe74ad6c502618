import json
from pathlib import Path

import pytest

from helpers import planted_corpus, planted_vocabulary
from lexhier.cli import main
from lexhier.hierarchy import parse_review


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A corpus plus every stage artifact produced through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    concepts = planted_vocabulary(3, 8)
    lines, truth = planted_corpus(concepts, n_sentences=220, seed=5)
    (root / "corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    anchors = ",".join(words[0] for words in concepts)
    return root, concepts, truth, anchors


def run(argv) -> int:
    return main([str(a) for a in argv])


class TestStageCommands:
    def test_preprocess(self, workspace):
        root, _, _, _ = workspace
        code = run(
            ["preprocess", "--input", root / "corpus.txt", "--output", root / "tokens.txt"]
        )
        assert code == 0
        assert (root / "tokens.txt").read_text().strip()

    def test_train_embeddings(self, workspace):
        root, _, _, _ = workspace
        code = run(
            [
                "train-embeddings",
                "--corpus", root / "tokens.txt",
                "--arch", "skipgram",
                "--dim", 12,
                "--window", 3,
                "--min-count", 3,
                "--iters", 2,
                "--seed", 7,
                "--workers", 1,
                "--output", root / "vectors.txt",
            ]
        )
        assert code == 0
        header = (root / "vectors.txt").read_text().splitlines()[0]
        assert header.endswith(" 12")

    def test_glove_arch(self, workspace):
        root, _, _, _ = workspace
        code = run(
            [
                "train-embeddings",
                "--corpus", root / "tokens.txt",
                "--arch", "glove",
                "--dim", 8,
                "--min-count", 3,
                "--iters", 3,
                "--asymmetric",
                "--output", root / "vectors-glove.txt",
            ]
        )
        assert code == 0

    def test_extract_nouns(self, workspace):
        root, _, _, anchors = workspace
        code = run(
            [
                "extract-nouns",
                "--corpus", root / "tokens.txt",
                "--vectors", root / "vectors.txt",
                "--k", 100,
                "--candidates", anchors,
                "--threshold", 1.2,
                "--all-nouns",
                "--output", root / "nouns.txt",
            ]
        )
        assert code == 0
        assert len((root / "nouns.txt").read_text().split()) > 10

    def test_cluster(self, workspace):
        root, _, _, _ = workspace
        code = run(
            [
                "cluster",
                "--vectors", root / "vectors.txt",
                "--items", root / "nouns.txt",
                "--metric", "cosine",
                "--linkage", "average",
                "--output-dendrogram", root / "dend.jsonl",
                "--output-distances", root / "dist.txt",
            ]
        )
        assert code == 0
        assert (root / "dend.jsonl.labels").exists()

    def test_select_k(self, workspace):
        root, _, _, _ = workspace
        code = run(
            [
                "select-k",
                "--dendrogram", root / "dend.jsonl",
                "--distances", root / "dist.txt",
                "--k-min", 2,
                "--k-max", 10,
                "--output", root / "sil.tsv",
            ]
        )
        assert code == 0
        assert (root / "sil.tsv").read_text().splitlines()[-1].startswith("best\t")

    def test_cut(self, workspace):
        root, _, _, _ = workspace
        best = int((root / "sil.tsv").read_text().splitlines()[-1].split("\t")[1])
        code = run(
            [
                "cut",
                "--dendrogram", root / "dend.jsonl",
                "--k", best,
                "--output", root / "assign.tsv",
            ]
        )
        assert code == 0

    def test_export_review_and_build_tree(self, workspace):
        root, _, truth, _ = workspace
        code = run(
            [
                "export-review",
                "--dendrogram", root / "dend.jsonl",
                "--assignment", root / "assign.tsv",
                "--distances", root / "dist.txt",
                "--output", root / "review.txt",
            ]
        )
        assert code == 0
        review = parse_review((root / "review.txt").read_text())
        for block in review.blocks:
            votes = [truth[m] for m in block.members if m in truth]
            block.label = f"concept{max(set(votes), key=votes.count)}-{block.cluster_id}"
        from lexhier.hierarchy import ClusterReviewFile

        ClusterReviewFile(review.blocks).save(root / "review.txt")
        code = run(
            [
                "build-tree",
                "--review", root / "review.txt",
                "--dendrogram", root / "dend.jsonl",
                "--output", root / "tree.json",
                "--outline", root / "tree.txt",
            ]
        )
        assert code == 0
        assert json.loads((root / "tree.json").read_text())["label"]

    def test_lookup(self, workspace, capsys):
        root, concepts, _, _ = workspace
        word = concepts[0][0]
        code = run(["lookup", "--tree", root / "tree.json", "--word", word])
        assert code == 0
        assert ">" in capsys.readouterr().out
        assert run(["lookup", "--tree", root / "tree.json", "--word", "zzzz"]) == 1

    def test_classify_commands(self, workspace, capsys):
        root, concepts, truth, _ = workspace
        data_lines = [f"{w} concept{c}" for w, c in sorted(truth.items())]
        (root / "train.txt").write_text("\n".join(data_lines) + "\n", encoding="utf-8")
        code = run(
            [
                "classify", "train",
                "--model", "knn",
                "--data", root / "train.txt",
                "--vectors", root / "vectors.txt",
                "--k", 3,
                "--output", root / "knn.json",
            ]
        )
        assert code == 0
        code = run(
            [
                "classify", "predict",
                "--model-file", root / "knn.json",
                "--word", concepts[1][2],
                "--vectors", root / "vectors.txt",
            ]
        )
        assert code == 0
        assert "concept1" in capsys.readouterr().out
        code = run(
            [
                "classify", "evaluate",
                "--model-file", root / "knn.json",
                "--data", root / "train.txt",
                "--vectors", root / "vectors.txt",
            ]
        )
        assert code == 0
        assert "accuracy" in capsys.readouterr().out


class TestRunResume:
    def test_run_and_resume(self, tmp_path, capsys):
        concepts = planted_vocabulary(3, 8)
        lines, truth = planted_corpus(concepts, n_sentences=220, seed=9)
        (tmp_path / "corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        anchors = ",".join(words[0] for words in concepts)
        (tmp_path / "run.conf").write_text(
            "\n".join(
                [
                    "corpus=corpus.txt",
                    "output=out",
                    "seed=11",
                    f"vocab.candidates={anchors}",
                    "vocab.threshold=1.2",
                    "vocab.tagger=all",
                    "vocab.k=100",
                    "embedding.architectures=skipgram",
                    "embedding.dim=12",
                    "embedding.window=3",
                    "embedding.min_count=3",
                    "embedding.epochs=2",
                    "select.k_min=2",
                    "select.k_max=8",
                    "classify.kinds=knn",
                    "classify.knn_k=3",
                ]
            )
            + "\n",
            encoding="utf-8",
        )
        assert run(["run", "--config", tmp_path / "run.conf"]) == 0
        out = capsys.readouterr().out
        assert "labeling gate" in out
        review_path = tmp_path / "out" / "review.txt"
        review = parse_review(review_path.read_text())
        for block in review.blocks:
            votes = [truth[m] for m in block.members if m in truth]
            block.label = f"c{max(set(votes), key=votes.count)}-{block.cluster_id}"
        from lexhier.hierarchy import ClusterReviewFile

        ClusterReviewFile(review.blocks).save(review_path)
        assert run(["resume", "--config", tmp_path / "run.conf"]) == 0
        assert (tmp_path / "out" / "classification_report.tsv").exists()
