import numpy as np
import pytest

from lexhier.cluster import agglomerate, cut, pairwise_distances
from lexhier.embedding import EmbeddingMatrix
from lexhier.hierarchy import (
    ClusterReviewFile,
    ConceptTree,
    EmptyTree,
    InconsistentReview,
    MissingLabels,
    ReviewBlock,
    ReviewParseError,
    ReviewValidationError,
    build_concept_tree,
    classify_lookup,
    export_review,
    import_review,
    parse_review,
    validate_review,
)


@pytest.fixture
def line_dendrogram(line_embedding):
    dist = pairwise_distances(line_embedding, ["a", "b", "c"], "euclidean")
    dend = agglomerate(dist, "average")
    dend.labels = ["a", "b", "c"]
    return dend, dist


@pytest.fixture
def four_group_dendrogram():
    # two near pairs and two far singles; merge order is deterministic
    emb = EmbeddingMatrix(
        ["a", "b", "c", "d", "e", "f"],
        np.array([[0.0], [1.0], [10.0], [11.0], [50.0], [80.0]]),
    )
    items = ["a", "b", "c", "d", "e", "f"]
    dist = pairwise_distances(emb, items, "euclidean")
    dend = agglomerate(dist, "average")
    dend.labels = items
    return dend, dist


class TestExportReview:
    def test_single_cluster(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review([0, 0, 0], dend, dist)
        assert len(review.blocks) == 1
        assert sorted(review.blocks[0].members) == ["a", "b", "c"]

    def test_two_clusters_from_cut(self, line_dendrogram):
        dend, dist = line_dendrogram
        labels = cut(dend, 2)
        review = export_review(labels, dend, dist)
        assert [sorted(b.members) for b in review.blocks] == [["a", "b"], ["c"]]
        assert all(b.label == "" and not b.exclusions for b in review.blocks)

    def test_members_ordered_by_proximity(self):
        # b sits centrally: closest to the cluster's center, so listed first
        emb = EmbeddingMatrix(["a", "b", "c"], np.array([[0.0], [4.0], [7.0]]))
        dist = pairwise_distances(emb, ["a", "b", "c"], "euclidean")
        dend = agglomerate(dist, "average")
        dend.labels = ["a", "b", "c"]
        review = export_review([0, 0, 0], dend, dist)
        assert review.blocks[0].members[0] == "b"

    def test_unlabeled_round_trip_fails_at_build(self, line_dendrogram, tmp_path):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        path = tmp_path / "review.txt"
        review.save(path)
        loaded = import_review(path)
        with pytest.raises(MissingLabels):
            build_concept_tree(loaded, dend)


class TestParsing:
    def test_well_formed(self):
        text = "# cluster 0: drinks\nbeer\nwine\n\n# cluster 1: mains\npasta\n"
        review = parse_review(text)
        assert [b.label for b in review.blocks] == ["drinks", "mains"]
        assert review.blocks[0].members == ["beer", "wine"]

    def test_exclusion_lines(self):
        review = parse_review("# cluster 0: drinks\nbeer\nwine\n!wine\n")
        assert review.blocks[0].exclusions == {"wine"}
        assert review.blocks[0].retained() == ["beer"]

    def test_parse_error_has_line_number(self):
        with pytest.raises(ReviewParseError) as err:
            parse_review("# cluster 0: ok\nbeer\n# broken header\n")
        assert err.value.line == 3

    def test_token_outside_block(self):
        with pytest.raises(ReviewParseError):
            parse_review("stray\n")

    def test_multi_token_line_rejected(self):
        with pytest.raises(ReviewParseError):
            parse_review("# cluster 0: x\ntwo words\n")

    def test_format_parse_round_trip_byte_stable(self):
        review = ClusterReviewFile(
            blocks=[
                ReviewBlock(0, "drinks", ["beer", "wine"], {"wine"}),
                ReviewBlock(1, "", ["pasta"]),
            ]
        )
        text = review.format_text()
        assert parse_review(text).blocks == review.blocks
        assert parse_review(text).blocks[0].exclusions == {"wine"}
        assert ClusterReviewFile(parse_review(text).blocks).format_text() == text


class TestValidation:
    def test_duplicate_across_blocks(self):
        review = parse_review("# cluster 0: a\nbeer\n\n# cluster 1: b\nbeer\n")
        errors, _ = validate_review(review)
        assert any(e.code == "duplicate-member" and e.token == "beer" for e in errors)

    def test_duplicate_within_block(self):
        review = parse_review("# cluster 0: a\nbeer\nbeer\n")
        errors, _ = validate_review(review)
        assert any(e.code == "duplicate-member" for e in errors)

    def test_unknown_exclusion(self):
        review = parse_review("# cluster 0: a\nbeer\n!wine\n")
        errors, _ = validate_review(review)
        assert any(e.code == "unknown-exclusion" and e.token == "wine" for e in errors)

    def test_missing_label_is_warning_only(self):
        review = parse_review("# cluster 0:\nbeer\n")
        errors, warns = validate_review(review)
        assert not errors
        assert any(w.code == "missing-label" for w in warns)

    def test_import_raises_enumerated(self, tmp_path):
        path = tmp_path / "review.txt"
        path.write_text("# cluster 0: a\nbeer\n!wine\n\n# cluster 1: b\nbeer\n")
        with pytest.raises(ReviewValidationError) as err:
            import_review(path)
        codes = {issue.code for issue in err.value.issues}
        assert codes == {"duplicate-member", "unknown-exclusion"}


class TestBuildTree:
    def test_two_labeled_clusters(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        review.blocks[0].label = "near"
        review.blocks[1].label = "far"
        tree = build_concept_tree(review, dend)
        assert not tree.root.is_leaf
        assert sorted(leaf.label for leaf in tree.leaves()) == ["far", "near"]
        assert tree.root.label == "node-4"

    def test_leaves_equal_cut_clusters(self, four_group_dendrogram):
        dend, dist = four_group_dendrogram
        labels = cut(dend, 4)
        review = export_review(labels, dend, dist)
        for i, block in enumerate(review.blocks):
            block.label = f"concept{i}"
        tree = build_concept_tree(review, dend)
        got = {leaf.label: sorted(leaf.members) for leaf in tree.leaves()}
        want = {}
        for i, block in enumerate(review.blocks):
            want[f"concept{i}"] = sorted(block.members)
        assert got == want

    def test_internal_structure_mirrors_merges(self, four_group_dendrogram):
        dend, dist = four_group_dendrogram
        review = export_review(cut(dend, 4), dend, dist)
        for i, block in enumerate(review.blocks):
            block.label = f"c{i}"
        tree = build_concept_tree(review, dend)
        # hand-traced merge order: {a,b} then {c,d} (both at 1), those two
        # at 10 (node 8), {e,f} at 30 (node 9), root joins 8 and 9
        assert tree.root.label == "node-10"
        left, right = tree.root.children
        assert left.label == "node-8"
        assert [c.label for c in left.children] == ["c0", "c1"]
        assert right.label == "node-9"
        assert [c.label for c in right.children] == ["c2", "c3"]
        assert {leaf.label for leaf in tree.leaves()} == {"c0", "c1", "c2", "c3"}

    def test_exclusions_drop_tokens(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        review.blocks[0].label = "near"
        review.blocks[0].exclusions = {"b"}
        review.blocks[1].label = "far"
        tree = build_concept_tree(review, dend)
        members = {m for leaf in tree.leaves() for m in leaf.members}
        assert members == {"a", "c"}

    def test_fully_excluded_block_dropped(self, four_group_dendrogram):
        dend, dist = four_group_dendrogram
        review = export_review(cut(dend, 4), dend, dist)
        for i, block in enumerate(review.blocks):
            block.label = f"c{i}"
        review.blocks[3].exclusions = set(review.blocks[3].members)
        review.blocks[3].label = ""  # dropped branches may stay unlabeled
        tree = build_concept_tree(review, dend)
        assert len(tree.leaves()) == 3

    def test_all_excluded_raises_empty_tree(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        for block in review.blocks:
            block.label = "x"
            block.exclusions = set(block.members)
        with pytest.raises(EmptyTree):
            build_concept_tree(review, dend)

    def test_interleaved_blocks_rejected(self, four_group_dendrogram):
        dend, _ = four_group_dendrogram
        # {a,d} and {b,c} both have node 8 ({a,b,c,d}) as their LCA
        review = ClusterReviewFile(
            blocks=[ReviewBlock(0, "x", ["a", "d"]), ReviewBlock(1, "y", ["b", "c"])]
        )
        with pytest.raises(InconsistentReview):
            build_concept_tree(review, dend)

    def test_block_containing_another_rejected(self, four_group_dendrogram):
        dend, _ = four_group_dendrogram
        # LCA(c, f) is the root, whose subtree contains the {a,b} block
        review = ClusterReviewFile(
            blocks=[ReviewBlock(0, "inner", ["a", "b"]), ReviewBlock(1, "outer", ["c", "f"])]
        )
        with pytest.raises(InconsistentReview):
            build_concept_tree(review, dend)

    def test_unknown_member_rejected(self, line_dendrogram):
        dend, _ = line_dendrogram
        review = ClusterReviewFile(blocks=[ReviewBlock(0, "x", ["ghost"])])
        with pytest.raises(InconsistentReview):
            build_concept_tree(review, dend)

    def test_token_disjointness(self, four_group_dendrogram):
        dend, dist = four_group_dendrogram
        review = export_review(cut(dend, 3), dend, dist)
        for i, block in enumerate(review.blocks):
            block.label = f"c{i}"
        tree = build_concept_tree(review, dend)
        members = [m for leaf in tree.leaves() for m in leaf.members]
        assert len(members) == len(set(members))


class TestContractionOracle:
    @staticmethod
    def _oracle_shape(dend, blocks_by_node):
        """Independent contraction: full merge tree, block nodes become
        leaves, single-child chains collapse."""

        n = dend.n_leaves

        def build(node_id):
            if node_id in blocks_by_node:
                return ("leaf", blocks_by_node[node_id])
            if node_id < n:
                return None
            left, right = dend.merges[node_id - n][:2]
            lt, rt = build(left), build(right)
            if lt is not None and rt is not None:
                return ("node", node_id, lt, rt)
            return lt if lt is not None else rt

        return build(dend.root)

    @staticmethod
    def _tree_shape(node):
        if node.is_leaf:
            return ("leaf", node.label)
        assert node.id.startswith("node-")
        return (
            "node",
            int(node.id.split("-")[1]),
            TestContractionOracle._tree_shape(node.children[0]),
            TestContractionOracle._tree_shape(node.children[1]),
        )

    def test_random_cuts_match_oracle(self):
        from helpers import random_distance_matrix

        rng = np.random.default_rng(61)
        for _ in range(25):
            n = int(rng.integers(4, 12))
            dist = random_distance_matrix(rng, n, "euclidean")
            dend = agglomerate(dist, "average")
            dend.labels = [f"w{i}" for i in range(n)]
            k = int(rng.integers(2, n + 1))
            labels = cut(dend, k)
            review = export_review(labels, dend, dist)
            for block in review.blocks:
                block.label = f"concept{block.cluster_id}"
            tree = build_concept_tree(review, dend)

            # map each block to its dendrogram node (the cut guarantees one)
            members_by_cluster = {
                b.cluster_id: set(b.members) for b in review.blocks
            }
            node_members = {i: {f"w{i}"} for i in range(n)}
            for m, (left, right, _, _) in enumerate(dend.merges):
                node_members[n + m] = node_members[left] | node_members[right]
            blocks_by_node = {}
            for cid, members in members_by_cluster.items():
                node = min(
                    nid for nid, mem in node_members.items() if mem == members
                )
                blocks_by_node[node] = f"concept{cid}"

            assert self._tree_shape(tree.root) == self._oracle_shape(dend, blocks_by_node)


class TestLookup:
    @pytest.fixture
    def labeled_tree(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        review.blocks[0].label = "near"
        review.blocks[0].exclusions = {"b"}
        review.blocks[1].label = "far"
        return build_concept_tree(review, dend)

    def test_member_path(self, labeled_tree):
        path = classify_lookup(labeled_tree, "a")
        assert path is not None and path[-1] == "near"
        assert path[0] == labeled_tree.root.label

    def test_excluded_token_absent(self, labeled_tree):
        assert classify_lookup(labeled_tree, "b") is None

    def test_unknown_token_absent(self, labeled_tree):
        assert classify_lookup(labeled_tree, "zzz") is None


class TestTreeSerialization:
    def test_round_trip_byte_stable(self, four_group_dendrogram, tmp_path):
        dend, dist = four_group_dendrogram
        review = export_review(cut(dend, 4), dend, dist)
        for i, block in enumerate(review.blocks):
            block.label = f"c{i}"
        tree = build_concept_tree(review, dend)
        first = tmp_path / "tree1.json"
        second = tmp_path / "tree2.json"
        tree.save(first)
        ConceptTree.load(first).save(second)
        assert first.read_bytes() == second.read_bytes()

    def test_outline(self, line_dendrogram):
        dend, dist = line_dendrogram
        review = export_review(cut(dend, 2), dend, dist)
        review.blocks[0].label = "near"
        review.blocks[1].label = "far"
        tree = build_concept_tree(review, dend)
        outline = tree.to_outline()
        assert "near" in outline and "far" in outline
        assert outline.startswith(tree.root.label)
