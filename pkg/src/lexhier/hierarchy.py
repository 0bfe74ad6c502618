"""Review files and labeled concept trees over a dendrogram cut.

The flat clusters from a cut are exported to a hand-editable review
file; a reviewer names each cluster and may exclude members that were
merged inappropriately.  Building the concept tree keeps each labeled
cluster as a leaf and mirrors the dendrogram's merge order among the
cluster roots, contracting away single-child chains.  Branches whose
members are all excluded are dropped.

Review file syntax (UTF-8)::

    # cluster 0: <label>
    token
    !token          <- exclusion: references a member line of the block
    <blank line between blocks>

Labels may be left blank at export; the tree build then fails with
MissingLabels until the reviewer fills them in.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .cluster import Dendrogram, DistanceMatrix

_HEADER = re.compile(r"^#\s*cluster\s+(\d+)\s*:\s*(.*)$")


class ReviewParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ReviewIssue:
    code: str
    cluster_id: int
    token: str
    message: str


class ReviewValidationError(ValueError):
    def __init__(self, issues: Sequence[ReviewIssue]):
        super().__init__("; ".join(issue.message for issue in issues))
        self.issues = list(issues)


class MissingLabels(ValueError):
    """A retained block has no label; the tree cannot be built."""


class EmptyTree(ValueError):
    """Every member of every block is excluded."""


class InconsistentReview(ValueError):
    """Review blocks do not correspond to disjoint dendrogram subtrees."""


@dataclass
class ReviewBlock:
    cluster_id: int
    label: str
    members: list[str]
    exclusions: set[str] = field(default_factory=set)

    def retained(self) -> list[str]:
        return [t for t in self.members if t not in self.exclusions]


@dataclass
class ClusterReviewFile:
    blocks: list[ReviewBlock]

    def format_text(self) -> str:
        chunks = []
        for block in self.blocks:
            lines = [f"# cluster {block.cluster_id}: {block.label}".rstrip() + "\n"]
            for token in block.members:
                lines.append(token + "\n")
                if token in block.exclusions:
                    lines.append("!" + token + "\n")
            chunks.append("".join(lines))
        return "\n".join(chunks)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.format_text(), encoding="utf-8")


def export_review(
    assignment,
    dend: Dendrogram,
    dist: DistanceMatrix | None = None,
) -> ClusterReviewFile:
    """One unlabeled block per cluster, members closest-to-center first.

    Member order within a block is by mean distance to the other
    members (ascending) when a distance matrix is given, else by leaf
    id.  Requires dendrogram leaf labels (the token sidecar).
    """
    if dend.labels is None:
        raise ValueError("dendrogram carries no leaf labels; load the sidecar")
    labels = np.asarray(assignment)
    if labels.shape != (dend.n_leaves,):
        raise ValueError("assignment does not cover the dendrogram leaves")
    square = dist.square() if dist is not None else None
    blocks = []
    for cluster_id in sorted(set(int(c) for c in labels)):
        ids = np.flatnonzero(labels == cluster_id)
        if square is not None and len(ids) > 1:
            spread = square[np.ix_(ids, ids)].mean(axis=1)
            ids = ids[np.argsort(spread, kind="stable")]
        blocks.append(
            ReviewBlock(
                cluster_id=cluster_id,
                label="",
                members=[dend.labels[i] for i in ids],
            )
        )
    return ClusterReviewFile(blocks=blocks)


def parse_review(text: str) -> ClusterReviewFile:
    """Parse review syntax; raises :class:`ReviewParseError` with the line number."""
    blocks: list[ReviewBlock] = []
    current: ReviewBlock | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            current = None
            continue
        header = _HEADER.match(line)
        if header:
            current = ReviewBlock(
                cluster_id=int(header.group(1)),
                label=header.group(2).strip(),
                members=[],
            )
            blocks.append(current)
            continue
        if line.startswith("#"):
            raise ReviewParseError(f"malformed header {line!r}", lineno)
        if current is None:
            raise ReviewParseError("token outside any '# cluster' block", lineno)
        if line.startswith("!"):
            token = line[1:].strip()
            if not token:
                raise ReviewParseError("empty exclusion", lineno)
            current.exclusions.add(token)
        else:
            if len(line.split()) != 1:
                raise ReviewParseError(f"expected one token per line, got {line!r}", lineno)
            current.members.append(line)
    return ClusterReviewFile(blocks=blocks)


def validate_review(review: ClusterReviewFile) -> tuple[list[ReviewIssue], list[ReviewIssue]]:
    """(errors, warnings): duplicates and unknown exclusions are errors;
    a blank label on a block with retained members is a warning (it only
    blocks tree building)."""
    errors: list[ReviewIssue] = []
    warnings_: list[ReviewIssue] = []
    seen: dict[str, int] = {}
    for block in review.blocks:
        block_seen = set()
        for token in block.members:
            if token in block_seen or (token in seen and seen[token] != block.cluster_id):
                errors.append(
                    ReviewIssue(
                        code="duplicate-member",
                        cluster_id=block.cluster_id,
                        token=token,
                        message=f"token {token!r} listed more than once "
                        f"(cluster {block.cluster_id})",
                    )
                )
            block_seen.add(token)
            seen.setdefault(token, block.cluster_id)
        for token in sorted(block.exclusions):
            if token not in block_seen:
                errors.append(
                    ReviewIssue(
                        code="unknown-exclusion",
                        cluster_id=block.cluster_id,
                        token=token,
                        message=f"exclusion !{token} does not match a member of "
                        f"cluster {block.cluster_id}",
                    )
                )
        if not block.label and block.retained():
            warnings_.append(
                ReviewIssue(
                    code="missing-label",
                    cluster_id=block.cluster_id,
                    token="",
                    message=f"cluster {block.cluster_id} has no label",
                )
            )
    return errors, warnings_


def import_review(source: str | Path) -> ClusterReviewFile:
    """Parse and validate a review file (path or literal text).

    Raises :class:`ReviewValidationError` enumerating every duplicate
    member and unknown exclusion.  Blank labels pass import and fail at
    :func:`build_concept_tree`.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    review = parse_review(text)
    errors, _ = validate_review(review)
    if errors:
        raise ReviewValidationError(errors)
    return review


# ---------------------------------------------------------------------------
# Concept tree
# ---------------------------------------------------------------------------

@dataclass
class ConceptNode:
    id: str
    label: str
    children: list["ConceptNode"] = field(default_factory=list)
    members: list[str] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.members is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"id": self.id, "label": self.label, "members": list(self.members)}
        return {
            "id": self.id,
            "label": self.label,
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConceptNode":
        if "members" in data:
            return cls(id=data["id"], label=data["label"], members=list(data["members"]))
        return cls(
            id=data["id"],
            label=data["label"],
            children=[cls.from_dict(c) for c in data["children"]],
        )


@dataclass
class ConceptTree:
    root: ConceptNode

    def lookup(self, token: str) -> list[str] | None:
        """Root-to-leaf label path for a member token; None when absent."""

        def walk(node: ConceptNode, path: list[str]) -> list[str] | None:
            path = path + [node.label]
            if node.is_leaf:
                return path if token in node.members else None
            for child in node.children:
                found = walk(child, path)
                if found:
                    return found
            return None

        return walk(self.root, [])

    def leaves(self) -> list[ConceptNode]:
        out = []

        def walk(node: ConceptNode):
            if node.is_leaf:
                out.append(node)
            else:
                for child in node.children:
                    walk(child)

        walk(self.root)
        return out

    def to_outline(self, indent: str = "  ") -> str:
        lines = []

        def walk(node: ConceptNode, depth: int):
            if node.is_leaf:
                lines.append(f"{indent * depth}{node.label}: {', '.join(node.members)}")
            else:
                lines.append(f"{indent * depth}{node.label}")
                for child in node.children:
                    walk(child, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.root.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "ConceptTree":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(root=ConceptNode.from_dict(data))


def classify_lookup(tree: ConceptTree, token: str) -> list[str] | None:
    """Concept path for a known member token; None for excluded/unknown tokens."""
    return tree.lookup(token)


def _pairwise_lca(parent: dict[int, int], a: int, b: int) -> int:
    ancestors = {a}
    node = a
    while node in parent:
        node = parent[node]
        ancestors.add(node)
    node = b
    while node not in ancestors:
        node = parent[node]
    return node


def build_concept_tree(review: ClusterReviewFile, dend: Dendrogram) -> ConceptTree:
    """Labeled leaves under internal nodes that mirror the dendrogram merges.

    Each retained block becomes a leaf at its members' lowest common
    ancestor; internal nodes are created where two retained subtrees
    merge and default to the label ``node-<id>``.  Fully excluded
    blocks are dropped; nested or overlapping blocks raise
    :class:`InconsistentReview`.
    """
    if dend.labels is None:
        raise ValueError("dendrogram carries no leaf labels; load the sidecar")
    leaf_of = {token: i for i, token in enumerate(dend.labels)}
    n = dend.n_leaves
    parent: dict[int, int] = {}
    for m, (left, right, _, _) in enumerate(dend.merges):
        parent[left] = n + m
        parent[right] = n + m

    unlabeled = []
    block_nodes: dict[int, ConceptNode] = {}
    for block in review.blocks:
        kept = block.retained()
        if not kept:
            continue
        if not block.label:
            unlabeled.append(block.cluster_id)
            continue
        unknown = [t for t in block.members if t not in leaf_of]
        if unknown:
            raise InconsistentReview(
                f"cluster {block.cluster_id} names tokens not in the dendrogram: {unknown[:3]}"
            )
        ids = [leaf_of[t] for t in block.members]
        node_id = ids[0]
        for other in ids[1:]:
            node_id = _pairwise_lca(parent, node_id, other)
        if node_id in block_nodes:
            raise InconsistentReview(
                f"clusters map to the same dendrogram node {node_id}"
            )
        block_nodes[node_id] = ConceptNode(
            id=f"cluster-{block.cluster_id}", label=block.label, members=kept
        )
    if unlabeled:
        raise MissingLabels(f"unlabeled clusters: {unlabeled}")
    if not block_nodes:
        raise EmptyTree("every member of every block is excluded")

    reps: dict[int, ConceptNode] = {
        node: cnode for node, cnode in block_nodes.items() if node < n
    }
    for m in range(len(dend.merges)):
        node = n + m
        left, right = dend.merges[m][0], dend.merges[m][1]
        rep_left = reps.pop(left, None)
        rep_right = reps.pop(right, None)
        if rep_left is not None and rep_right is not None:
            combined: ConceptNode | None = ConceptNode(
                id=f"node-{node}",
                label=f"node-{node}",
                children=[rep_left, rep_right],
            )
        else:
            combined = rep_left if rep_left is not None else rep_right
        if node in block_nodes:
            if combined is not None:
                raise InconsistentReview(
                    f"cluster at node {node} contains another cluster's subtree"
                )
            combined = block_nodes[node]
        if combined is not None:
            reps[node] = combined

    root = reps.get(dend.root)
    if root is None:
        # single retained block whose LCA is a leaf of a 1-merge tree etc.
        root = next(iter(reps.values()))
    return ConceptTree(root=root)
