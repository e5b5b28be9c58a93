"""
Dependency-tree data model and the graph algebra built on it.

Word positions are 0-based inside the algorithms; `heads` keeps the CoNLL
convention (1-based head index, 0 for the virtual root). The virtual root is
not a node: the root word has no incoming relation and never appears in
neighbour lists or pair targets.
"""

from dataclasses import dataclass

import numpy as np

from core.exceptions import TreeError

OUT = "out"
IN = "in"

ANCESTOR = 0
DESCENDANT = 1
NONE = 2
ANCESTRY_NAMES = ("ancestor", "descendant", "none")


@dataclass(frozen=True)
class DepTree:
    words: tuple
    heads: tuple
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "heads", tuple(int(h) for h in self.heads))
        object.__setattr__(self, "labels", tuple(self.labels))
        problem = find_tree_problem(self.words, self.heads, self.labels)
        if problem is not None:
            raise TreeError(problem[1])

    def __len__(self):
        return len(self.words)

    @classmethod
    def chain(cls, words, label="dep"):
        """Right-branching placeholder tree: every word headed by its left neighbour."""
        words = list(words)
        return cls(words, [0] + list(range(1, len(words))), ["root"] + [label] * (len(words) - 1))

    @property
    def root(self):
        return self.heads.index(0)

    def parent(self, node):
        head = self.heads[node]
        return None if head == 0 else head - 1

    def children(self, node):
        return [k for k, head in enumerate(self.heads) if head == node + 1]

    def depths(self):
        depth = [None] * len(self)
        for node in range(len(self)):
            path = []
            cursor = node
            while cursor is not None and depth[cursor] is None:
                path.append(cursor)
                cursor = self.parent(cursor)
            base = -1 if cursor is None else depth[cursor]
            for offset, visited in enumerate(reversed(path), start=1):
                depth[visited] = base + offset
        return np.array(depth, dtype=np.int64)

    def reversed(self):
        """Mirror image used by right-to-left models: node k becomes N-1-k."""
        n = len(self)
        heads = [0 if h == 0 else n - h + 1 for h in reversed(self.heads)]
        return DepTree(tuple(reversed(self.words)), heads, tuple(reversed(self.labels)))


def find_tree_problem(words, heads, labels):
    """(offending 0-based node or None, message) for the first structural violation, else None."""
    n = len(words)
    if n == 0:
        return None, "tree has no words"
    if len(heads) != n or len(labels) != n:
        return None, f"expected {n} heads and labels, got {len(heads)} and {len(labels)}"
    for node, head in enumerate(heads):
        if not 0 <= head <= n:
            return node, f"word {node + 1} has dangling head {head}"
        if head == node + 1:
            return node, f"word {node + 1} is its own head"
    roots = [node for node, head in enumerate(heads) if head == 0]
    if not roots:
        return None, "tree has no root (no word with head 0)"
    if len(roots) > 1:
        return roots[1], f"multiple roots: words {', '.join(str(r + 1) for r in roots)}"
    for node in range(n):
        seen = set()
        cursor = node
        while heads[cursor] != 0:
            if cursor in seen:
                return node, f"cycle through word {node + 1}"
            seen.add(cursor)
            cursor = heads[cursor] - 1
    for node, label in enumerate(labels):
        if not label:
            return node, f"word {node + 1} has an empty relation label"
    return None


@dataclass(frozen=True)
class NeighborRelation:
    """One entry of NR(v): the edge head -> dependent seen from `owner`."""

    owner: int
    direction: str
    head: int
    dependent: int
    label: int

    @property
    def neighbor(self):
        return self.dependent if self.direction == OUT else self.head


@dataclass(frozen=True)
class NeighborRelations:
    entries: tuple

    def of(self, node):
        return [entry for entry in self.entries if entry.owner == node]

    def __len__(self):
        return len(self.entries)

    def arrays(self):
        """Column arrays (owner, is_out, head, dependent, label) for vectorised attention."""
        return (
            np.array([e.owner for e in self.entries], dtype=np.int64),
            np.array([e.direction == OUT for e in self.entries], dtype=bool),
            np.array([e.head for e in self.entries], dtype=np.int64),
            np.array([e.dependent for e in self.entries], dtype=np.int64),
            np.array([e.label for e in self.entries], dtype=np.int64),
        )


def neighbor_relations(tree, vocab):
    """OUT entries for each child, then the IN entry for the head, per node in order."""
    entries = []
    if len(tree) == 1:
        entries.append(NeighborRelation(0, OUT, 0, 0, vocab.self_loop))
        return NeighborRelations(tuple(entries))
    label_ids = [vocab.id(label) for label in tree.labels]
    for node in range(len(tree)):
        for child in tree.children(node):
            entries.append(NeighborRelation(node, OUT, node, child, label_ids[child]))
        parent = tree.parent(node)
        if parent is not None:
            entries.append(NeighborRelation(node, IN, parent, node, label_ids[node]))
    return NeighborRelations(tuple(entries))


@dataclass(frozen=True)
class PairTargets:
    rel: np.ndarray
    dist: np.ndarray
    anc: np.ndarray

    def rows(self):
        n = self.rel.shape[0]
        for i in range(n):
            for j in range(n):
                yield i, j, int(self.rel[i, j]), int(self.dist[i, j]), int(self.anc[i, j])


def ancestor_matrix(tree):
    """A[i, j] is True when i lies on the root-to-j path (i == j included)."""
    n = len(tree)
    matrix = np.zeros((n, n), dtype=bool)
    for node in range(n):
        cursor = node
        while cursor is not None:
            matrix[cursor, node] = True
            cursor = tree.parent(cursor)
    return matrix


def pair_targets(tree, vocab, max_distance):
    """Relation, clamped distance and ancestry class for every ordered word pair."""
    if max_distance < 1:
        raise TreeError(f"max_distance must be >= 1, got {max_distance}")
    n = len(tree)
    rel = np.full((n, n), vocab.non_adjacent, dtype=np.int64)
    for node in range(n):
        parent = tree.parent(node)
        if parent is not None:
            rel[parent, node] = vocab.id(tree.labels[node])

    ancestors = ancestor_matrix(tree)
    depth = tree.depths()
    lca_depth = np.zeros((n, n), dtype=np.int64)
    for k in range(n):
        shared = np.outer(ancestors[k], ancestors[k])
        lca_depth = np.where(shared, np.maximum(lca_depth, depth[k]), lca_depth)
    dist = depth[:, None] + depth[None, :] - 2 * lca_depth
    dist = np.minimum(dist, max_distance)

    anc = np.full((n, n), NONE, dtype=np.int64)
    off_diagonal = ~np.eye(n, dtype=bool)
    anc[ancestors & off_diagonal] = ANCESTOR
    anc[ancestors.T & off_diagonal] = DESCENDANT
    return PairTargets(rel, dist, anc)


def check_targets(targets, tree, vocab):
    """First violated pair-target invariant as a message, or None."""
    n = len(tree)
    if not (targets.dist == targets.dist.T).all():
        return "distance matrix is not symmetric"
    if (np.diag(targets.dist) != 0).any():
        return "distance diagonal is not zero"
    labelled = int((targets.rel != vocab.non_adjacent).sum())
    if labelled != n - 1:
        return f"expected {n - 1} labelled pairs, found {labelled}"
    if not ((targets.anc == ANCESTOR) == (targets.anc.T == DESCENDANT)).all():
        return "ancestor/descendant classes are not antisymmetric"
    if (np.diag(targets.anc) != NONE).any():
        return "ancestry diagonal is not NONE"
    return None


def export_targets_tsv(trees, vocab, max_distance):
    """TSV lines "i<TAB>j<TAB>rel<TAB>dist<TAB>anc" (1-based word ids), one block per sentence."""
    blocks = []
    for tree in trees:
        targets = pair_targets(tree, vocab, max_distance)
        lines = [
            f"{i + 1}\t{j + 1}\t{vocab.label(rel)}\t{dist}\t{ANCESTRY_NAMES[anc]}"
            for i, j, rel, dist, anc in targets.rows()
        ]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
