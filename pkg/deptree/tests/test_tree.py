from collections import deque

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.exceptions import TreeError
from deptree.relations import RelationVocab
from deptree.tree import ANCESTOR, DESCENDANT, IN, NONE, OUT, DepTree, check_targets, neighbor_relations, pair_targets
from scripts.generate_fake_trees import DepTreeFactory, seed


def bfs_distances(tree):
    n = len(tree)
    adjacency = [[] for _ in range(n)]
    for node in range(n):
        parent = tree.parent(node)
        if parent is not None:
            adjacency[node].append(parent)
            adjacency[parent].append(node)
    table = np.zeros((n, n), dtype=np.int64)
    for start in range(n):
        seen = {start: 0}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for other in adjacency[node]:
                if other not in seen:
                    seen[other] = seen[node] + 1
                    queue.append(other)
        for node, distance in seen.items():
            table[start, node] = distance
    return table


def root_path(tree, node):
    path = []
    while node is not None:
        path.append(node)
        node = tree.parent(node)
    return path


@pytest.mark.unit
class DepTreeValidationTests(SimpleTestCase):
    def test_single_word_tree(self):
        tree = DepTree(["Hello"], [0], ["root"])
        self.assertEqual(len(tree), 1)
        self.assertEqual(tree.root, 0)

    def test_rejects_structural_violations(self):
        cases = {
            "two roots": ([0, 0], ["root", "root"]),
            "cycle": ([0, 3, 2], ["root", "dep", "dep"]),
            "dangling": ([0, 5], ["root", "dep"]),
            "no root": ([2, 1], ["dep", "dep"]),
        }
        for name, (heads, labels) in cases.items():
            with self.subTest(case=name), self.assertRaises(TreeError):
                DepTree(["w"] * len(heads), heads, labels)

    def test_reversed_mirrors_structure(self):
        tree = DepTree(["a", "b", "c"], [0, 1, 2], ["root", "dobj", "amod"])
        mirrored = tree.reversed()
        self.assertEqual(mirrored.words, ("c", "b", "a"))
        self.assertEqual(mirrored.heads, (2, 3, 0))
        self.assertEqual(mirrored.reversed(), tree)


@pytest.mark.unit
class NeighborRelationTests(SimpleTestCase):
    def setUp(self):
        self.vocab = RelationVocab()

    def test_two_node_tree(self):
        tree = DepTree(["a", "b"], [0, 1], ["root", "dobj"])
        relations = neighbor_relations(tree, self.vocab)
        (out,) = relations.of(0)
        (inc,) = relations.of(1)
        self.assertEqual((out.direction, out.head, out.dependent), (OUT, 0, 1))
        self.assertEqual((inc.direction, inc.head, inc.dependent), (IN, 0, 1))
        self.assertEqual(out.label, self.vocab.id("dobj"))

    def test_star_center_lists_every_child(self):
        tree = DepTree(list("cxyz"), [0, 1, 1, 1], ["root", "det", "amod", "dep"])
        self.assertEqual(len(neighbor_relations(tree, self.vocab).of(0)), 3)

    def test_single_word_gets_self_loop(self):
        relations = neighbor_relations(DepTree(["Hi"], [0], ["root"]), self.vocab)
        (entry,) = relations.entries
        self.assertEqual(entry.label, self.vocab.self_loop)

    def test_random_trees_have_two_entries_per_edge(self):
        seed(11)
        rng = np.random.default_rng(11)
        for _ in range(50):
            tree = DepTreeFactory(size=int(rng.integers(2, 30)))
            relations = neighbor_relations(tree, self.vocab)
            self.assertEqual(len(relations), 2 * (len(tree) - 1))
            for node in range(len(tree)):
                self.assertGreaterEqual(len(relations.of(node)), 1)


@pytest.mark.unit
class PairTargetTests(SimpleTestCase):
    def setUp(self):
        self.vocab = RelationVocab()

    def test_chain(self):
        tree = DepTree(["a", "b", "c"], [0, 1, 2], ["root", "dobj", "amod"])
        targets = pair_targets(tree, self.vocab, 16)
        self.assertEqual(targets.dist[0, 2], 2)
        self.assertEqual(targets.anc[0, 2], ANCESTOR)
        self.assertEqual(targets.anc[2, 0], DESCENDANT)
        self.assertEqual(targets.rel[0, 2], self.vocab.non_adjacent)
        self.assertEqual(targets.rel[0, 1], self.vocab.id("dobj"))
        self.assertEqual(targets.rel[1, 0], self.vocab.non_adjacent)
        np.testing.assert_array_equal(np.diag(targets.anc), [NONE] * 3)

    def test_distance_is_clamped(self):
        tree = DepTree.chain(list("abcdef"))
        targets = pair_targets(tree, self.vocab, 3)
        self.assertEqual(targets.dist[0, 5], 3)
        self.assertEqual(targets.dist.max(), 3)

    @pytest.mark.slow
    def test_random_trees_match_brute_force_oracles(self):
        seed(2024)
        rng = np.random.default_rng(2024)
        for _ in range(200):
            tree = DepTreeFactory(size=int(rng.integers(1, 41)))
            targets = pair_targets(tree, self.vocab, 16)
            np.testing.assert_array_equal(targets.dist, np.minimum(bfs_distances(tree), 16))
            n = len(tree)
            for i in range(n):
                for j in range(n):
                    expected_anc = NONE
                    if i != j and i in root_path(tree, j):
                        expected_anc = ANCESTOR
                    elif i != j and j in root_path(tree, i):
                        expected_anc = DESCENDANT
                    self.assertEqual(targets.anc[i, j], expected_anc)
                    expected_rel = self.vocab.non_adjacent
                    if tree.parent(j) == i:
                        expected_rel = self.vocab.id(tree.labels[j])
                    self.assertEqual(targets.rel[i, j], expected_rel)
            self.assertIsNone(check_targets(targets, tree, self.vocab))
