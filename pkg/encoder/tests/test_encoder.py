import numpy as np
import pytest
from django.test import SimpleTestCase

from core.exceptions import DataError
from deptree.relations import RelationVocab
from deptree.tree import DepTree, neighbor_relations
from encoder.encoder import (
    dual_aggregate,
    encode,
    graph_attention_layer,
    relation_representations,
    sentence_encode,
    word_pool,
)
from numerics import functional as F
from numerics.gradcheck import check_gradients
from numerics.tensor import Tensor, precision
from numerics.tests.helpers import tiny_config, tiny_params
from scripts.generate_fake_trees import DepTreeFactory, seed
from tokenizer.bpe import WordSpanMap

VOCAB = RelationVocab()


def unit_spans(words):
    return WordSpanMap(tuple((k + 1, k + 2) for k in range(words)))


def unit_ids(words, rng):
    return [1] + rng.integers(4, 12, size=words).tolist() + [2]


@pytest.mark.unit
class SentenceEncoderTests(SimpleTestCase):
    def setUp(self):
        self.config = tiny_config()
        self.params = tiny_params(self.config, relation_count=len(VOCAB))

    def test_single_token_is_finite(self):
        out = sentence_encode([5], self.params, self.config)
        self.assertEqual(out.shape, (1, 8))
        self.assertTrue(np.isfinite(out.data).all())

    def test_empty_sequence_is_rejected(self):
        with self.assertRaises(DataError):
            sentence_encode([], self.params, self.config)

    def test_positions_change_outputs(self):
        first = sentence_encode([1, 5, 6, 7, 2], self.params, self.config).data
        swapped = sentence_encode([1, 5, 7, 6, 2], self.params, self.config).data
        self.assertFalse(np.allclose(first[2], swapped[3], atol=1e-4))

    def test_gradients_through_two_layers(self):
        config = tiny_config(encoder_layers=2)
        with precision(np.float64):
            params = tiny_params(config, relation_count=len(VOCAB), dtype=np.float64)
            weights = Tensor(np.random.default_rng(2).standard_normal((5, 8)))
            tensors = [params["encoder.layer0.attn.W_q"], params["encoder.layer1.ffn.W_1"], params["embed.tokens"]]
            worst = check_gradients(
                lambda: F.sum(F.mul(sentence_encode([1, 5, 6, 7, 2], params, config), weights)),
                tensors, h=1e-6, samples=30,
            )
        self.assertLess(worst, 1e-3)


@pytest.mark.unit
class WordPoolTests(SimpleTestCase):
    def test_unit_spans_drop_specials(self):
        states = Tensor(np.arange(15.0).reshape(5, 3))
        pooled = word_pool(states, unit_spans(3))
        np.testing.assert_array_equal(pooled.data, states.data[1:4])

    def test_identical_rows_pool_to_that_row(self):
        states = Tensor([[9.0, 9.0], [1.0, 2.0], [1.0, 2.0], [7.0, 7.0]])
        pooled = word_pool(states, WordSpanMap(((1, 3),)))
        np.testing.assert_allclose(pooled.data, [[1.0, 2.0]])

    def test_matches_high_precision_mean(self):
        rng = np.random.default_rng(5)
        spans = WordSpanMap(((1, 3), (3, 4), (4, 8), (8, 10)))
        states = rng.standard_normal((11, 6)).astype(np.float32)
        pooled = word_pool(Tensor(states), spans).data
        for word, (start, end) in enumerate(spans.spans):
            expected = states[start:end].astype(np.float64).mean(axis=0)
            np.testing.assert_allclose(pooled[word], expected, atol=1e-6)


@pytest.mark.unit
class RelationRepresentationTests(SimpleTestCase):
    def setUp(self):
        self.config = tiny_config()
        self.params = tiny_params(self.config, relation_count=len(VOCAB))
        self.tree = DepTree(["a", "b", "c"], [0, 1, 1], ["root", "dobj", "amod"])
        self.relations = neighbor_relations(self.tree, VOCAB)
        self.states = Tensor(np.random.default_rng(0).standard_normal((3, 8)))

    def zero(self, *names):
        for name in names:
            self.params[name].data[...] = 0.0

    def test_zero_weights_give_zero_vectors(self):
        self.zero("graph.layer0.W_out", "graph.layer0.b_out", "graph.layer0.W_in", "graph.layer0.b_in")
        u = relation_representations(self.states, self.relations, self.params, 0)
        self.assertEqual(u.shape, (len(self.relations), 8))
        self.assertTrue((u.data == 0).all())

    def test_unit_bias_gives_all_ones_for_outgoing_entries(self):
        self.zero("graph.layer0.W_out")
        self.params["graph.layer0.b_out"].data[...] = 1.0
        u = relation_representations(self.states, self.relations, self.params, 0).data
        is_out = self.relations.arrays()[1]
        np.testing.assert_array_equal(u[is_out], np.ones((int(is_out.sum()), 8)))

    def test_gradients_match_finite_differences(self):
        with precision(np.float64):
            params = tiny_params(self.config, relation_count=len(VOCAB), dtype=np.float64)
            states = Tensor(np.random.default_rng(1).standard_normal((3, 8)), requires_grad=True)
            weights = Tensor(np.random.default_rng(2).standard_normal((len(self.relations), 8)))
            tensors = [states, params["graph.layer0.W_out"], params["graph.layer0.W_in"],
                       params["graph.relations.embedding"]]
            worst = check_gradients(
                lambda: F.sum(F.mul(relation_representations(states, self.relations, params, 0), weights)),
                tensors, h=1e-6, samples=60,
            )
        self.assertLess(worst, 1e-3)


def dense_alphas(states, relations, params, head):
    """Attention weights from a full [node x entry] score matrix with non-neighbours masked out."""
    scope = params.scope(f"graph.layer0.head{head}")
    owners = relations.arrays()[0]
    u = relation_representations(states, relations, params, 0)
    queries = states.data @ scope["W_q"].data
    keys = u.data @ scope["W_k"].data
    scores = queries @ keys.T
    mask = owners[None, :] == np.arange(states.shape[0])[:, None]
    dense = F.softmax(Tensor(scores), mask=mask).data
    return dense[owners, np.arange(len(owners))]


@pytest.mark.unit
class GraphAttentionTests(SimpleTestCase):
    def setUp(self):
        self.config = tiny_config()
        self.params = tiny_params(self.config, relation_count=len(VOCAB))
        seed(17)

    def test_single_neighbour_gets_all_the_mass(self):
        tree = DepTree(["a", "b"], [0, 1], ["root", "dobj"])
        trace = []
        states = Tensor(np.random.default_rng(3).standard_normal((2, 8)))
        graph_attention_layer(states, neighbor_relations(tree, VOCAB), self.params, self.config, 0, trace=trace)
        self.assertEqual(len(trace), self.config.graph_heads)
        for alpha in trace:
            np.testing.assert_array_equal(alpha, [1.0, 1.0])

    def test_attention_mass_sums_to_one_per_node(self):
        for _ in range(10):
            tree = DepTreeFactory()
            relations = neighbor_relations(tree, VOCAB)
            owners = relations.arrays()[0]
            trace = []
            states = Tensor(np.random.default_rng(len(tree)).standard_normal((len(tree), 8)))
            graph_attention_layer(states, relations, self.params, self.config, 0, trace=trace)
            for alpha in trace:
                totals = np.bincount(owners, weights=alpha, minlength=len(tree))
                np.testing.assert_allclose(totals, 1.0, atol=1e-6)

    def test_matches_dense_masked_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            tree = DepTreeFactory(size=int(rng.integers(2, 15)))
            relations = neighbor_relations(tree, VOCAB)
            states = Tensor(rng.standard_normal((len(tree), 8)))
            trace = []
            graph_attention_layer(states, relations, self.params, self.config, 0, trace=trace)
            for head, alpha in enumerate(trace):
                np.testing.assert_allclose(alpha, dense_alphas(states, relations, self.params, head), atol=1e-5)

    def test_distant_nodes_do_not_affect_a_word(self):
        tree = DepTree.chain(["a", "b", "c", "d", "e"])
        relations = neighbor_relations(tree, VOCAB)
        states = np.random.default_rng(4).standard_normal((5, 8)).astype(np.float32)
        before = graph_attention_layer(Tensor(states), relations, self.params, self.config, 0).data
        states[3] = 0.0
        after = graph_attention_layer(Tensor(states), relations, self.params, self.config, 0).data
        np.testing.assert_allclose(after[0], before[0], atol=1e-6)
        self.assertFalse(np.allclose(after[3], before[3]))

    def test_gradients_match_finite_differences(self):
        tree = DepTree(["a", "b", "c", "d"], [2, 0, 2, 3], ["nsubj", "root", "dobj", "amod"])
        relations = neighbor_relations(tree, VOCAB)
        with precision(np.float64):
            params = tiny_params(self.config, relation_count=len(VOCAB), dtype=np.float64)
            states = Tensor(np.random.default_rng(6).standard_normal((4, 8)), requires_grad=True)
            weights = Tensor(np.random.default_rng(7).standard_normal((4, 8)))
            tensors = [states, params["graph.layer0.head0.W_q"], params["graph.layer0.head1.W_k"],
                       params["graph.layer0.head0.W_v"], params["graph.layer0.W_o"]]
            worst = check_gradients(
                lambda: F.sum(F.mul(graph_attention_layer(states, relations, params, self.config, 0), weights)),
                tensors, h=1e-6, samples=60,
            )
        self.assertLess(worst, 1e-3)


@pytest.mark.unit
class DualAggregateTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(9)
        self.spans = WordSpanMap(((1, 2), (2, 4), (4, 5)))
        self.subwords = Tensor(rng.standard_normal((6, 4)))
        self.words = Tensor(rng.standard_normal((3, 4)))

    def test_beta_one_keeps_subword_states(self):
        out = dual_aggregate(self.subwords, self.words, self.spans, 1.0)
        np.testing.assert_array_equal(out.data, self.subwords.data)

    def test_beta_zero_gives_word_states(self):
        out = dual_aggregate(Tensor(self.subwords.data[:5]), self.words, unit_spans(3), 0.0)
        np.testing.assert_array_equal(out.data[1:4], self.words.data)

    def test_word_rows_are_broadcast_over_spans(self):
        out = dual_aggregate(self.subwords, self.words, self.spans, 0.0).data
        np.testing.assert_array_equal(out[2], self.words.data[1])
        np.testing.assert_array_equal(out[3], self.words.data[1])
        np.testing.assert_allclose(out[0], self.subwords.data[0])
        np.testing.assert_allclose(out[5], self.subwords.data[5])

    def test_half_blend_is_the_midpoint(self):
        out = dual_aggregate(Tensor([[5.0, 5.0], [2.0, 2.0], [3.0, 3.0]]), Tensor([[0.0, 0.0]]),
                             WordSpanMap(((1, 2),)), 0.5)
        np.testing.assert_allclose(out.data[1], [1.0, 1.0])


@pytest.mark.integration
class EncodeTests(SimpleTestCase):
    def setUp(self):
        self.config = tiny_config()
        self.params = tiny_params(self.config, relation_count=len(VOCAB))

    def test_outputs_are_finite_for_many_lengths(self):
        rng = np.random.default_rng(10)
        seed(10)
        for size in (1, 2, 7, 19, 40):
            tree = DepTreeFactory(size=size)
            out = encode(unit_ids(size, rng), tree, unit_spans(size), self.params, self.config, VOCAB)
            self.assertEqual(out.blended.shape, (size + 2, 8))
            self.assertEqual(out.word_states.shape, (size, 8))
            self.assertTrue(np.isfinite(out.blended.data).all())

    def test_eval_mode_is_deterministic(self):
        rng = np.random.default_rng(11)
        tree = DepTree.chain(["a", "b", "c", "d"])
        ids = unit_ids(4, rng)
        first = encode(ids, tree, unit_spans(4), self.params, self.config, VOCAB).blended.data
        second = encode(ids, tree, unit_spans(4), self.params, self.config, VOCAB).blended.data
        np.testing.assert_array_equal(first, second)

    def test_word_count_mismatch_is_rejected(self):
        with self.assertRaises(DataError):
            encode([1, 5, 6, 2], DepTree.chain(["a"]), unit_spans(2), self.params, self.config, VOCAB)

    def test_plain_encoder_skips_the_graph(self):
        config = tiny_config(use_syntax_encoder=False, beta=1.0)
        out = encode([1, 5, 6, 2], DepTree.chain(["a", "b"]), unit_spans(2), self.params, config, VOCAB)
        self.assertIsNone(out.word_states)
        self.assertIs(out.blended, out.subword_states)

    @pytest.mark.slow
    def test_gradients_through_the_whole_encoder(self):
        tree = DepTree(["a", "b", "c"], [0, 1, 1], ["root", "dobj", "amod"])
        spans = WordSpanMap(((1, 2), (2, 4), (4, 5)))
        with precision(np.float64):
            params = tiny_params(self.config, relation_count=len(VOCAB), dtype=np.float64)
            weights = Tensor(np.random.default_rng(12).standard_normal((6, 8)))
            tensors = [params["encoder.layer0.attn.W_v"], params["graph.layer0.W_out"],
                       params["graph.layer0.head1.W_q"], params["graph.relations.embedding"]]
            worst = check_gradients(
                lambda: F.sum(F.mul(encode([1, 4, 5, 6, 7, 2], tree, spans, params, self.config, VOCAB).blended,
                                    weights)),
                tensors, h=1e-6, samples=40,
            )
        self.assertLess(worst, 1e-3)
