import tempfile
from pathlib import Path

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.exceptions import DataError
from core.utils import make_rng
from tokenizer.bpe import BOS, EOS, PAD, decode
from training.corpus import corpus_paths, make_batches, pad_batch, read_corpus, unpadded, write_corpus
from training.tests.helpers import tiny_corpus, tiny_examples, tiny_model


@pytest.mark.unit
class CorpusFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.base = Path(self.tmp.name) / "toy"

    def test_paths_with_and_without_suffix(self):
        expected = (Path("d/x.tsv"), Path("d/x.src.conllu"), Path("d/x.tgt.conllu"))
        self.assertEqual(corpus_paths("d/x"), expected)
        self.assertEqual(corpus_paths("d/x.tsv"), expected)

    def test_written_corpus_reads_back(self):
        pairs = tiny_corpus(12, seed=2)
        tsv = write_corpus(self.base, pairs)
        self.assertEqual(read_corpus(tsv), pairs)
        first = tsv.read_text(encoding="utf-8").splitlines()[0]
        self.assertEqual(first, f"{' '.join(pairs[0].source_words)}\t{' '.join(pairs[0].target_words)}")

    def test_missing_sidecar(self):
        write_corpus(self.base, tiny_corpus(3))
        corpus_paths(self.base)[2].unlink()
        with self.assertRaisesMessage(DataError, "missing sidecar trees"):
            read_corpus(self.base)

    def test_tree_count_mismatch(self):
        tsv = write_corpus(self.base, tiny_corpus(3))
        tsv.write_text(tsv.read_text(encoding="utf-8") + "a b\ta b\n", encoding="utf-8")
        with self.assertRaises(DataError):
            read_corpus(self.base)

    def test_malformed_line(self):
        tsv = write_corpus(self.base, tiny_corpus(1))
        tsv.write_text("only one field\n", encoding="utf-8")
        with self.assertRaisesMessage(DataError, "expected source<TAB>target"):
            read_corpus(self.base)


@pytest.mark.unit
class ExampleAndBatchTests(SimpleTestCase):
    def setUp(self):
        self.pairs = tiny_corpus(10, seed=1)
        self.model = tiny_model(self.pairs)
        self.examples = tiny_examples(self.pairs, self.model)

    def test_example_encodings_frame_the_words(self):
        example = self.examples[0]
        self.assertEqual(example.source_ids[0], BOS)
        self.assertEqual(example.target_ids[-1], EOS)
        self.assertEqual(decode(example.target_ids, self.model.bpe), list(self.pairs[0].target_words))
        self.assertEqual(len(example.source_spans), len(self.pairs[0].source_words))
        self.assertEqual(example.targets.dist.shape, (len(example.target_tree),) * 2)

    def test_right_to_left_examples_mirror_the_target(self):
        model = tiny_model(self.pairs, direction="r2l")
        example = tiny_examples(self.pairs[:1], model)[0]
        self.assertEqual(decode(example.target_ids, model.bpe), list(reversed(self.pairs[0].target_words)))
        self.assertEqual(example.target_tree, self.pairs[0].target.reversed())
        self.assertEqual(example.source_tree, self.pairs[0].source)

    def test_batches_respect_the_token_budget(self):
        budget = 60
        batches = make_batches(self.examples, budget)
        seen = [example for batch in batches for example in batch.examples]
        self.assertEqual(sorted(map(id, seen)), sorted(map(id, self.examples)))
        for batch in batches:
            self.assertTrue(len(batch) == 1 or batch.num_tokens <= budget)

    def test_shuffled_batch_order_is_seeded(self):
        first = [[id(ex) for ex in b.examples] for b in make_batches(self.examples, 60, make_rng(3))]
        second = [[id(ex) for ex in b.examples] for b in make_batches(self.examples, 60, make_rng(3))]
        self.assertEqual(first, second)

    def test_padding_and_masks(self):
        batch = pad_batch(self.examples[:3], source_width=40)
        self.assertEqual(batch.source_ids.shape, (3, 40))
        for row, example in enumerate(batch.examples):
            self.assertEqual(int(batch.source_mask[row].sum()), len(example.source_ids))
            self.assertEqual(unpadded(batch.target_ids[row], batch.target_mask[row]), example.target_ids)
        self.assertTrue(np.all(batch.source_ids[~batch.source_mask] == PAD))

    def test_empty_inputs(self):
        with self.assertRaises(DataError):
            pad_batch([])
        with self.assertRaises(DataError):
            make_batches([], 100)
