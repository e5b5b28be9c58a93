"""
Parallel corpora with dependency trees.

A corpus is a TSV file of "source<TAB>target" lines plus two CoNLL-U
sidecars, <name>.src.conllu and <name>.tgt.conllu, aligned by sentence
index. Encoded examples are grouped into length-bucketed batches padded
with PAD ids.
"""

import logging
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from core.exceptions import DataError
from core.utils import parallel_map
from deptree.conllu import read_conllu, write_conllu
from deptree.relations import RelationVocab
from deptree.tree import DepTree, neighbor_relations, pair_targets
from tokenizer.bpe import PAD, bpe_train, encode_words

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SentencePair:
    source: DepTree
    target: DepTree

    @property
    def source_words(self):
        return self.source.words

    @property
    def target_words(self):
        return self.target.words

    @property
    def changed(self):
        return self.source.words != self.target.words


def corpus_paths(path):
    """(tsv, source sidecar, target sidecar) for a corpus path with or without the .tsv suffix."""
    path = Path(path)
    base = path.with_suffix("") if path.suffix == ".tsv" else path
    return (
        base.with_name(base.name + ".tsv"),
        base.with_name(base.name + ".src.conllu"),
        base.with_name(base.name + ".tgt.conllu"),
    )


def write_corpus(path, pairs):
    tsv, source, target = corpus_paths(path)
    tsv.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{' '.join(pair.source_words)}\t{' '.join(pair.target_words)}\n" for pair in pairs]
    tsv.write_text("".join(lines), encoding="utf-8")
    write_conllu(source, [pair.source for pair in pairs])
    write_conllu(target, [pair.target for pair in pairs])
    logger.info(f"Wrote {len(pairs)} pairs to {tsv}")
    return tsv


def read_corpus(path):
    tsv, source_path, target_path = corpus_paths(path)
    if not tsv.is_file():
        raise DataError(f"corpus not found: {tsv}")
    for sidecar in (source_path, target_path):
        if not sidecar.is_file():
            raise DataError(f"missing sidecar trees: {sidecar}")

    sentences = []
    for number, line in enumerate(tsv.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"{tsv}:{number}: expected source<TAB>target, found {len(fields)} fields")
        sentences.append((tuple(fields[0].split()), tuple(fields[1].split())))

    source_trees = read_conllu(source_path)
    target_trees = read_conllu(target_path)
    if not len(sentences) == len(source_trees) == len(target_trees):
        raise DataError(
            f"{tsv}: {len(sentences)} sentence pairs but {len(source_trees)} source and "
            f"{len(target_trees)} target trees"
        )

    pairs = []
    for index, ((source, target), source_tree, target_tree) in enumerate(
        zip(sentences, source_trees, target_trees), start=1
    ):
        if source_tree.words != source or target_tree.words != target:
            raise DataError(f"{tsv}: sentence {index} does not match the words of its trees")
        pairs.append(SentencePair(source_tree, target_tree))
    logger.info(f"Read {len(pairs)} pairs from {tsv}")
    return pairs


def corpus_vocabularies(corpora, vocab_size):
    """BPE model and relation vocabulary learned from both sides of every corpus."""
    pairs = [pair for corpus in corpora for pair in corpus]
    words = [word for pair in pairs for word in pair.source_words + pair.target_words]
    trees = [tree for pair in pairs for tree in (pair.source, pair.target)]
    return bpe_train(words, vocab_size), RelationVocab.from_trees(trees)


@dataclass
class TrainExample:
    """A sentence pair encoded for one model: ids, spans, neighbour relations and pair targets."""

    pair: SentencePair
    source_tree: DepTree
    target_tree: DepTree
    source_ids: list
    source_spans: object
    target_ids: list
    target_spans: object
    relations: object
    targets: object

    @property
    def target_words(self):
        return self.target_tree.words

    @property
    def changed(self):
        return self.pair.changed

    @property
    def num_tokens(self):
        return len(self.source_ids) + len(self.target_ids)


def build_example(pair, bpe, relation_vocab, max_distance, direction="l2r"):
    """Encode one pair; right-to-left models see the target (and its tree) mirrored."""
    target_tree = pair.target.reversed() if direction == "r2l" else pair.target
    source_ids, source_spans = encode_words(pair.source.words, bpe)
    target_ids, target_spans = encode_words(target_tree.words, bpe)
    return TrainExample(
        pair=pair,
        source_tree=pair.source,
        target_tree=target_tree,
        source_ids=source_ids,
        source_spans=source_spans,
        target_ids=target_ids,
        target_spans=target_spans,
        relations=neighbor_relations(pair.source, relation_vocab),
        targets=pair_targets(target_tree, relation_vocab, max_distance),
    )


def build_examples(pairs, bpe, relation_vocab, max_distance, direction="l2r"):
    encode = partial(
        build_example, bpe=bpe, relation_vocab=relation_vocab, max_distance=max_distance, direction=direction
    )
    return parallel_map(encode, pairs)


@dataclass
class Batch:
    examples: list
    source_ids: np.ndarray
    target_ids: np.ndarray

    def __len__(self):
        return len(self.examples)

    @property
    def source_mask(self):
        return self.source_ids != PAD

    @property
    def target_mask(self):
        return self.target_ids != PAD

    @property
    def num_tokens(self):
        return int(self.source_mask.sum() + self.target_mask.sum())


def _pad(rows, width=None):
    width = max(width or 0, max(len(row) for row in rows))
    matrix = np.full((len(rows), width), PAD, dtype=np.int64)
    for k, row in enumerate(rows):
        matrix[k, : len(row)] = row
    return matrix


def pad_batch(examples, source_width=None, target_width=None):
    """Stack examples into PAD-filled id matrices (at least the given widths)."""
    if not examples:
        raise DataError("cannot build an empty batch")
    return Batch(
        examples=list(examples),
        source_ids=_pad([ex.source_ids for ex in examples], source_width),
        target_ids=_pad([ex.target_ids for ex in examples], target_width),
    )


def make_batches(examples, batch_tokens, rng=None):
    """Length-sorted buckets of at most `batch_tokens` real tokens (one oversized example still forms a batch).

    With `rng` the order of the batches is shuffled.
    """
    if not examples:
        raise DataError("no examples to batch")
    order = sorted(range(len(examples)), key=lambda k: (examples[k].num_tokens, k))
    groups, current, used = [], [], 0
    for k in order:
        size = examples[k].num_tokens
        if current and used + size > batch_tokens:
            groups.append(current)
            current, used = [], 0
        current.append(examples[k])
        used += size
    groups.append(current)
    if rng is not None:
        groups = [groups[k] for k in rng.permutation(len(groups))]
    return [pad_batch(group) for group in groups]


def unpadded(ids, mask):
    return [int(token) for token in ids[mask]]
