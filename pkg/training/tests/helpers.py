"""Tiny synthetic corpora and models shared by the training, inference and command tests."""

from core.utils import make_rng
from numerics.tests.helpers import tiny_config
from training.checkpoint import GecModel
from training.corpus import build_examples, corpus_vocabularies
from training.synth import synth_corpus

TINY_BPE_VOCAB = 80

TINY_RUN_CONFIG = """\
d_model=8
d_ff=16
heads=2
graph_heads=2
encoder_layers=1
graph_layers=1
decoder_layers=1
max_distance=4
dropout=0.0
beam=2
max_decode_len=10
bpe_vocab_size=80
batch_tokens=120
learning_rate=0.001
seed=5
"""


def tiny_corpus(count=6, seed=0, profile="default", overrides=None):
    return synth_corpus(count, make_rng(seed), profile, overrides)


def tiny_model(pairs, seed=0, direction="l2r", bpe_vocab_size=TINY_BPE_VOCAB, **overrides):
    bpe, relations = corpus_vocabularies([pairs], bpe_vocab_size)
    return GecModel.initialise(tiny_config(**overrides), bpe, relations, seed, direction)


def tiny_examples(pairs, model):
    return build_examples(pairs, model.bpe, model.relations, model.config.max_distance, model.direction)
