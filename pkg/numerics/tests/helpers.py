"""Small model configurations shared by the test suites."""

import numpy as np

from core.config import ModelConfig
from numerics.parameters import init_parameters

TINY = dict(
    d_model=8,
    d_ff=16,
    heads=2,
    graph_heads=2,
    encoder_layers=1,
    graph_layers=1,
    decoder_layers=1,
    max_distance=4,
    dropout=0.0,
    beam=3,
    max_decode_len=12,
)


def tiny_config(**overrides):
    return ModelConfig(**{**TINY, **overrides})


def tiny_params(config=None, vocab_size=12, relation_count=5, seed=0, dtype=np.float32):
    config = config or tiny_config()
    return init_parameters(config, vocab_size, relation_count, np.random.default_rng(seed), dtype=dtype)
