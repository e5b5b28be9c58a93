"""
Target-side decoding with a copy mechanism.

The final distribution at each position is the gated mixture
p = eta * p_gen + (1 - eta) * p_copy, where p_copy scatters a single-head
attention over the source positions into vocabulary space.
"""

import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import DataError
from numerics import functional as F
from numerics.layers import EVAL, add_and_norm, causal_mask, embed, feed_forward, linear, multi_head_attention
from numerics.tensor import Tensor


@dataclass
class DecoderOutput:
    states: Tensor
    generation: Tensor
    copy: Tensor
    gate: Tensor
    mixed: Tensor


def decode_states(prefix_ids, memory, params, config, mode=EVAL):
    """H-bar for a BOS-initial prefix; position i attends to positions <= i and to every memory row."""
    if len(prefix_ids) == 0:
        raise DataError("decoder prefix is empty")
    x = embed(prefix_ids, params["embed.tokens"], mode)
    mask = causal_mask(len(prefix_ids))
    eps = config.layer_norm_eps
    for layer in range(config.decoder_layers):
        scope = params.scope(f"decoder.layer{layer}")
        x = add_and_norm(x, multi_head_attention(x, x, scope.scope("self_attn"), config.heads, mask, mode),
                         scope.scope("norm1"), eps)
        x = add_and_norm(x, multi_head_attention(x, memory, scope.scope("cross_attn"), config.heads, mode=mode),
                         scope.scope("norm2"), eps)
        x = add_and_norm(x, feed_forward(x, scope.scope("ffn"), mode), scope.scope("norm3"), eps)
    return x


def generation_logits(states, params):
    return linear(states, params["generator.W"], params["generator.b"])


def generation_distribution(states, params):
    return F.softmax(generation_logits(states, params))


def copy_attention(states, memory, params):
    """Scaled dot-product weights [M x N] from decoder states to encoder output rows."""
    queries = F.matmul(states, params["copy.W_q"])
    keys = F.matmul(memory, params["copy.W_k"])
    scores = F.mul(F.matmul(queries, F.transpose(keys)), 1.0 / math.sqrt(queries.shape[-1]))
    return F.softmax(scores)


def scatter_to_vocabulary(attention, source_ids, vocab_size):
    """Sum attention mass of source positions sharing a token id."""
    onehot = np.zeros((len(source_ids), vocab_size), dtype=attention.dtype)
    onehot[np.arange(len(source_ids)), np.asarray(source_ids, dtype=np.int64)] = 1.0
    return F.matmul(attention, Tensor(onehot, dtype=attention.dtype))


def copy_distribution(states, memory, source_ids, params):
    if memory.shape[0] != len(source_ids):
        raise DataError(f"{len(source_ids)} source ids for {memory.shape[0]} encoder rows")
    vocab_size = params["generator.b"].shape[0]
    return scatter_to_vocabulary(copy_attention(states, memory, params), source_ids, vocab_size)


def generation_gate(states, params):
    """eta = sigmoid(H-bar w + b), one value per position, shaped [M x 1]."""
    return F.sigmoid(linear(states, params["gate.w"], params["gate.b"]))


def mix(generation, copy, gate):
    """Row-wise convex combination gate * generation + (1 - gate) * copy."""
    if not isinstance(gate, Tensor):
        gate = Tensor(np.asarray(gate, dtype=generation.dtype).reshape(-1, 1), dtype=generation.dtype)
    return F.add(F.mul(gate, generation), F.mul(F.sub(1.0, gate), copy))


def decode(prefix_ids, encoded, params, config, mode=EVAL):
    """Full decoder pass over a prefix given an EncoderOutput."""
    memory = encoded.blended
    states = decode_states(prefix_ids, memory, params, config, mode)
    generation = generation_distribution(states, params)
    copy = copy_distribution(states, memory, encoded.source_ids, params)
    gate = generation_gate(states, params)
    return DecoderOutput(states, generation, copy, gate, mix(generation, copy, gate))
