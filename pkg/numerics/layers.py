"""
Transformer building blocks shared by the encoder and decoder apps.

Parameter lookups go through a Parameters scope so each block reads its
arrays by short name ("attn.W_q", "ffn.W_1", "norm1.gamma").
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import functional as F
from .tensor import Tensor


@dataclass(frozen=True)
class Mode:
    """Train/eval switch carrying the dropout rate and the step's generator."""

    training: bool = False
    dropout: float = 0.0
    rng: Optional[np.random.Generator] = None

    @classmethod
    def train(cls, rng, dropout):
        return cls(training=True, dropout=dropout, rng=rng)

    @classmethod
    def eval(cls):
        return EVAL

    def drop(self, x):
        return F.dropout(x, self.dropout, self.rng, self.training)


EVAL = Mode()


def linear(x, weight, bias=None):
    out = F.matmul(x, weight)
    return out if bias is None else F.add(out, bias)


def sinusoidal_positions(length, d_model, dtype=np.float32):
    positions = np.arange(length)[:, None]
    rates = np.exp(-math.log(10000.0) * (np.arange(0, d_model, 2) / d_model))
    table = np.zeros((length, d_model))
    table[:, 0::2] = np.sin(positions * rates)
    table[:, 1::2] = np.cos(positions * rates[: d_model // 2])
    return table.astype(dtype)


def embed(ids, table, mode=EVAL):
    """Scaled token embeddings plus fixed sinusoidal position encoding."""
    d_model = table.shape[1]
    tokens = F.mul(F.index_select(table, ids), math.sqrt(d_model))
    positions = Tensor(sinusoidal_positions(len(ids), d_model, dtype=table.dtype), dtype=table.dtype)
    return mode.drop(F.add(tokens, positions))


def scaled_attention(queries, keys, values, mask=None):
    scores = F.mul(F.matmul(queries, F.transpose(keys)), 1.0 / math.sqrt(queries.shape[-1]))
    return F.matmul(F.softmax(scores, mask), values)


def multi_head_attention(queries, memory, scope, heads, mask=None, mode=EVAL):
    """Standard multi-head attention; heads slice the projected columns."""
    q = linear(queries, scope["W_q"], scope["b_q"])
    k = linear(memory, scope["W_k"], scope["b_k"])
    v = linear(memory, scope["W_v"], scope["b_v"])
    d_k = q.shape[-1] // heads
    outputs = []
    for head in range(heads):
        cols = (slice(None), slice(head * d_k, (head + 1) * d_k))
        outputs.append(scaled_attention(q[cols], k[cols], v[cols], mask))
    merged = F.concat(outputs, axis=-1) if heads > 1 else outputs[0]
    return mode.drop(linear(merged, scope["W_o"], scope["b_o"]))


def feed_forward(x, scope, mode=EVAL):
    hidden = F.relu(linear(x, scope["W_1"], scope["b_1"]))
    return mode.drop(linear(hidden, scope["W_2"], scope["b_2"]))


def add_and_norm(residual, update, scope, eps):
    """LayerNorm(residual + update) with the scope's gamma/beta."""
    return F.layer_norm(F.add(residual, update), scope["gamma"], scope["beta"], eps)


def causal_mask(length):
    return np.tril(np.ones((length, length), dtype=bool))
