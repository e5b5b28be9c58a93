"""
Source-side encoding.

A Transformer sentence encoder produces sub-word states H; word states are
span averages of H; the syntax-guided encoder refines them with graph
attention restricted to each word's neighbour relations in the source tree;
dual aggregation blends the word states back into every sub-word position.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import DataError, TreeError
from deptree.tree import neighbor_relations
from numerics import functional as F
from numerics.layers import EVAL, add_and_norm, embed, feed_forward, linear, multi_head_attention
from numerics.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class EncoderOutput:
    subword_states: Tensor
    word_states: Optional[Tensor]
    blended: Tensor
    source_ids: list
    spans: object


def sentence_encode(ids, params, config, mode=EVAL):
    """H^{L1}: embeddings plus position encoding through the self-attention stack."""
    if len(ids) == 0:
        raise DataError("cannot encode an empty sequence")
    x = embed(ids, params["embed.tokens"], mode)
    for layer in range(config.encoder_layers):
        scope = params.scope(f"encoder.layer{layer}")
        x = add_and_norm(
            x, multi_head_attention(x, x, scope.scope("attn"), config.heads, mode=mode), scope.scope("norm1"),
            config.layer_norm_eps,
        )
        x = add_and_norm(x, feed_forward(x, scope.scope("ffn"), mode), scope.scope("norm2"), config.layer_norm_eps)
    return x


def word_pool(subword_states, spans):
    pooling = Tensor(spans.pooling_matrix(dtype=subword_states.dtype), dtype=subword_states.dtype)
    return F.matmul(pooling, subword_states)


def _directional(features, rows, weight, bias):
    return F.relu(linear(F.index_select(features, rows), weight, bias))


def relation_representations(word_states, relations, params, layer):
    """u for every NR entry: ReLU([h_head ; e_r ; h_dependent] W + b), W_out for OUT and W_in for IN entries."""
    scope = params.scope(f"graph.layer{layer}")
    table = params["graph.relations.embedding"]
    _, is_out, heads, dependents, labels = relations.arrays()
    if labels.size and (labels.min() < 0 or labels.max() >= table.shape[0]):
        raise TreeError(f"relation id out of range for {table.shape[0]} embeddings")

    features = F.concat(
        [F.index_select(word_states, heads), F.index_select(table, labels), F.index_select(word_states, dependents)],
        axis=-1,
    )
    out_rows = np.flatnonzero(is_out)
    in_rows = np.flatnonzero(~is_out)
    parts = []
    if out_rows.size:
        parts.append(_directional(features, out_rows, scope["W_out"], scope["b_out"]))
    if in_rows.size:
        parts.append(_directional(features, in_rows, scope["W_in"], scope["b_in"]))
    stacked = F.concat(parts, axis=0) if len(parts) > 1 else parts[0]
    order = np.concatenate([out_rows, in_rows])
    return F.index_select(stacked, np.argsort(order, kind="stable"))


def graph_attention_layer(word_states, relations, params, config, layer, mode=EVAL, trace=None):
    """One syntax-guided layer: per-head attention over NR(v_i), head merge, then two residual blocks.

    When `trace` is a list, the attention weights of each head (one value per
    NR entry, in entry order) are appended to it.
    """
    scope = params.scope(f"graph.layer{layer}")
    n = word_states.shape[0]
    owners = relations.arrays()[0]
    u = relation_representations(word_states, relations, params, layer)
    gather = np.zeros((n, len(owners)), dtype=word_states.dtype)
    gather[owners, np.arange(len(owners))] = 1.0
    gather = Tensor(gather, dtype=word_states.dtype)

    heads = []
    for head in range(config.graph_heads):
        head_scope = scope.scope(f"head{head}")
        queries = F.index_select(F.matmul(word_states, head_scope["W_q"]), owners)
        keys = F.matmul(u, head_scope["W_k"])
        values = F.matmul(u, head_scope["W_v"])
        alpha = F.segment_softmax(F.sum(F.mul(keys, queries), axis=1), owners, n)
        if trace is not None:
            trace.append(alpha.data.copy())
        weighted = F.mul(F.reshape(alpha, (len(owners), 1)), values)
        heads.append(F.matmul(gather, weighted))

    merged = F.concat(heads, axis=-1) if len(heads) > 1 else heads[0]
    aggregated = mode.drop(F.matmul(merged, scope["W_o"]))
    states = add_and_norm(word_states, aggregated, scope.scope("norm1"), config.layer_norm_eps)
    return add_and_norm(states, feed_forward(states, scope.scope("ffn"), mode), scope.scope("norm2"),
                        config.layer_norm_eps)


def dual_aggregate(subword_states, word_states, spans, beta):
    """O = beta * H + (1 - beta) * (word state of each position); BOS/EOS rows keep H."""
    owner = spans.word_of_position()
    dtype = subword_states.dtype
    scatter = np.zeros((len(owner), word_states.shape[0]), dtype=dtype)
    inside = owner >= 0
    scatter[np.flatnonzero(inside), owner[inside]] = 1.0
    specials = Tensor((~inside).astype(dtype)[:, None], dtype=dtype)
    broadcast = F.add(F.matmul(Tensor(scatter, dtype=dtype), word_states), F.mul(subword_states, specials))
    return F.add(F.mul(subword_states, float(beta)), F.mul(broadcast, float(1.0 - beta)))


def encode(ids, tree, spans, params, config, relation_vocab, mode=EVAL, relations=None):
    """Run the full encoder for one source sentence."""
    if len(tree) != len(spans):
        raise DataError(f"tree has {len(tree)} words but the encoding has {len(spans)}")
    subword_states = sentence_encode(ids, params, config, mode)
    if not config.use_syntax_encoder:
        return EncoderOutput(subword_states, None, subword_states, list(ids), spans)

    if relations is None:
        relations = neighbor_relations(tree, relation_vocab)
    word_states = word_pool(subword_states, spans)
    for layer in range(config.graph_layers):
        word_states = graph_attention_layer(word_states, relations, params, config, layer, mode)
    blended = dual_aggregate(subword_states, word_states, spans, config.beta)
    return EncoderOutput(subword_states, word_states, blended, list(ids), spans)
