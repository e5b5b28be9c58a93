"""
Dependency-tree-correction heads.

Decoder states are pooled into target-word states; for ordered word pairs an
MLP over [h_i ; h_j] feeds three classifiers: relation label (L + 1 classes,
the last one meaning "not adjacent"), clamped tree distance (D + 1) and
ancestry (ancestor / descendant / none). The heads only shape training.
"""

import itertools

import numpy as np

from core.exceptions import DataError
from numerics import functional as F
from numerics.layers import linear
from numerics.parameters import TREECORR_TASKS
from numerics.tensor import Tensor


def word_states(states, spans):
    """Average decoder states over each target word's span (positions of the decoder input)."""
    pooling = spans.pooling_matrix(dtype=states.dtype)[:, : states.shape[0]]
    if spans.spans and spans.spans[-1][1] > states.shape[0]:
        raise DataError(f"span {spans.spans[-1]} exceeds {states.shape[0]} decoder positions")
    return F.matmul(Tensor(pooling, dtype=states.dtype), states)


def _mlp_scope(params, config, task):
    prefix = "treecorr.mlp" if config.share_treecorr_mlp else f"treecorr.{task}.mlp"
    return params.scope(prefix)


def pair_hidden(words, first, second, scope):
    if len(first) and (max(max(first), max(second)) >= words.shape[0] or min(min(first), min(second)) < 0):
        raise DataError(f"pair index out of range for {words.shape[0]} words")
    pairs = F.concat([F.index_select(words, first), F.index_select(words, second)], axis=-1)
    return F.relu(linear(pairs, scope["W"], scope["b"]))


def classify(hidden, params, task):
    scope = params.scope(f"treecorr.{task}")
    return F.add(F.matmul(hidden, F.transpose(scope["W"])), scope["b"])


def pair_logits(words, first, second, params, config, task):
    """Class logits for the ordered pairs (first[k], second[k]) of target-word states."""
    hidden = pair_hidden(words, first, second, _mlp_scope(params, config, task))
    return classify(hidden, params, task)


def pair_distribution(words, first, second, params, config, task):
    return F.softmax(pair_logits(words, first, second, params, config, task))


def enumerate_pairs(nodes, cap, rng):
    """All ordered pairs of distinct nodes, or cap * |nodes| uniformly sampled ones above the cap."""
    nodes = list(nodes)
    if len(nodes) <= cap:
        pairs = list(itertools.permutations(nodes, 2))
        return [a for a, _ in pairs], [b for _, b in pairs]
    count = cap * len(nodes)
    first = rng.integers(0, len(nodes), size=count)
    second = rng.integers(0, len(nodes) - 1, size=count)
    second = second + (second >= first)
    nodes = np.asarray(nodes)
    return nodes[first].tolist(), nodes[second].tolist()


def _truth(targets, task):
    return {"relation": targets.rel, "distance": targets.dist, "ancestor": targets.anc}[task]


def treecorr_loss(states, spans, targets, overlap, params, config, rng=None, tasks=TREECORR_TASKS):
    """(L_r, L_d, L_a) over pairs of overlapped target words; each is mean CE scaled by M/|S|.

    `overlap` holds (hypothesis index, target index) pairs. With fewer than two
    overlapped nodes every loss is exactly zero. Tasks not listed in `tasks`
    are returned as zero without being computed.
    """
    zero = Tensor(0.0, dtype=states.dtype)
    nodes = sorted(target for _, target in overlap)
    if len(nodes) < 2:
        return {task: zero for task in TREECORR_TASKS}

    first, second = enumerate_pairs(nodes, config.pair_cap, rng)
    words = word_states(states, spans)
    scale = len(spans) / len(nodes)
    losses = {task: zero for task in TREECORR_TASKS}
    shared = None
    for task in tasks:
        if config.share_treecorr_mlp:
            if shared is None:
                shared = pair_hidden(words, first, second, _mlp_scope(params, config, task))
            hidden = shared
        else:
            hidden = pair_hidden(words, first, second, _mlp_scope(params, config, task))
        truth = _truth(targets, task)[first, second]
        losses[task] = F.mul(F.mean(F.cross_entropy(classify(hidden, params, task), truth)), scale)
    return losses
