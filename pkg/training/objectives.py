"""
Training objectives.

L = L_g + lambda_relation * L_r + lambda_distance * L_d + lambda_ancestor * L_a

L_g is the mean negative log-likelihood of the target tokens under the
mixed (generation + copy) distribution with teacher forcing. The
tree-correction terms are averaged over the sentences of a batch; a term
whose weight is zero is not computed and not added.
"""

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from decoder.decoder import decode
from deptree.align import overlap_align
from encoder.encoder import encode
from numerics import functional as F
from numerics.layers import EVAL
from numerics.parameters import TREECORR_TASKS
from numerics.tensor import Tensor
from tokenizer.bpe import decode as decode_ids
from treecorr.heads import treecorr_loss

from .corpus import unpadded

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-9


@dataclass
class LossTerms:
    total: Tensor
    gec: Tensor
    relation: Tensor
    distance: Tensor
    ancestor: Tensor

    def as_record(self):
        return {
            "loss": float(self.total.data),
            "loss_g": float(self.gec.data),
            "loss_r": float(self.relation.data),
            "loss_d": float(self.distance.data),
            "loss_a": float(self.ancestor.data),
        }


def loss_weights(config):
    return {
        "relation": config.lambda_relation,
        "distance": config.lambda_distance,
        "ancestor": config.lambda_ancestor,
    }


def token_nll(mixed, targets):
    """-log p(target) per decoder position."""
    return F.mul(F.log(F.add(F.pick(mixed, targets), PROB_FLOOR)), -1.0)


def forward(example, source_ids, target_ids, model, mode=EVAL):
    """Encoder and teacher-forced decoder outputs for one example."""
    encoded = encode(
        source_ids, example.source_tree, example.source_spans, model.params, model.config, model.relations, mode,
        relations=example.relations,
    )
    return decode(target_ids[:-1], encoded, model.params, model.config, mode)


def greedy_overlap(decoded, example, bpe):
    """Aligned (hypothesis, target) word indices of the teacher-forced argmax output."""
    hypothesis = decode_ids(decoded.mixed.data.argmax(axis=-1), bpe)
    return overlap_align(hypothesis, list(example.target_words))


def _sum(tensors):
    return reduce(F.add, tensors)


def batch_losses(batch, model, mode=EVAL, rng=None, tasks=None):
    """Every loss term of a batch; `tasks` defaults to the tree-correction tasks with a non-zero weight."""
    config = model.config
    weights = loss_weights(config)
    if tasks is None:
        tasks = tuple(task for task in TREECORR_TASKS if weights[task])

    nll, tokens = [], 0
    tree_terms = {task: [] for task in TREECORR_TASKS}
    source_mask, target_mask = batch.source_mask, batch.target_mask
    for row, example in enumerate(batch.examples):
        source_ids = unpadded(batch.source_ids[row], source_mask[row])
        target_ids = unpadded(batch.target_ids[row], target_mask[row])
        decoded = forward(example, source_ids, target_ids, model, mode)
        nll.append(F.sum(token_nll(decoded.mixed, np.asarray(target_ids[1:]))))
        tokens += len(target_ids) - 1
        if tasks:
            overlap = greedy_overlap(decoded, example, model.bpe)
            losses = treecorr_loss(
                decoded.states, example.target_spans, example.targets, overlap, model.params, config, rng, tasks
            )
            for task in tasks:
                tree_terms[task].append(losses[task])

    dtype = model.params["embed.tokens"].dtype
    gec = F.mul(_sum(nll), 1.0 / tokens)
    zero = Tensor(0.0, dtype=dtype)
    terms = {
        task: F.mul(_sum(tree_terms[task]), 1.0 / len(batch)) if tree_terms[task] else zero
        for task in TREECORR_TASKS
    }
    total = gec
    for task in TREECORR_TASKS:
        if weights[task] and task in tasks:
            total = F.add(total, F.mul(terms[task], weights[task]))
    return LossTerms(total, gec, terms["relation"], terms["distance"], terms["ancestor"])


def gec_loss(batch, model, mode=EVAL):
    """Mean token negative log-likelihood over the non-PAD target positions of the batch."""
    return batch_losses(batch, model, mode, tasks=()).gec


def total_loss(batch, model, mode=EVAL, rng=None):
    return batch_losses(batch, model, mode, rng)
