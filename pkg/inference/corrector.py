"""
Sentence correction with one or more checkpoints.

Several left-to-right models are ensembled by averaging their
distributions; optional right-to-left models re-rank the resulting n-best
list. Sources without a parse get a chain tree.
"""

import logging
from dataclasses import dataclass

from core.exceptions import CheckpointError, ConfigurationError, DataError
from core.utils import parallel_map
from deptree.tree import DepTree
from tokenizer.bpe import decode as decode_ids

from .beam import ModelScorer, ensemble_decode
from .rerank import Candidate, r2l_rerank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Correction:
    words: tuple
    candidates: tuple

    @property
    def text(self):
        return " ".join(self.words)


class Corrector:
    def __init__(self, models, r2l_models=(), beam=None, max_len=None):
        if not models:
            raise ConfigurationError("at least one checkpoint is required")
        for model in models:
            if model.direction != "l2r":
                raise ConfigurationError("correction checkpoints must be left-to-right models")
        for model in r2l_models:
            if model.direction != "r2l":
                raise ConfigurationError("re-ranking checkpoints must be right-to-left models")
            if model.bpe.digest() != models[0].bpe.digest():
                raise CheckpointError("right-to-left model uses a different BPE vocabulary")
        self.models = list(models)
        self.r2l_models = list(r2l_models)
        self.beam = beam or models[0].config.beam
        self.max_len = max_len or models[0].config.max_decode_len

    def correct(self, words, tree=None):
        words = tuple(words)
        if not words:
            return Correction((), (Candidate((), 0.0),))
        if tree is None:
            tree = DepTree.chain(words)
        elif tuple(tree.words) != words:
            raise DataError(f"tree words {' '.join(tree.words)!r} do not match the input {' '.join(words)!r}")

        hypotheses = ensemble_decode(self.models, words, tree, self.beam, self.max_len)
        candidates, seen = [], set()
        for hypothesis in hypotheses:
            candidate_words = tuple(decode_ids(hypothesis.tokens, self.models[0].bpe))
            if candidate_words not in seen:
                seen.add(candidate_words)
                candidates.append(Candidate(candidate_words, hypothesis.normalized))

        if self.r2l_models:
            l2r = [ModelScorer(model, words, tree) for model in self.models]
            r2l = [ModelScorer(model, words, tree) for model in self.r2l_models]
            candidates = r2l_rerank(candidates, l2r, r2l)
        return Correction(candidates[0].words, tuple(candidates))

    def correct_all(self, sentences, trees=None):
        trees = trees if trees is not None else [None] * len(sentences)
        if len(trees) != len(sentences):
            raise DataError(f"{len(sentences)} sentences but {len(trees)} trees")
        corrections = parallel_map(lambda item: self.correct(*item), list(zip(sentences, trees)))
        logger.info(f"Corrected {len(corrections)} sentences (beam {self.beam}, {len(self.models)} models)")
        return corrections
