"""
Beam search over next-token distributions.

A scorer maps a BOS-initial prefix to a probability vector over the
vocabulary. Each step keeps the best `width` extensions; finished
hypotheses are frozen, and the final list is ranked by the score divided by
the number of scored tokens.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import CheckpointError, ConfigurationError, DataError
from decoder.decoder import decode
from encoder.encoder import encode
from numerics.layers import EVAL
from numerics.tensor import no_grad
from tokenizer.bpe import BOS, EOS, PAD, encode_words

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple
    score: float = 0.0
    finished: bool = False
    scored: int = 0

    @property
    def normalized(self):
        return self.score / self.scored if self.scored else self.score

    def extend(self, token, log_probability):
        token = int(token)
        return Hypothesis(self.tokens + (token,), self.score + log_probability, token == EOS, self.scored + 1)

    def force_finish(self):
        """Close with EOS at the length limit; the forced EOS is not scored."""
        return Hypothesis(self.tokens + (EOS,), self.score, True, self.scored)


def emission_probabilities(rows):
    """Rows of next-token probabilities with PAD and BOS removed and renormalised, in float64."""
    rows = np.array(rows, dtype=np.float64)
    rows[..., PAD] = 0.0
    rows[..., BOS] = 0.0
    return rows / rows.sum(axis=-1, keepdims=True)


def _log(probabilities):
    with np.errstate(divide="ignore"):
        return np.log(probabilities)


class ModelScorer:
    """Next-token distributions of one model for one source sentence; the source is encoded once."""

    def __init__(self, model, source_words, tree):
        if len(tree) != len(source_words) or tuple(tree.words) != tuple(source_words):
            raise DataError("source tree does not match the source words")
        self.model = model
        self.source_ids, spans = encode_words(source_words, model.bpe)
        with no_grad():
            self.encoded = encode(self.source_ids, tree, spans, model.params, model.config, model.relations, EVAL)

    def _mixed(self, prefix):
        with no_grad():
            return decode(list(prefix), self.encoded, self.model.params, self.model.config, EVAL).mixed.data

    def probabilities(self, prefix):
        return emission_probabilities(self._mixed(prefix)[-1])

    def sequence_score(self, words):
        """Mean log-probability of `words` (followed by EOS) under teacher forcing."""
        if self.model.direction == "r2l":
            words = list(reversed(words))
        ids, _ = encode_words(words, self.model.bpe)
        rows = emission_probabilities(self._mixed(ids[:-1]))
        picked = rows[np.arange(len(ids) - 1), ids[1:]]
        return float(np.mean(_log(picked)))


class EnsembleScorer:
    """Arithmetic mean of the members' distributions."""

    def __init__(self, scorers):
        if not scorers:
            raise ConfigurationError("an ensemble needs at least one model")
        self.scorers = list(scorers)

    def probabilities(self, prefix):
        first = self.scorers[0].probabilities(prefix)
        if len(self.scorers) == 1:
            return first
        # p1 + mean(pk - p1): identical members reproduce p1 exactly
        offset = sum(scorer.probabilities(prefix) - first for scorer in self.scorers[1:])
        return first + offset / len(self.scorers)


class CachedScorer:
    """Memoises distributions by prefix; searches at several widths share most prefixes."""

    def __init__(self, scorer):
        self.scorer = scorer
        self.cache = {}

    def probabilities(self, prefix):
        prefix = tuple(prefix)
        if prefix not in self.cache:
            self.cache[prefix] = self.scorer.probabilities(prefix)
        return self.cache[prefix]


def search_width(scorer, width, max_len):
    """One beam pass at a fixed width; returns (finished hypotheses, whether anything was pruned)."""
    live, finished, pruned = [Hypothesis((BOS,))], [], False
    for _ in range(max_len):
        candidates = []
        for hypothesis in live:
            log_probabilities = _log(scorer.probabilities(hypothesis.tokens))
            allowed = np.flatnonzero(np.isfinite(log_probabilities))
            order = allowed[np.argsort(-log_probabilities[allowed], kind="stable")]
            pruned = pruned or len(order) > width
            for token in order[:width]:
                candidates.append(hypothesis.extend(token, float(log_probabilities[token])))
        # candidates of one step share a length: raw and normalized orders agree
        candidates.sort(key=lambda h: -h.score)
        pruned = pruned or len(candidates) > width
        live = []
        for candidate in candidates[:width]:
            (finished if candidate.finished else live).append(candidate)
        if not live:
            break

    finished += [hypothesis.force_finish() for hypothesis in live]
    return finished, pruned


def beam_search(scorer, beam, max_len):
    """Up to `beam` distinct finished hypotheses, best normalized score first.

    Finished hypotheses of every width 1..beam are pooled, so widening the
    beam never lowers the top score. A pass that pruned nothing is exhaustive
    and stands alone.
    """
    if beam < 1:
        raise ConfigurationError(f"beam must be >= 1, got {beam}")
    if max_len < 1:
        raise ConfigurationError(f"max length must be >= 1, got {max_len}")

    scorer = CachedScorer(scorer)
    pool, pruned = search_width(scorer, beam, max_len)
    if pruned:
        for width in range(1, beam):
            pool += search_width(scorer, width, max_len)[0]

    unique = {}
    for hypothesis in pool:
        unique.setdefault(hypothesis.tokens, hypothesis)
    return sorted(unique.values(), key=lambda h: -h.normalized)[:beam]


def greedy_search(scorer, max_len):
    """Argmax decoding; ties go to the lowest token id."""
    hypothesis = Hypothesis((BOS,))
    for _ in range(max_len):
        log_probabilities = _log(scorer.probabilities(hypothesis.tokens))
        token = int(np.argmax(log_probabilities))
        hypothesis = hypothesis.extend(token, float(log_probabilities[token]))
        if hypothesis.finished:
            return hypothesis
    return hypothesis.force_finish()


def ensemble_decode(models, source_words, tree, beam, max_len):
    """Beam search over the averaged distributions of compatible models."""
    if not models:
        raise ConfigurationError("at least one model is required")
    for other in models[1:]:
        problem = models[0].compatibility_problem(other)
        if problem:
            raise CheckpointError(f"cannot ensemble checkpoints: {problem}")
    scorer = EnsembleScorer([ModelScorer(model, source_words, tree) for model in models])
    return beam_search(scorer, beam, max_len)
