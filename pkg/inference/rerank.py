"""
Right-to-left re-ranking of n-best lists.

Each candidate is rescored with the mean log-probability under the
left-to-right models and under the right-to-left models (which read the
candidate reversed); the two averages are combined with equal weight.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Candidate:
    words: tuple
    score: float


def mean_score(scorers, words):
    return float(np.mean([scorer.sequence_score(words) for scorer in scorers]))


def r2l_rerank(candidates, l2r_scorers, r2l_scorers):
    """Candidates re-sorted by the combined score, best first; without r2l scorers the order is kept."""
    if not candidates:
        raise DataError("cannot re-rank an empty candidate list")
    if not r2l_scorers or len(candidates) == 1:
        return list(candidates)
    if not l2r_scorers:
        raise DataError("re-ranking needs at least one left-to-right model")

    rescored = [
        Candidate(candidate.words, 0.5 * (mean_score(l2r_scorers, candidate.words)
                                          + mean_score(r2l_scorers, candidate.words)))
        for candidate in candidates
    ]
    rescored.sort(key=lambda candidate: -candidate.score)
    logger.debug(f"Re-ranked {len(rescored)} candidates")
    return rescored
