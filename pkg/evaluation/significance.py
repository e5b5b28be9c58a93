"""Paired significance test between two systems on the same test set."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import ttest_rel

from core.exceptions import DataError
from core.utils import make_rng

from .metrics import EditCounts, precision_recall_f, score_corpus

logger = logging.getLogger(__name__)

SUBSETS = 10


@dataclass(frozen=True)
class SignificanceResult:
    mean_difference: float
    statistic: float
    p_value: float
    subsets: int

    def report_line(self):
        return (
            f"delta_F0.5={self.mean_difference:+.4f} t={self.statistic:.4f} p={self.p_value:.4g} "
            f"subsets={self.subsets}"
        )


def subset_blocks(count, subsets, seed):
    """Sentence indices shuffled with `seed` and cut into `subsets` near-equal groups."""
    return np.array_split(make_rng(seed).permutation(count), subsets)


def subset_scores(per_sentence, subsets=SUBSETS, seed=0):
    """F0.5 of each random subset of sentences."""
    blocks = subset_blocks(len(per_sentence), subsets, seed)
    return np.array([precision_recall_f(sum((per_sentence[k] for k in block), EditCounts()))[2] for block in blocks])


def paired_subset_test(sources, hypotheses, baseline, references, subsets=SUBSETS, seed=0):
    """Paired t-test on per-subset F0.5 of `hypotheses` against `baseline`; both use the same subsets."""
    if len(sources) < subsets:
        raise DataError(f"need at least {subsets} sentences for {subsets} subsets, got {len(sources)}")
    system = subset_scores(score_corpus(sources, hypotheses, references).per_sentence, subsets, seed)
    other = subset_scores(score_corpus(sources, baseline, references).per_sentence, subsets, seed)
    result = ttest_rel(system, other)
    outcome = SignificanceResult(float(np.mean(system - other)), float(result.statistic), float(result.pvalue), subsets)
    logger.info(f"Paired subset test: {outcome.report_line()}")
    return outcome
