"""
Precision, recall and F0.5 over exactly matching edits.

A hypothesis edit counts as correct when an edit with the same source
span and the same replacement appears in the reference. Counts are summed
over the corpus before the ratios are taken.
"""

import logging
from dataclasses import dataclass, field

from core.exceptions import DataError
from core.utils import parallel_map

from .edits import extract_edits

logger = logging.getLogger(__name__)

BETA = 0.5


@dataclass(frozen=True)
class EditCounts:
    hypothesis: int = 0
    reference: int = 0
    correct: int = 0

    def __add__(self, other):
        return EditCounts(
            self.hypothesis + other.hypothesis, self.reference + other.reference, self.correct + other.correct
        )


def edit_counts(hypothesis_edits, reference_edits):
    hypothesis_edits, reference_edits = set(hypothesis_edits), set(reference_edits)
    return EditCounts(len(hypothesis_edits), len(reference_edits), len(hypothesis_edits & reference_edits))


def fbeta(precision, recall, beta=BETA):
    """(1 + b^2) P R / (b^2 P + R), zero when both are zero."""
    denominator = beta * beta * precision + recall
    if denominator == 0:
        return 0.0
    return (1 + beta * beta) * precision * recall / denominator


def precision_recall_f(counts, beta=BETA):
    """(P, R, F) for edit counts.

    No edits on either side scores 1 everywhere; edits on exactly one side
    score F = 0.
    """
    if counts.hypothesis == 0 and counts.reference == 0:
        return 1.0, 1.0, 1.0
    if counts.hypothesis == 0:
        return 1.0, 0.0, 0.0
    if counts.reference == 0:
        return 0.0, 1.0, 0.0
    precision = counts.correct / counts.hypothesis
    recall = counts.correct / counts.reference
    return precision, recall, fbeta(precision, recall, beta)


def f_half(hypothesis_edits, reference_edits):
    return precision_recall_f(edit_counts(hypothesis_edits, reference_edits))


@dataclass
class CorpusScore:
    counts: EditCounts
    per_sentence: list = field(default_factory=list)

    @property
    def sentences(self):
        return len(self.per_sentence)

    @property
    def scores(self):
        return precision_recall_f(self.counts)

    def report_line(self):
        precision, recall, f = self.scores
        return (
            f"P={precision:.4f} R={recall:.4f} F0.5={f:.4f} sentences={self.sentences} "
            f"edits_hyp={self.counts.hypothesis} edits_ref={self.counts.reference}"
        )

    def per_sentence_tsv(self):
        lines = ["sentence\tedits_hyp\tedits_ref\tcorrect\tP\tR\tF0.5"]
        for index, counts in enumerate(self.per_sentence, start=1):
            precision, recall, f = precision_recall_f(counts)
            lines.append(
                f"{index}\t{counts.hypothesis}\t{counts.reference}\t{counts.correct}\t"
                f"{precision:.4f}\t{recall:.4f}\t{f:.4f}"
            )
        return "\n".join(lines) + "\n"


def sentence_counts(source, hypothesis, reference):
    return edit_counts(extract_edits(source, hypothesis), extract_edits(source, reference))


def score_corpus(sources, hypotheses, references):
    """Corpus-level counts for aligned lists of tokenised sentences."""
    if not len(sources) == len(hypotheses) == len(references):
        raise DataError(
            f"line counts differ: {len(sources)} sources, {len(hypotheses)} hypotheses, {len(references)} references"
        )
    per_sentence = parallel_map(lambda triple: sentence_counts(*triple), list(zip(sources, hypotheses, references)))
    total = sum(per_sentence, EditCounts())
    logger.debug(f"Scored {len(per_sentence)} sentences: {total}")
    return CorpusScore(total, per_sentence)
