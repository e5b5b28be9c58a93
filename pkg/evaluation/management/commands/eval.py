"""
Django management command to score corrections against references.

All files hold one whitespace-tokenised sentence per line and must have the
same number of lines. Prints the single-line summary; --per-sentence also
writes a TSV of per-sentence counts, and --baseline adds a paired t-test
over ten random subsets drawn with --seed.

Usage:
    python manage.py eval --source test.src.txt --hypothesis test.hyp.txt --reference test.tgt.txt
    python manage.py eval --source s.txt --hypothesis h.txt --reference r.txt --baseline b.txt
"""

import logging
from pathlib import Path

from django.conf import settings

from core.commands import GecCommand
from evaluation.metrics import score_corpus
from evaluation.significance import paired_subset_test

logger = logging.getLogger(__name__)


def read_lines(path):
    return [tuple(line.split()) for line in Path(path).read_text(encoding='utf-8').splitlines()]


class Command(GecCommand):
    help = 'Report precision, recall and F0.5 of hypothesis edits against reference edits'

    def add_arguments(self, parser):
        parser.add_argument('--source', type=str, required=True, help='Uncorrected source sentences')
        parser.add_argument('--hypothesis', type=str, required=True, help='System output')
        parser.add_argument('--reference', type=str, required=True, help='Gold corrections')
        parser.add_argument('--baseline', type=str, default=None, help='Second system output for a paired t-test')
        parser.add_argument('--per-sentence', type=str, default=None, help='Write per-sentence counts to this TSV')
        parser.add_argument('--seed', type=int, default=settings.SGGEC_SEED, help='Seed for the significance subsets')

    def handle(self, *args, **options):
        sources = read_lines(options['source'])
        hypotheses = read_lines(options['hypothesis'])
        references = read_lines(options['reference'])

        score = score_corpus(sources, hypotheses, references)
        self.stdout.write(score.report_line())

        if options['per_sentence']:
            Path(options['per_sentence']).write_text(score.per_sentence_tsv(), encoding='utf-8')
            logger.info(f'Wrote per-sentence scores to {options["per_sentence"]}')

        if options['baseline']:
            result = paired_subset_test(
                sources, hypotheses, read_lines(options['baseline']), references, seed=options['seed']
            )
            self.stdout.write(result.report_line())
