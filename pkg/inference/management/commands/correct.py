"""
Django management command to correct sentences with trained checkpoints.

Reads one whitespace-tokenised sentence per line. Several --checkpoint
values are ensembled; --rerank-r2l adds right-to-left checkpoints that
re-rank the n-best list. Without --conllu each source gets a chain tree.

Usage:
    python manage.py correct --checkpoint runs/model.ckpt --input test.src.txt
    python manage.py correct --checkpoint a.ckpt b.ckpt --input test.src.txt --nbest test.nbest \
        --rerank-r2l r2l_a.ckpt r2l_b.ckpt --output test.hyp.txt
"""

import logging
from pathlib import Path

from core.commands import GecCommand
from core.exceptions import DataError
from deptree.conllu import read_conllu
from inference.corrector import Corrector
from inference.nbest import NbestEntry, write_nbest
from training.checkpoint import load_checkpoint

logger = logging.getLogger(__name__)


def read_sentences(path):
    return [tuple(line.split()) for line in Path(path).read_text(encoding="utf-8").splitlines()]


class Command(GecCommand):
    help = 'Correct one sentence per line with beam search, ensembling and optional R2L re-ranking'

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', nargs='+', required=True, help='Left-to-right checkpoint(s)')
        parser.add_argument('--input', type=str, required=True, help='Source sentences, one per line')
        parser.add_argument('--beam', type=int, default=None, help='Beam size (checkpoint setting when omitted)')
        parser.add_argument('--nbest', type=str, default=None, help='Write the n-best list to this file')
        parser.add_argument(
            '--rerank-r2l',
            nargs='+',
            default=None,
            help='Right-to-left checkpoint(s) used to re-rank the n-best list',
        )
        parser.add_argument('--conllu', type=str, default=None, help='Source trees aligned with --input')
        parser.add_argument('--output', type=str, default=None, help='Corrected sentences (stdout when omitted)')
        parser.add_argument('--max-len', type=int, default=None, help='Maximum hypothesis length in sub-words')

    def handle(self, *args, **options):
        models = [load_checkpoint(path).model for path in options['checkpoint']]
        r2l_models = [load_checkpoint(path).model for path in options['rerank_r2l'] or ()]
        corrector = Corrector(models, r2l_models, beam=options['beam'], max_len=options['max_len'])

        sentences = read_sentences(options['input'])
        trees = None
        if options['conllu']:
            trees = read_conllu(options['conllu'])
            non_empty = [words for words in sentences if words]
            if len(trees) != len(non_empty):
                raise DataError(f'{len(non_empty)} non-empty sentences but {len(trees)} trees in {options["conllu"]}')
            cursor = iter(trees)
            trees = [next(cursor) if words else None for words in sentences]

        corrections = corrector.correct_all(sentences, trees)

        if options['nbest']:
            entries = [
                NbestEntry(index, rank, candidate.score, ' '.join(candidate.words))
                for index, correction in enumerate(corrections, start=1)
                for rank, candidate in enumerate(correction.candidates, start=1)
            ]
            write_nbest(options['nbest'], entries)
            logger.info(f'Wrote {len(entries)} n-best entries to {options["nbest"]}')

        text = ''.join(f'{correction.text}\n' for correction in corrections)
        if options['output']:
            Path(options['output']).write_text(text, encoding='utf-8')
            self.success(f'Corrected {len(corrections)} sentences into {options["output"]}')
        else:
            self.stdout.write(text, ending='')
