"""
Django management command to export dependency-tree-correction targets.

Writes one "i<TAB>j<TAB>rel<TAB>dist<TAB>anc" row per ordered word pair
(1-based ids, sentences separated by a blank line). With --validate every
tree and its targets are checked and the first violation aborts with exit 3.

Usage:
    python manage.py tree_targets --conllu data/train.tgt.conllu --out targets.tsv
    python manage.py tree_targets --conllu data/train.src.conllu --validate
"""

import logging
from pathlib import Path

from core.commands import GecCommand
from core.config import ModelConfig
from core.exceptions import TreeError
from deptree.conllu import read_conllu
from deptree.relations import RelationVocab
from deptree.tree import check_targets, export_targets_tsv, pair_targets

logger = logging.getLogger(__name__)


class Command(GecCommand):
    help = 'Export relation/distance/ancestry targets for every word pair of a CoNLL-U file'

    def add_arguments(self, parser):
        parser.add_argument('--conllu', type=str, required=True, help='CoNLL-U file to read')
        parser.add_argument('--out', type=str, default=None, help='TSV destination (stdout when omitted)')
        parser.add_argument(
            '--max-distance',
            type=int,
            default=ModelConfig.max_distance,
            help='Distances above this value are clamped',
        )
        parser.add_argument(
            '--validate',
            action='store_true',
            help='Check tree and target invariants; exit non-zero on the first violation',
        )

    def handle(self, *args, **options):
        trees = read_conllu(options['conllu'])
        vocab = RelationVocab.from_trees(trees)
        max_distance = options['max_distance']

        if options['validate']:
            for index, tree in enumerate(trees, start=1):
                problem = check_targets(pair_targets(tree, vocab, max_distance), tree, vocab)
                if problem is not None:
                    raise TreeError(f'sentence {index}: {problem}')
            logger.info(f'Validated {len(trees)} trees from {options["conllu"]}')

        tsv = export_targets_tsv(trees, vocab, max_distance)
        if options['out']:
            Path(options['out']).write_text(tsv, encoding='utf-8')
            self.success(f'Wrote targets for {len(trees)} sentences to {options["out"]}')
        elif options['validate']:
            self.success(f'{len(trees)} trees passed validation')
        else:
            self.stdout.write(tsv, ending='')
