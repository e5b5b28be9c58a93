"""
Django management command to synthesise a parallel corpus with gold trees.

Writes <out>.tsv plus the <out>.src.conllu / <out>.tgt.conllu sidecars.
Output is fully determined by --seed, --count and the corruption settings.

Usage:
    python manage.py gen_data --out data/synth --count 5000 --seed 7
    python manage.py gen_data --out data/identity --count 200 --corruption-profile none
    python manage.py gen_data --out data/agreement --count 100 --config agreement_only.cfg
"""

import logging

from django.conf import settings

from core.commands import GecCommand
from core.config import load_run_config
from core.utils import make_rng
from training.corpus import write_corpus
from training.synth import PROFILES, synth_corpus

logger = logging.getLogger(__name__)


class Command(GecCommand):
    help = 'Generate synthetic erroneous/correct sentence pairs with dependency trees'

    def add_arguments(self, parser):
        parser.add_argument('--out', type=str, required=True, help='Corpus path (".tsv" is appended)')
        parser.add_argument('--count', type=int, default=1000, help='Number of sentence pairs')
        parser.add_argument('--seed', type=int, default=settings.SGGEC_SEED, help='Random seed')
        parser.add_argument(
            '--corruption-profile',
            type=str,
            default=None,
            choices=sorted(PROFILES),
            help='Named set of corruption probabilities (config value, else "default")',
        )
        parser.add_argument('--config', type=str, default=None, help='Run config whose p_* keys override the profile')

    def handle(self, *args, **options):
        profile = options['corruption_profile']
        overrides = {}
        if options['config']:
            run_config = load_run_config(options['config'])
            profile = profile or run_config.corruption_profile
            overrides = run_config.corruption_overrides()
        profile = profile or 'default'

        pairs = synth_corpus(options['count'], make_rng(options['seed']), profile, overrides)
        tsv = write_corpus(options['out'], pairs)
        changed = sum(pair.changed for pair in pairs)
        self.success(f'Wrote {len(pairs)} pairs ({changed} with errors) to {tsv}')
