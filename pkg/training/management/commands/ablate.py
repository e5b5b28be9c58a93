"""
Django management command to compare model variants on synthetic data.

For every seed a corpus is synthesised and split into train and held-out
test sentences; each variant is trained on the same examples, decodes the
held-out sources with its gold source trees and is scored with F0.5. The
median F0.5 over seeds is printed per variant.

Usage:
    python manage.py ablate --config small.cfg --count 5000 --seeds 1 2 3
    python manage.py ablate --config small.cfg --variants copy-transformer,sg-gec --epochs 3
"""

import logging
import math

import numpy as np

from core.commands import GecCommand
from core.config import RunConfig, load_run_config
from core.exceptions import ConfigurationError
from core.utils import make_rng
from evaluation.metrics import score_corpus
from inference.corrector import Corrector
from training.checkpoint import GecModel
from training.corpus import build_examples, corpus_vocabularies
from training.stages import StagePlan
from training.synth import synth_corpus
from training.trainer import Trainer
from training.variants import parse_variants, variant_config

logger = logging.getLogger(__name__)


def split_corpus(pairs, test_fraction):
    """(train, test) with the last ceil(fraction * n) pairs held out."""
    held_out = math.ceil(len(pairs) * test_fraction)
    if held_out < 1 or held_out >= len(pairs):
        raise ConfigurationError(f'test fraction {test_fraction} leaves no train or no test pairs')
    return pairs[:-held_out], pairs[-held_out:]


class Command(GecCommand):
    help = 'Train and score ablation variants over several seeds; prints the median F0.5 per variant'

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, default=None, help='Base run configuration')
        parser.add_argument('--variants', type=str, default='', help='Comma-separated variants (all when empty)')
        parser.add_argument('--seeds', type=int, nargs='+', default=[1, 2, 3], help='Seeds to run')
        parser.add_argument('--count', type=int, default=5000, help='Synthetic pairs per seed')
        parser.add_argument('--test-fraction', type=float, default=0.1, help='Share of pairs held out for scoring')
        parser.add_argument('--epochs', type=int, default=2, help='Training epochs per variant')

    def run_variant(self, name, run_config, bpe, relations, examples, test, epochs):
        model = GecModel.initialise(variant_config(run_config.model, name), bpe, relations, run_config.seed)
        plan = StagePlan.single('train', epochs, run_config.learning_rate)
        Trainer(model, run_config).run_stages(plan, {'train': examples})

        sources = [pair.source_words for pair in test]
        corrections = Corrector([model]).correct_all(sources, [pair.source for pair in test])
        hypotheses = [correction.words for correction in corrections]
        return score_corpus(sources, hypotheses, [pair.target_words for pair in test])

    def handle(self, *args, **options):
        base = load_run_config(options['config']) if options['config'] else RunConfig()
        variants = parse_variants(options['variants'])
        results = {name: [] for name in variants}

        for seed in options['seeds']:
            run_config = base.replace(seed=seed)
            pairs = synth_corpus(
                options['count'], make_rng(seed), base.corruption_profile, base.corruption_overrides()
            )
            train, test = split_corpus(pairs, options['test_fraction'])
            bpe, relations = corpus_vocabularies([pairs], base.bpe_vocab_size)
            examples = build_examples(train, bpe, relations, base.model.max_distance)
            for name in variants:
                score = self.run_variant(name, run_config, bpe, relations, examples, test, options['epochs'])
                results[name].append(score.scores[2])
                self.stdout.write(f'{name}\tseed={seed}\t{score.report_line()}')

        for name in variants:
            self.success(f'{name}\tmedian F0.5={np.median(results[name]):.4f} over {len(results[name])} seeds')
