"""
Django management command to train a model through a stage plan.

Each --data value is either a corpus path (registered as dataset "train")
or name=path. A fresh run learns the BPE model and the relation vocabulary
from every dataset; --resume continues from a checkpoint, replaying the
same steps an uninterrupted run would take. One JSON record per optimizer
step goes to --log.

Usage:
    python manage.py train --config run.cfg --data data/train --out-checkpoint runs/model.ckpt
    python manage.py train --config run.cfg --data synth=data/synth train=data/train \
        --stages "synthetic=synth:all:4:1e-4;errorful=train:errorful:2:1e-4;finetune=train:all:2:5e-5" \
        --out-checkpoint runs/model.ckpt
    python manage.py train --config run.cfg --data data/train --out-checkpoint runs/model.ckpt \
        --resume runs/model.ckpt
"""

import logging

from core.commands import GecCommand
from core.config import RunConfig, load_run_config
from core.exceptions import ConfigurationError
from training.checkpoint import GecModel, load_checkpoint
from training.corpus import build_examples, corpus_vocabularies, read_corpus
from training.stages import StagePlan
from training.trainer import Trainer, record_log

logger = logging.getLogger(__name__)

DEFAULT_DATASET = 'train'


def parse_data_arguments(values):
    """{name: path} from "path" or "name=path" entries."""
    datasets = {}
    for value in values:
        name, sep, path = value.partition('=')
        if not sep:
            name, path = DEFAULT_DATASET, value
        if not name or not path:
            raise ConfigurationError(f'malformed --data value {value!r}')
        if name in datasets:
            raise ConfigurationError(f'dataset {name!r} given twice')
        datasets[name] = path
    return datasets


class Command(GecCommand):
    help = 'Train a model (optionally in several stages) and write its checkpoint and step log'

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, default=None, help='key=value run configuration')
        parser.add_argument('--data', nargs='+', default=None, help='Corpus path(s), plain or as name=path')
        parser.add_argument('--stages', type=str, default=None, help='Stage plan "name=dataset:selector:epochs:lr;..."')
        parser.add_argument('--out-checkpoint', type=str, default=None, help='Checkpoint to write')
        parser.add_argument('--resume', type=str, default=None, help='Checkpoint to continue from')
        parser.add_argument('--log', type=str, default=None, help='Step log (default: <checkpoint>.log.jsonl)')
        parser.add_argument('--epochs', type=int, default=1, help='Epochs of the single stage used without --stages')

    def handle(self, *args, **options):
        run_config = load_run_config(options['config']) if options['config'] else RunConfig()
        data = options['data'] or run_config.data.split()
        if not data:
            raise ConfigurationError('no training data: pass --data or set data= in the config')
        out = options['out_checkpoint'] or run_config.checkpoint
        if not out:
            raise ConfigurationError('no checkpoint destination: pass --out-checkpoint or set checkpoint=')
        log_path = options['log'] or run_config.log or f'{out}.log.jsonl'

        stages = options['stages'] or run_config.stages
        if stages:
            plan = StagePlan.parse(stages)
        else:
            plan = StagePlan.single(DEFAULT_DATASET, options['epochs'], run_config.learning_rate)

        paths = parse_data_arguments(data)
        missing = [name for name in plan.datasets() if name not in paths]
        if missing:
            raise ConfigurationError(f'stage plan uses undefined datasets: {", ".join(missing)}')
        corpora = {name: read_corpus(path) for name, path in paths.items()}

        if options['resume']:
            checkpoint = load_checkpoint(options['resume'])
            model, optimizer, global_step = checkpoint.model, checkpoint.optimizer, checkpoint.global_step
            logger.info(f'Resuming {options["resume"]} at step {global_step}')
        else:
            bpe, relations = corpus_vocabularies(corpora.values(), run_config.bpe_vocab_size)
            model = GecModel.initialise(run_config.model, bpe, relations, run_config.seed, run_config.direction)
            optimizer, global_step = None, 0

        datasets = {
            name: build_examples(pairs, model.bpe, model.relations, model.config.max_distance, model.direction)
            for name, pairs in corpora.items()
        }
        trainer = Trainer(model, run_config, optimizer, global_step, checkpoint_path=out)
        with record_log(log_path, append=bool(options['resume'])):
            records = trainer.run_stages(plan, datasets)
        trainer.save(out)

        final = f'{records[-1]["loss"]:.4f}' if records else 'n/a'
        self.success(f'Trained {len(records)} steps (plan {plan}); final loss {final}; checkpoint {out}')
