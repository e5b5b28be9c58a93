"""
Staged training loop.

Steps are numbered across the whole plan. The generator for dropout and
pair sampling at step k is seeded with (seed, k), and the batch order of an
epoch with (seed, stage index, epoch), so a run resumed from a checkpoint
replays exactly the steps an uninterrupted run would have taken.

Every optimizer step writes one record to the "training.records" logger.
"""

import logging
from contextlib import contextmanager

import numpy as np
from pythonjsonlogger import jsonlogger

from core.exceptions import DataError, DivergenceError
from core.utils import make_rng
from numerics.layers import Mode
from numerics.optim import AdamState, adam_step

from .checkpoint import save_checkpoint
from .corpus import make_batches
from .objectives import total_loss
from .stages import select_examples

logger = logging.getLogger(__name__)
records_logger = logging.getLogger("training.records")


@contextmanager
def record_log(path, append=False):
    """Send training records to `path` as JSON lines while the block runs."""
    if not path:
        yield
        return
    handler = logging.FileHandler(path, mode="a" if append else "w", encoding="utf-8")
    handler.setFormatter(jsonlogger.JsonFormatter("%(message)s"))
    records_logger.addHandler(handler)
    records_logger.setLevel(logging.INFO)
    try:
        yield
    finally:
        records_logger.removeHandler(handler)
        handler.close()


class Trainer:
    def __init__(self, model, run_config, optimizer=None, global_step=0, checkpoint_path=None):
        self.model = model
        self.run_config = run_config
        self.optimizer = optimizer or AdamState.from_run_config(run_config)
        self.global_step = global_step
        self.checkpoint_path = checkpoint_path
        self.records = []

    def _fill_missing_gradients(self):
        for _, tensor in self.model.params.items():
            if tensor.grad is None:
                tensor.grad = np.zeros_like(tensor.data)

    def train_step(self, batch, stage, epoch, stage_start=False):
        """One forward/backward pass and Adam update; returns the step's record."""
        self.global_step += 1
        rng = make_rng(self.run_config.seed, self.global_step)
        mode = Mode.train(rng, self.model.config.dropout)

        self.model.params.clear_grad()
        terms = total_loss(batch, self.model, mode, rng)
        values = terms.as_record()
        if not all(np.isfinite(value) for value in values.values()):
            raise DivergenceError(f"non-finite loss at step {self.global_step} (stage {stage.name}): {values}")
        terms.total.backward()
        self._fill_missing_gradients()
        adam_step(self.model.params, self.optimizer)

        record = {"step": self.global_step, "stage": stage.name, "epoch": epoch, **values, "stage_start": stage_start}
        records_logger.info("step", extra=record)
        self.records.append(record)
        return record

    def run_stages(self, plan, datasets):
        """Train through every stage of `plan`; `datasets` maps names to encoded examples."""
        selected = []
        for stage in plan.stages:
            if stage.dataset not in datasets:
                raise DataError(f"stage {stage.name}: unknown dataset {stage.dataset!r}")
            selected.append(select_examples(datasets[stage.dataset], stage))

        position = 0
        batch_tokens = self.run_config.batch_tokens
        for index, (stage, examples) in enumerate(zip(plan.stages, selected)):
            self.optimizer.learning_rate = stage.learning_rate
            logger.info(
                f"Stage {stage.name}: {len(examples)} examples, {stage.epochs} epochs, lr={stage.learning_rate}"
            )
            for epoch in range(1, stage.epochs + 1):
                batches = make_batches(examples, batch_tokens, make_rng(self.run_config.seed, index, epoch))
                losses = []
                for number, batch in enumerate(batches):
                    position += 1
                    if position <= self.global_step:
                        continue
                    record = self.train_step(batch, stage, epoch, stage_start=epoch == 1 and number == 0)
                    losses.append(record["loss"])
                if not losses:
                    continue
                logger.info(f"Stage {stage.name} epoch {epoch}: mean loss {np.mean(losses):.4f} "
                            f"(step {self.global_step})")
                if self.checkpoint_path:
                    save_checkpoint(self.checkpoint_path, self.model, self.optimizer, self.global_step)
        return self.records

    def save(self, path):
        save_checkpoint(path, self.model, self.optimizer, self.global_step)
