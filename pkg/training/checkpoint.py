"""
Trained models and their checkpoints.

A checkpoint is a numerics container whose header holds the ModelConfig,
the relation vocabulary, the decoding direction, the training position and
the digest of the BPE model saved alongside as "<checkpoint>.bpe". Optimizer
moments are stored as "optim.m/<name>" and "optim.v/<name>" records.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from core.config import config_items, model_config_from_items
from core.exceptions import CheckpointError, TokenizerError
from core.utils import make_rng
from deptree.relations import RelationVocab
from numerics.optim import AdamState
from numerics.parameters import Parameters, expected_shapes, init_parameters
from numerics.serialization import read_container, write_container
from tokenizer.bpe import load_model, save_model

logger = logging.getLogger(__name__)

OPTIMIZER_KEYS = ("learning_rate", "beta1", "beta2", "eps", "weight_decay", "step")


@dataclass
class GecModel:
    params: Parameters
    config: object
    bpe: object
    relations: RelationVocab
    direction: str = "l2r"

    @classmethod
    def initialise(cls, config, bpe, relations, seed, direction="l2r"):
        config = config.replace(vocab_size=len(bpe), relation_count=len(relations))
        params = init_parameters(config, len(bpe), len(relations), make_rng(seed))
        logger.info(f"Initialised {direction} model: {params.count()} parameters, vocabulary {len(bpe)}")
        return cls(params, config, bpe, relations, direction)

    @property
    def vocab_size(self):
        return len(self.bpe)

    def compatibility_problem(self, other):
        """Why `other` cannot be ensembled with this model, or None."""
        if other.config != self.config:
            return "model configurations differ"
        if other.bpe.digest() != self.bpe.digest():
            return "BPE vocabularies differ"
        if other.relations != self.relations:
            return "relation vocabularies differ"
        return None


@dataclass
class Checkpoint:
    model: GecModel
    optimizer: Optional[AdamState] = None
    global_step: int = 0


def bpe_path(path):
    return Path(f"{path}.bpe")


def save_checkpoint(path, model, optimizer=None, global_step=0):
    items = config_items(model.config)
    items += [
        ("relations", model.relations.to_string()),
        ("direction", model.direction),
        ("bpe_digest", model.bpe.digest()),
        ("global_step", str(global_step)),
    ]
    records = model.params.arrays()
    if optimizer is not None:
        items += [(f"optim.{key}", repr(getattr(optimizer, key))) for key in OPTIMIZER_KEYS]
        records += optimizer.moment_records(model.params)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    write_container(path, items, records)
    save_model(model.bpe, bpe_path(path))
    logger.info(f"Saved checkpoint {path} at step {global_step}")


def _optimizer_from(header, records):
    if "optim.step" not in header:
        return None
    try:
        state = AdamState(
            learning_rate=float(header["optim.learning_rate"]),
            beta1=float(header["optim.beta1"]),
            beta2=float(header["optim.beta2"]),
            eps=float(header["optim.eps"]),
            weight_decay=float(header["optim.weight_decay"]),
            step=int(header["optim.step"]),
        )
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"incomplete optimizer header: {exc}") from exc
    state.load_moments(records)
    return state


def load_checkpoint(path):
    header, records = read_container(path)
    try:
        config = model_config_from_items(header)
        relations = RelationVocab.from_string(header["relations"])
        direction = header["direction"]
        global_step = int(header["global_step"])
        digest = header["bpe_digest"]
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"{path}: incomplete header ({exc})") from exc

    try:
        bpe = load_model(bpe_path(path))
    except TokenizerError as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    if bpe.digest() != digest:
        raise CheckpointError(f"{path}: BPE model does not match the checkpoint digest")

    params = Parameters()
    optimizer_records = []
    for name, array in records:
        if name.startswith("optim."):
            optimizer_records.append((name, array))
        else:
            params.add(name, array)

    expected = expected_shapes(config, config.vocab_size, config.relation_count)
    if params.shapes() != expected or params.names() != list(expected):
        missing = sorted(set(expected) - set(params.names()))
        raise CheckpointError(f"{path}: parameters do not match the configuration (missing: {missing[:5]})")

    model = GecModel(params, config, bpe, relations, direction)
    return Checkpoint(model, _optimizer_from(header, optimizer_records), global_step)
