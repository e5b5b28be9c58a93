"""
Model and run configuration.

ModelConfig carries every architecture hyperparameter; RunConfig adds the
training/operational knobs. Both round-trip through plain key=value files,
read with python-decouple so the same parser serves `.env` files and run
configs.
"""

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from decouple import Config, RepositoryEnv, UndefinedValueError

from .exceptions import ConfigurationError


@dataclass(frozen=True)
class ModelConfig:
    d_model: int = 512
    d_ff: int = 2048
    heads: int = 8
    graph_heads: int = 4
    encoder_layers: int = 6
    graph_layers: int = 3
    decoder_layers: int = 6
    beta: float = 0.5
    lambda_relation: float = 0.5
    lambda_distance: float = 0.1
    lambda_ancestor: float = 0.1
    dropout: float = 0.1
    beam: int = 5
    max_distance: int = 16
    max_decode_len: int = 64
    vocab_size: int = 8000
    relation_count: int = 0
    use_syntax_encoder: bool = True
    share_treecorr_mlp: bool = True
    pair_cap: int = 20
    layer_norm_eps: float = 1e-5

    def __post_init__(self):
        for name in ("d_model", "d_ff", "heads", "graph_heads", "beam", "max_distance", "max_decode_len", "pair_cap"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("encoder_layers", "graph_layers", "decoder_layers", "relation_count"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.d_model % self.heads:
            raise ConfigurationError(f"d_model={self.d_model} is not divisible by heads={self.heads}")
        if self.d_model % self.graph_heads:
            raise ConfigurationError(f"d_model={self.d_model} is not divisible by graph_heads={self.graph_heads}")
        if not 0.0 < self.beta < 1.0 and not (self.beta == 1.0 and not self.use_syntax_encoder):
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        for name in ("lambda_relation", "lambda_distance", "lambda_ancestor"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError(f"dropout must lie in [0, 1), got {self.dropout}")

    @property
    def d_k(self):
        return self.d_model // self.heads

    @property
    def graph_d_k(self):
        return self.d_model // self.graph_heads

    @property
    def uses_tree_correction(self):
        return bool(self.lambda_relation or self.lambda_distance or self.lambda_ancestor)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    seed: int = 1234
    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_decay: float = 1e-5
    batch_tokens: int = 1000
    bpe_vocab_size: int = 8000
    direction: str = "l2r"
    stages: str = ""
    data: str = ""
    checkpoint: str = ""
    log: str = ""
    corruption_profile: str = "default"
    p_agreement: float = -1.0
    p_tense: float = -1.0
    p_article_drop: float = -1.0
    p_article_insert: float = -1.0
    p_word_swap: float = -1.0
    p_deletion: float = -1.0

    def __post_init__(self):
        if self.direction not in ("l2r", "r2l"):
            raise ConfigurationError(f"direction must be l2r or r2l, got {self.direction!r}")
        if self.learning_rate <= 0:
            raise ConfigurationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_tokens < 1:
            raise ConfigurationError(f"batch_tokens must be >= 1, got {self.batch_tokens}")

    def replace(self, **changes):
        model_changes = {key: changes.pop(key) for key in list(changes) if key in MODEL_KEYS}
        model = self.model.replace(**model_changes) if model_changes else self.model
        return dataclasses.replace(self, model=model, **changes)

    def corruption_overrides(self):
        """Explicit per-rule probabilities; negative values defer to the named profile."""
        return {
            f.name[2:]: getattr(self, f.name)
            for f in fields(self)
            if f.name.startswith("p_") and getattr(self, f.name) >= 0
        }


MODEL_KEYS = tuple(f.name for f in fields(ModelConfig))
RUN_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "model")


def _field_types(cls):
    return {f.name: f.type for f in fields(cls)}


def _render(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_items(config):
    """Flat (key, rendered value) pairs: model keys first, then run keys."""
    if isinstance(config, RunConfig):
        items = [(key, _render(getattr(config.model, key))) for key in MODEL_KEYS]
        items += [(key, _render(getattr(config, key))) for key in RUN_KEYS]
        return items
    return [(key, _render(getattr(config, key))) for key in MODEL_KEYS]


def dump_run_config(config, path):
    lines = [f"{key}={value}" for key, value in config_items(config)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cast(source, key, kind):
    try:
        return source(key, cast=kind)
    except (ValueError, UndefinedValueError) as exc:
        raise ConfigurationError(f"invalid value for {key}: {exc}") from exc


def _build(mapping_keys, source):
    unknown = sorted(set(mapping_keys) - set(MODEL_KEYS) - set(RUN_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")

    model_types = _field_types(ModelConfig)
    run_types = _field_types(RunConfig)
    model_values = {key: _cast(source, key, model_types[key]) for key in mapping_keys if key in MODEL_KEYS}
    run_values = {key: _cast(source, key, run_types[key]) for key in mapping_keys if key in RUN_KEYS}
    return RunConfig(model=ModelConfig(**model_values), **run_values)


def load_run_config(path):
    """Parse a key=value run configuration; unknown keys are rejected."""
    if not Path(path).is_file():
        raise ConfigurationError(f"config file not found: {path}")
    repository = RepositoryEnv(str(path))
    return _build(list(repository.data), Config(repository))


def model_config_from_items(items):
    """Rebuild a ModelConfig from the key=value block stored in checkpoints."""
    model_types = _field_types(ModelConfig)
    values = {}
    for key, raw in items.items():
        if key not in MODEL_KEYS:
            continue
        kind = model_types[key]
        if kind is bool:
            values[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            values[key] = kind(raw)
    return ModelConfig(**values)
