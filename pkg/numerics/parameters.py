"""
Named learnable arrays of the correction model.

Names are stable dotted paths ("graph.layer0.W_out", "decoder.layer1.cross_attn.W_q");
the checkpoint container stores them in insertion order, so the order in which
`init_parameters` registers them is part of the file format.
"""

import logging

import numpy as np

from core.exceptions import CheckpointError

from .tensor import Tensor, get_default_dtype

logger = logging.getLogger(__name__)

ATTENTION_NAMES = ("W_q", "b_q", "W_k", "b_k", "W_v", "b_v", "W_o", "b_o")
TREECORR_TASKS = ("relation", "distance", "ancestor")


class Parameters:
    """Ordered mapping parameter-name -> Tensor (requires_grad=True)."""

    def __init__(self, tensors=None):
        self._tensors = {}
        for name, tensor in (tensors or {}).items():
            self.add(name, tensor)

    def add(self, name, value):
        if name in self._tensors:
            raise CheckpointError(f"duplicate parameter name: {name}")
        tensor = value if isinstance(value, Tensor) else Tensor(value, dtype=np.asarray(value).dtype)
        tensor.requires_grad = True
        tensor.name = name
        self._tensors[name] = tensor
        return tensor

    def __getitem__(self, name):
        try:
            return self._tensors[name]
        except KeyError:
            raise KeyError(f"unknown parameter: {name}") from None

    def __contains__(self, name):
        return name in self._tensors

    def __iter__(self):
        return iter(self._tensors)

    def __len__(self):
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def names(self):
        return list(self._tensors)

    def shapes(self):
        return {name: tensor.shape for name, tensor in self._tensors.items()}

    def zero_grad(self):
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def clear_grad(self):
        for tensor in self._tensors.values():
            tensor.grad = None

    def astype(self, dtype):
        """Independent copy with every array cast to `dtype`."""
        return Parameters({name: Tensor(t.data.astype(dtype), dtype=dtype) for name, t in self._tensors.items()})

    def copy(self):
        return Parameters({name: Tensor(t.data.copy(), dtype=t.dtype) for name, t in self._tensors.items()})

    def arrays(self):
        return [(name, tensor.data) for name, tensor in self._tensors.items()]

    def scope(self, prefix):
        return _Scope(self, prefix)

    def count(self):
        return int(sum(t.size for t in self._tensors.values()))


class _Scope:
    """View resolving short names under a dotted prefix: scope("encoder.layer0")["attn.W_q"]."""

    def __init__(self, params, prefix):
        self.params = params
        self.prefix = prefix

    def __getitem__(self, name):
        return self.params[f"{self.prefix}.{name}"]

    def __contains__(self, name):
        return f"{self.prefix}.{name}" in self.params

    def scope(self, prefix):
        return _Scope(self.params, f"{self.prefix}.{prefix}")


def _glorot(rng, fan_in, fan_out, dtype):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)


class _Builder:
    def __init__(self, params, rng, dtype):
        self.params = params
        self.rng = rng
        self.dtype = dtype

    def matrix(self, name, fan_in, fan_out):
        self.params.add(name, _glorot(self.rng, fan_in, fan_out, self.dtype))

    def bias(self, name, size, value=0.0):
        self.params.add(name, np.full(size, value, dtype=self.dtype))

    def norm(self, prefix, d_model):
        self.bias(f"{prefix}.gamma", d_model, 1.0)
        self.bias(f"{prefix}.beta", d_model)

    def attention(self, prefix, d_model):
        for proj in ("q", "k", "v", "o"):
            self.matrix(f"{prefix}.W_{proj}", d_model, d_model)
            self.bias(f"{prefix}.b_{proj}", d_model)

    def ffn(self, prefix, d_model, d_ff):
        self.matrix(f"{prefix}.W_1", d_model, d_ff)
        self.bias(f"{prefix}.b_1", d_ff)
        self.matrix(f"{prefix}.W_2", d_ff, d_model)
        self.bias(f"{prefix}.b_2", d_model)


def init_parameters(config, vocab_size, relation_count, rng, dtype=None):
    """Create every learnable array for `config` with Glorot-uniform matrices and zero biases.

    `relation_count` is L, the number of tree relation labels; the relation
    embedding table has L + 1 rows (the extra row is the self-loop label).
    """
    dtype = dtype if dtype is not None else get_default_dtype()
    params = Parameters()
    build = _Builder(params, rng, dtype)
    d, d_ff = config.d_model, config.d_ff

    params.add("embed.tokens", (rng.standard_normal((vocab_size, d)) * d**-0.5).astype(dtype))

    for layer in range(config.encoder_layers):
        prefix = f"encoder.layer{layer}"
        build.attention(f"{prefix}.attn", d)
        build.norm(f"{prefix}.norm1", d)
        build.ffn(f"{prefix}.ffn", d, d_ff)
        build.norm(f"{prefix}.norm2", d)

    params.add("graph.relations.embedding", (rng.standard_normal((relation_count + 1, d)) * d**-0.5).astype(dtype))
    for layer in range(config.graph_layers):
        prefix = f"graph.layer{layer}"
        build.matrix(f"{prefix}.W_out", 3 * d, d)
        build.bias(f"{prefix}.b_out", d)
        build.matrix(f"{prefix}.W_in", 3 * d, d)
        build.bias(f"{prefix}.b_in", d)
        for head in range(config.graph_heads):
            for proj in ("W_q", "W_k", "W_v"):
                build.matrix(f"{prefix}.head{head}.{proj}", d, config.graph_d_k)
        build.matrix(f"{prefix}.W_o", d, d)
        build.norm(f"{prefix}.norm1", d)
        build.ffn(f"{prefix}.ffn", d, d_ff)
        build.norm(f"{prefix}.norm2", d)

    for layer in range(config.decoder_layers):
        prefix = f"decoder.layer{layer}"
        build.attention(f"{prefix}.self_attn", d)
        build.norm(f"{prefix}.norm1", d)
        build.attention(f"{prefix}.cross_attn", d)
        build.norm(f"{prefix}.norm2", d)
        build.ffn(f"{prefix}.ffn", d, d_ff)
        build.norm(f"{prefix}.norm3", d)

    build.matrix("generator.W", d, vocab_size)
    build.bias("generator.b", vocab_size)
    build.matrix("copy.W_q", d, d)
    build.matrix("copy.W_k", d, d)
    build.matrix("gate.w", d, 1)
    build.bias("gate.b", 1)

    mlp_prefixes = ["treecorr.mlp"] if config.share_treecorr_mlp else [f"treecorr.{t}.mlp" for t in TREECORR_TASKS]
    for prefix in mlp_prefixes:
        build.matrix(f"{prefix}.W", 2 * d, d)
        build.bias(f"{prefix}.b", d)
    widths = {"relation": relation_count + 1, "distance": config.max_distance + 1, "ancestor": 3}
    for task in TREECORR_TASKS:
        # stored as [classes x d_model]; logits use W.T
        params.add(f"treecorr.{task}.W", _glorot(rng, widths[task], d, dtype))
        build.bias(f"treecorr.{task}.b", widths[task])

    logger.debug(f"Initialised {len(params)} parameter arrays ({params.count()} values)")
    return params


def expected_shapes(config, vocab_size, relation_count):
    """Shapes `init_parameters` produces, used to validate loaded checkpoints."""
    rng = np.random.default_rng(0)
    small = init_parameters(config, vocab_size, relation_count, rng, dtype=np.float32)
    return small.shapes()
