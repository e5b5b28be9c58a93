import logging
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import GradientError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Moments and step counter of Adam with L2 weight decay folded into the gradient."""

    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-5
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def from_run_config(cls, config):
        return cls(
            learning_rate=config.learning_rate,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            eps=config.adam_eps,
            weight_decay=config.weight_decay,
        )

    def moment_records(self, params):
        """(name, array) records for the checkpoint, in parameter order."""
        records = []
        for name, tensor in params.items():
            records.append((f"optim.m/{name}", self.m.get(name, np.zeros_like(tensor.data))))
        for name, tensor in params.items():
            records.append((f"optim.v/{name}", self.v.get(name, np.zeros_like(tensor.data))))
        return records

    def load_moments(self, records):
        for name, array in records:
            kind, _, param = name.partition("/")
            if kind == "optim.m":
                self.m[param] = array.copy()
            elif kind == "optim.v":
                self.v[param] = array.copy()


def adam_step(params, state):
    """Apply one Adam update in place to every tensor of `params`."""
    missing = [name for name, tensor in params.items() if tensor.grad is None]
    if missing:
        raise GradientError(f"no gradient for parameters: {', '.join(missing)}")

    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    for name, tensor in params.items():
        grad = tensor.grad
        if state.weight_decay:
            grad = grad + state.weight_decay * tensor.data
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(tensor.data)
            v = np.zeros_like(tensor.data)
        m = b1 * m + (1.0 - b1) * grad
        v = b2 * v + (1.0 - b2) * grad * grad
        state.m[name] = m
        state.v[name] = v
        update = state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        tensor.data = (tensor.data - update).astype(tensor.data.dtype)
