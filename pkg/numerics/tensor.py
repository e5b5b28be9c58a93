"""
Dense tensors participating in a reverse-mode differentiation graph.

A Tensor wraps a numpy array. Operations (see numerics.functional) record
their parents and a backward closure on the output tensor; `backward()` walks
the graph in reverse topological order and accumulates `.grad` on every
tensor reachable from the loss.
"""

import itertools
import logging
import threading
from contextlib import contextmanager

import numpy as np

from core.exceptions import GradientError

logger = logging.getLogger(__name__)

_node_ids = itertools.count()
_state = threading.local()


def _grad_enabled():
    return getattr(_state, "grad_enabled", True)


def get_default_dtype():
    return getattr(_state, "dtype", np.float32)


@contextmanager
def no_grad():
    """Operations inside the block build no differentiation graph."""
    previous = _grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


@contextmanager
def precision(dtype):
    """Switch the dtype used for new constants (float32 by default)."""
    previous = get_default_dtype()
    _state.dtype = np.dtype(dtype).type
    try:
        yield
    finally:
        _state.dtype = previous


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name", "node_id", "_parents", "_backward")
    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, name=None, dtype=None):
        array = np.asarray(data, dtype=dtype if dtype is not None else get_default_dtype())
        if array.ndim and 0 in array.shape:
            raise ValueError(f"tensor dimensions must be positive, got {array.shape}")
        self.data = array
        self.grad = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id = next(_node_ids)
        self._parents = ()
        self._backward = None

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Tensor{label} shape={self.shape} dtype={self.data.dtype.name}>"

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self):
        return self.data.item()

    def numpy(self):
        return self.data

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def detach(self):
        return Tensor(self.data, dtype=self.data.dtype)

    def backward(self):
        backward(self)

    # Operator sugar; implementations live in numerics.functional.
    def __add__(self, other):
        from . import functional as F

        return F.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import functional as F

        return F.sub(self, other)

    def __rsub__(self, other):
        from . import functional as F

        return F.sub(other, self)

    def __mul__(self, other):
        from . import functional as F

        return F.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import functional as F

        return F.div(self, other)

    def __neg__(self):
        from . import functional as F

        return F.mul(self, -1.0)

    def __matmul__(self, other):
        from . import functional as F

        return F.matmul(self, other)

    def __getitem__(self, index):
        from . import functional as F

        return F.getitem(self, index)

    @property
    def T(self):
        from . import functional as F

        return F.transpose(self)

    def reshape(self, *shape):
        from . import functional as F

        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return F.reshape(self, shape)

    def sum(self, axis=None, keepdims=False):
        from . import functional as F

        return F.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        from . import functional as F

        return F.mean(self, axis=axis, keepdims=keepdims)


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def make_node(data, parents, backward_fn):
    """Wrap an op result; attach the backward closure when any parent needs a gradient."""
    out = Tensor(data, dtype=data.dtype if isinstance(data, np.ndarray) else None)
    if _grad_enabled() and any(parent.requires_grad for parent in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _topological_order(root):
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.node_id in seen:
            continue
        seen.add(node.node_id)
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and parent.node_id not in seen:
                stack.append((parent, False))
    return order


def backward(loss):
    """Populate `.grad` for every tensor reachable from a scalar loss.

    Gradients accumulate across calls until `zero_grad()` is invoked.
    """
    if loss.size != 1:
        raise GradientError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise GradientError("loss does not depend on any tensor that requires a gradient")

    grads = {loss.node_id: np.ones_like(loss.data)}
    for node in reversed(_topological_order(loss)):
        grad = grads.pop(node.node_id, None)
        if grad is None:
            continue
        node.grad = grad if node.grad is None else node.grad + grad
        if node._backward is None:
            continue
        for parent, parent_grad in zip(node._parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            if parent.node_id in grads:
                grads[parent.node_id] = grads[parent.node_id] + parent_grad
            else:
                grads[parent.node_id] = parent_grad
