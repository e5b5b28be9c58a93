"""
Differentiable operations over numerics.tensor.Tensor.

Every op computes its forward value with numpy and registers a closure
mapping the output gradient onto one gradient per parent (None for parents
that receive nothing). Broadcasting follows numpy; gradients are reduced back
to each operand's shape.
"""

import numbers

import numpy as np

from core.exceptions import ConfigurationError, DegenerateMaskError, DimensionError

from .tensor import as_tensor, make_node


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _is_scalar(value):
    return isinstance(value, numbers.Number)


# ---------------------------------------------------------------------------
# Elementwise arithmetic
# ---------------------------------------------------------------------------


def add(a, b):
    if _is_scalar(b):
        a = as_tensor(a)
        return make_node(a.data + b, (a,), lambda g: (g,))
    if _is_scalar(a):
        return add(b, a)
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("add", a, b)
    return make_node(a.data + b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b):
    if _is_scalar(b):
        return add(a, -b)
    if _is_scalar(a):
        b = as_tensor(b)
        return make_node(a - b.data, (b,), lambda g: (-g,))
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("sub", a, b)
    return make_node(a.data - b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b):
    if _is_scalar(b):
        a = as_tensor(a)
        return make_node(a.data * b, (a,), lambda g: (g * b,))
    if _is_scalar(a):
        return mul(b, a)
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("mul", a, b)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return make_node(a.data * b.data, (a, b), backward)


def div(a, b):
    if _is_scalar(b):
        return mul(a, 1.0 / b)
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("div", a, b)
    out = a.data / b.data

    def backward(g):
        return _unbroadcast(g / b.data, a.shape), _unbroadcast(-g * out / b.data, b.shape)

    return make_node(out, (a, b), backward)


def _check_broadcast(op, a, b):
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def exp(x):
    x = as_tensor(x)
    out = np.exp(x.data)
    return make_node(out, (x,), lambda g: (g * out,))


def log(x):
    x = as_tensor(x)
    return make_node(np.log(x.data), (x,), lambda g: (g / x.data,))


def relu(x):
    x = as_tensor(x)
    positive = x.data > 0
    return make_node(np.where(positive, x.data, 0).astype(x.dtype), (x,), lambda g: (g * positive,))


def sigmoid(x):
    x = as_tensor(x)
    out = (1.0 / (1.0 + np.exp(-x.data))).astype(x.dtype)
    return make_node(out, (x,), lambda g: (g * out * (1.0 - out),))


# ---------------------------------------------------------------------------
# Shape manipulation
# ---------------------------------------------------------------------------


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape)
    if a.ndim > 2 and b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise DimensionError("matmul", a.shape, b.shape)

    def backward(g):
        grad_a = np.matmul(g, np.swapaxes(b.data, -1, -2))
        grad_b = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return make_node(np.matmul(a.data, b.data), (a, b), backward)


def transpose(x, axes=None):
    x = as_tensor(x)
    if axes is None:
        axes = tuple(reversed(range(x.ndim)))
    inverse = tuple(np.argsort(axes))
    return make_node(np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inverse),))


def reshape(x, shape):
    x = as_tensor(x)
    original = x.shape
    return make_node(x.data.reshape(shape), (x,), lambda g: (g.reshape(original),))


def getitem(x, index):
    x = as_tensor(x)

    def backward(g):
        full = np.zeros_like(x.data)
        np.add.at(full, index, g)
        return (full,)

    return make_node(np.array(x.data[index]), (x,), backward)


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise DimensionError("concat", *(t.shape for t in tensors)) from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return make_node(out, tensors, backward)


concat_last_dim = concat


def sum(x, axis=None, keepdims=False):  # noqa: A001
    x = as_tensor(x)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return make_node(np.asarray(x.data.sum(axis=axis, keepdims=keepdims)), (x,), backward)


def mean(x, axis=None, keepdims=False):
    x = as_tensor(x)
    count = x.size if axis is None else np.prod([x.shape[a] for a in np.atleast_1d(axis)])
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / float(count))


# ---------------------------------------------------------------------------
# Lookups
# ---------------------------------------------------------------------------


def index_select(table, ids):
    """Rows of `table` at integer positions `ids` (gradient scatter-adds back)."""
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise IndexError(f"row index out of range for table with {table.shape[0]} rows")

    def backward(g):
        full = np.zeros_like(table.data)
        np.add.at(full, ids, g)
        return (full,)

    return make_node(table.data[ids], (table,), backward)


embedding_lookup = index_select


def pick(x, columns):
    """x[i, columns[i]] for every row i of a 2-D tensor."""
    x = as_tensor(x)
    columns = np.asarray(columns, dtype=np.int64)
    rows = np.arange(x.shape[0])
    if columns.shape != (x.shape[0],):
        raise DimensionError("pick", x.shape, columns.shape)

    def backward(g):
        full = np.zeros_like(x.data)
        np.add.at(full, (rows, columns), g)
        return (full,)

    return make_node(x.data[rows, columns], (x,), backward)


# ---------------------------------------------------------------------------
# Normalisation and probability
# ---------------------------------------------------------------------------


def softmax(x, mask=None):
    """Softmax over the last axis; entries where `mask` is False are exactly 0."""
    x = as_tensor(x)
    if mask is None:
        shifted = x.data - x.data.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
    else:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        if not mask.any(axis=-1).all():
            raise DegenerateMaskError("softmax mask leaves a row without any allowed entry")
        masked = np.where(mask, x.data, -np.inf)
        shifted = masked - masked.max(axis=-1, keepdims=True)
        e = np.where(mask, np.exp(np.where(mask, shifted, 0)), 0)
    out = (e / e.sum(axis=-1, keepdims=True)).astype(x.dtype)

    def backward(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return make_node(out, (x,), backward)


def segment_softmax(scores, segments, n_segments):
    """Softmax of a 1-D score vector within groups given by `segments`."""
    scores = as_tensor(scores)
    segments = np.asarray(segments, dtype=np.int64)
    counts = np.bincount(segments, minlength=n_segments)
    if scores.ndim != 1 or segments.shape != scores.shape:
        raise DimensionError("segment_softmax", scores.shape, segments.shape)
    if (counts[:n_segments] == 0).any():
        raise DegenerateMaskError("segment_softmax: a segment has no entries")

    peak = np.full(n_segments, -np.inf, dtype=scores.dtype)
    np.maximum.at(peak, segments, scores.data)
    e = np.exp(scores.data - peak[segments])
    totals = np.zeros(n_segments, dtype=scores.dtype)
    np.add.at(totals, segments, e)
    out = (e / totals[segments]).astype(scores.dtype)

    def backward(g):
        weighted = np.zeros(n_segments, dtype=g.dtype)
        np.add.at(weighted, segments, g * out)
        return (out * (g - weighted[segments]),)

    return make_node(out, (scores,), backward)


def layer_norm(x, gamma=None, beta=None, eps=1e-5):
    """Normalise over the last axis, then apply the optional affine map."""
    x = as_tensor(x)
    n = x.shape[-1]
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv = 1.0 / np.sqrt((centered * centered).mean(axis=-1, keepdims=True) + eps)
    xhat = (centered * inv).astype(x.dtype)
    parents = [x]
    out = xhat
    if gamma is not None:
        gamma, beta = as_tensor(gamma), as_tensor(beta)
        parents += [gamma, beta]
        out = xhat * gamma.data + beta.data

    def backward(g):
        dxhat = g * gamma.data if gamma is not None else g
        projection = xhat * (dxhat * xhat).sum(axis=-1, keepdims=True)
        dx = inv / n * (n * dxhat - dxhat.sum(axis=-1, keepdims=True) - projection)
        if gamma is None:
            return (dx,)
        return dx, _unbroadcast(g * xhat, gamma.shape), _unbroadcast(g, beta.shape)

    return make_node(out.astype(x.dtype), parents, backward)


def cross_entropy(logits, targets):
    """Per-row -log softmax(logits)[target]; 1-D logits give a scalar."""
    logits = as_tensor(logits)
    squeeze = logits.ndim == 1
    data = logits.data[None, :] if squeeze else logits.data
    targets = np.atleast_1d(np.asarray(targets, dtype=np.int64))
    classes = data.shape[-1]
    if targets.shape != (data.shape[0],):
        raise DimensionError("cross_entropy", logits.shape, targets.shape)
    if targets.size and (targets.min() < 0 or targets.max() >= classes):
        raise IndexError(f"class index out of range for {classes} classes: {targets.tolist()}")

    shifted = data - data.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = shifted - log_norm
    rows = np.arange(data.shape[0])
    losses = -log_probs[rows, targets]
    probs = np.exp(log_probs)

    def backward(g):
        grad = probs.copy()
        grad[rows, targets] -= 1.0
        grad = grad * np.reshape(g, (-1, 1))
        return (grad[0] if squeeze else grad,)

    out = losses[0] if squeeze else losses
    return make_node(np.asarray(out, dtype=logits.dtype), (logits,), backward)


def dropout(x, p, rng=None, training=True):
    """Inverted dropout; identity when p == 0 or outside training."""
    if not 0.0 <= p < 1.0:
        raise ConfigurationError(f"dropout probability must lie in [0, 1), got {p}")
    if not training or p == 0.0:
        return as_tensor(x)
    x = as_tensor(x)
    keep = (rng.random(x.shape) >= p).astype(x.dtype) / (1.0 - p)
    return make_node(x.data * keep, (x,), lambda g: (g * keep,))
