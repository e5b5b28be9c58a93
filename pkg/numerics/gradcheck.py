"""
Central finite-difference checks for analytic gradients.

Callers run these inside `precision(np.float64)` with float64 inputs so the
difference quotient is not dominated by rounding.
"""

import numpy as np

from .tensor import no_grad


def relative_error(analytic, numeric, floor=1e-2):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def numeric_derivative(loss_fn, tensor, index, h=1e-3):
    """(f(x + h) - f(x - h)) / 2h for the single entry `index` of `tensor`."""
    original = tensor.data[index]
    with no_grad():
        tensor.data[index] = original + h
        upper = float(loss_fn().data)
        tensor.data[index] = original - h
        lower = float(loss_fn().data)
    tensor.data[index] = original
    return (upper - lower) / (2.0 * h)


def analytic_gradients(loss_fn, tensors):
    for tensor in tensors:
        tensor.grad = None
    loss = loss_fn()
    loss.backward()
    return [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in tensors]


def check_gradients(loss_fn, tensors, h=1e-3, samples=None, rng=None, floor=1e-2):
    """Compare analytic and numeric derivatives; returns the worst relative error.

    With `samples` set, that many (tensor, index) entries are drawn uniformly
    over all entries of all tensors; otherwise every entry is checked.
    """
    tensors = list(tensors)
    grads = analytic_gradients(loss_fn, tensors)
    entries = [(k, index) for k, t in enumerate(tensors) for index in np.ndindex(t.shape)]
    if samples is not None and samples < len(entries):
        rng = rng or np.random.default_rng(0)
        chosen = rng.choice(len(entries), size=samples, replace=False)
        entries = [entries[c] for c in sorted(chosen)]
    worst = 0.0
    for k, index in entries:
        numeric = numeric_derivative(loss_fn, tensors[k], index, h=h)
        worst = max(worst, relative_error(float(grads[k][index]), numeric, floor=floor))
    return worst
