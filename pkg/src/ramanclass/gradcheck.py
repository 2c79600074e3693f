"""Finite-difference verification of analytic gradients.

The numeric side only ever evaluates the loss value, never the backward
pass, so it stays independent of the code it checks.
"""

from __future__ import annotations

import numpy as np

from .net import Loss, NetworkSpec, State, loss_and_gradients, loss_value


def finite_difference_grads(
    spec: NetworkSpec, state: State, X, Y, loss: Loss, h: float = 1e-5
) -> State:
    """Central-difference gradient of the total training loss."""
    grads: State = []
    work = [(W.copy(), b.copy()) for W, b in state]
    for li, (W, b) in enumerate(work):
        gW = np.zeros_like(W)
        gb = np.zeros_like(b)
        for idx in np.ndindex(W.shape):
            orig = W[idx]
            W[idx] = orig + h
            up = loss_value(spec, work, X, Y, loss)
            W[idx] = orig - h
            down = loss_value(spec, work, X, Y, loss)
            W[idx] = orig
            gW[idx] = (up - down) / (2.0 * h)
        for idx in np.ndindex(b.shape):
            orig = b[idx]
            b[idx] = orig + h
            up = loss_value(spec, work, X, Y, loss)
            b[idx] = orig - h
            down = loss_value(spec, work, X, Y, loss)
            b[idx] = orig
            gb[idx] = (up - down) / (2.0 * h)
        grads.append((gW, gb))
    return grads


def _flatten(grads: State) -> np.ndarray:
    return np.concatenate([np.concatenate([W.ravel(), b.ravel()]) for W, b in grads])


def gradient_check(
    spec: NetworkSpec, state: State, X, Y, loss: Loss, h: float = 1e-5
) -> float:
    """Relative discrepancy between analytic and central-difference
    gradients: ||ga - gn|| / max(||ga|| + ||gn||, tiny)."""
    _, analytic = loss_and_gradients(spec, state, X, Y, loss)
    numeric = finite_difference_grads(spec, state, X, Y, loss, h=h)
    ga = _flatten(analytic)
    gn = _flatten(numeric)
    denom = max(float(np.linalg.norm(ga) + np.linalg.norm(gn)), 1e-12)
    return float(np.linalg.norm(ga - gn)) / denom
