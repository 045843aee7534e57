"""Preconditioning a target stream by causal convolution with monic coefficients.

The transformed target is z_t = sum_{j=0}^n c_j y_{t-j} with y_s = 0 for
s < 1.  Because c_0 = 1, a prediction of z_t converts back to a prediction
of y_t by subtracting the known lagged terms, and the conversion is exact:
the raw residual equals the preconditioned residual at every step.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.signal import lfilter

from seqprecond.dynsys import Trajectory, _as_time_major
from seqprecond.poly import CoefficientVector, as_coeff_array


def convolve(outputs, c) -> np.ndarray:
    """Causal convolution of each output channel with the coefficient vector."""
    y = _as_time_major(outputs)
    coeffs = as_coeff_array(c)
    return lfilter(coeffs, [1.0], y, axis=0)


def reconstruct_prediction(model_output, history, c) -> np.ndarray:
    """Convert a prediction of the transformed target back to the raw one.

    history holds the n most recent raw targets, newest first, zero-padded
    rows allowed; returns model_output - sum_{i=1}^n c_i history[i-1].
    """
    coeffs = as_coeff_array(c)
    out = np.asarray(model_output, dtype=float)
    n = coeffs.size - 1
    if n == 0:
        return out.copy()
    hist = np.asarray(history, dtype=float)
    if hist.ndim == 1:
        hist = hist[:, None]
    if hist.shape[0] < n:
        raise ValueError(f"history holds {hist.shape[0]} rows, need {n}")
    return out - coeffs[1:] @ hist[:n]


@dataclass(frozen=True)
class PreconditionedView:
    """A trajectory together with its convolved target stream."""

    raw: Trajectory
    coeffs: CoefficientVector
    transformed: np.ndarray

    @property
    def horizon(self) -> int:
        return self.raw.horizon


def precondition(traj: Trajectory, c: CoefficientVector) -> PreconditionedView:
    return PreconditionedView(traj, c, convolve(traj.outputs, c))


class OnlinePredictor(Protocol):
    """Minimal streaming interface the wrapper drives."""

    def predict(self, u_t: np.ndarray) -> np.ndarray: ...

    def update(self, residual: np.ndarray) -> None: ...


class PreconditionedOnline:
    """Run an inner online predictor on the preconditioned stream.

    Each step: the inner model predicts the transformed target z_t, the
    wrapper reconstructs a raw prediction from lagged true targets, then
    feeds the inner model its residual against the true z_t.  Raw and
    preconditioned residuals coincide identically, and both error series
    are kept for reporting.
    """

    def __init__(self, inner: OnlinePredictor, c: CoefficientVector, d_out: int):
        self.inner = inner
        self.c = c
        self.d_out = d_out
        n = c.degree
        self._hist = deque(
            [np.zeros(d_out) for _ in range(n)], maxlen=n if n else 1
        )
        self.raw_errors: list[float] = []
        self.precond_errors: list[float] = []

    def _lag_sum(self) -> np.ndarray:
        acc = np.zeros(self.d_out)
        for ci, y in zip(self.c.coeffs[1:], self._hist):
            acc += ci * y
        return acc

    def step(self, u_t: np.ndarray, y_t: np.ndarray) -> np.ndarray:
        y_t = np.asarray(y_t, dtype=float).reshape(self.d_out)
        lag = self._lag_sum()
        z_hat = np.asarray(self.inner.predict(u_t), dtype=float).reshape(self.d_out)
        y_hat = z_hat - lag
        z_t = y_t + lag
        residual = z_hat - z_t
        self.inner.update(residual)
        self.raw_errors.append(float(np.abs(y_hat - y_t).sum()))
        self.precond_errors.append(float(np.abs(residual).sum()))
        if self.c.degree:
            self._hist.appendleft(y_t.copy())
        return y_hat

    def run(self, traj: Trajectory) -> np.ndarray:
        preds = np.empty_like(traj.outputs)
        for t in range(traj.horizon):
            preds[t] = self.step(traj.inputs[t], traj.outputs[t])
        return preds
