"""Adaptive embedded Runge-Kutta 5(4) for batched complex ODE systems.

Dormand-Prince coefficients, FSAL, PI-free elementary step control.  The
state is a complex ndarray of any shape; batches of independent channels
(e.g. Wronskian integrations at many spectral parameters) integrate in one
pass with a shared step size, which keeps the per-step Python overhead
amortized over the whole batch.

Sample points are hit exactly by capping the step, so recorded values carry
no interpolation error.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import StepFailure

__all__ = ["integrate"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-13,
    samples: Optional[Sequence[float]] = None,
    initial_step: Optional[float] = None,
    max_steps: int = 2_000_000,
):
    """Integrate y' = rhs(t, y) from t0 to t1 (either direction).

    Returns ``(y_final, sampled, n_steps)`` where ``sampled`` is the state
    recorded at each requested sample point (in the given order), or None.
    Raises ``StepFailure`` when the controller underflows the step size.
    """
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0.0:
        return y0.copy(), (np.array([y0.copy()]) if samples else None), 0
    y = np.array(y0, dtype=complex)
    t = t0
    sample_list = list(samples) if samples is not None else []
    for s in sample_list:
        if (s - t0) * direction < -1e-15 or (t1 - s) * direction < -1e-15:
            raise ValueError("sample point outside integration span")
    recorded = []
    next_sample = 0

    h = initial_step if initial_step is not None else span * 1e-6
    h = min(h, span)

    def h_floor(t_now: float) -> float:
        # no-progress threshold: a step this small cannot move t_now
        return 1e-15 * max(abs(t_now), 1e-30)

    k = [None] * 7
    k[0] = rhs(t, y)
    steps = 0
    while (t1 - t) * direction > 1e-15 * max(abs(t), abs(t1), 1.0):
        if steps >= max_steps:
            raise StepFailure(f"step budget exhausted at t={t:g}")
        # cap the step at the next sample point and the endpoint
        h_cap = abs(t1 - t)
        if next_sample < len(sample_list):
            h_cap = min(h_cap, abs(sample_list[next_sample] - t))
        h_try = min(h, h_cap) if h_cap > 0 else h
        if h_try < h_floor(t):
            raise StepFailure(f"step size underflow at t={t:g}")
        dt = direction * h_try

        for i in range(1, 6):
            acc = _A[i][0] * k[0]
            for j in range(1, i):
                if _A[i][j] != 0.0:
                    acc = acc + _A[i][j] * k[j]
            k[i] = rhs(t + _C[i] * dt, y + dt * acc)

        y_new = y + dt * (
            _B5[0] * k[0] + _B5[2] * k[2] + _B5[3] * k[3] + _B5[4] * k[4] + _B5[5] * k[5]
        )
        # FSAL stage evaluated at (t + dt, y_new)
        k6 = rhs(t + dt, y_new)
        err_vec = dt * (
            _E[0] * k[0] + _E[2] * k[2] + _E[3] * k[3] + _E[4] * k[4] + _E[5] * k[5] + _E[6] * k6
        )
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = np.abs(err_vec) / scale
        err_norm = float(np.sqrt(np.mean(np.square(ratio)))) if ratio.size else 0.0

        if err_norm <= 1.0:
            t = t + dt
            y = y_new
            k[0] = k6  # FSAL
            steps += 1
            if next_sample < len(sample_list) and abs(t - sample_list[next_sample]) <= 1e-12 * max(
                1.0, abs(t)
            ):
                recorded.append(y.copy())
                next_sample += 1
            grow = 0.9 * err_norm ** -0.2 if err_norm > 0.0 else 5.0
            h = h_try * min(5.0, max(0.2, grow))
        else:
            h = h_try * max(0.2, 0.9 * err_norm ** -0.2)
            if h < h_floor(t):
                raise StepFailure(f"step size underflow at t={t:g} (err {err_norm:g})")
    if next_sample < len(sample_list):
        # endpoint coincides with the last samples
        while next_sample < len(sample_list) and abs(t - sample_list[next_sample]) <= 1e-9 * max(
            1.0, abs(t)
        ):
            recorded.append(y.copy())
            next_sample += 1
        if next_sample < len(sample_list):
            raise StepFailure("sample points were not reached")
    sampled = np.array(recorded) if samples is not None else None
    return y, sampled, steps
