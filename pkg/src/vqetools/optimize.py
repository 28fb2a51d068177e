"""Derivative-free coordinate search used for local refinement and VQE."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def coordinate_search(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    step: float = 0.5,
    max_sweeps: int = 200,
    tol: float = 1e-10,
    shrink: float = 0.5,
    grow: float = 1.5,
) -> tuple[np.ndarray, float]:
    """Minimize ``objective`` by adaptive per-coordinate line moves.

    Each sweep tries +/- the current step on every coordinate, keeping
    improvements; a coordinate whose both moves fail has its step shrunk.
    Stops after ``max_sweeps`` sweeps, or earlier once a full sweep improves
    the value by less than ``tol`` with all steps below sqrt(tol). Purely
    local: no global optimality is implied.
    """
    x = np.array(x0, dtype=float)
    fx = float(objective(x))
    if x.size == 0:
        return x, fx
    steps = np.full(x.size, float(step))
    small = max(np.sqrt(tol), 1e-15)
    for _ in range(max_sweeps):
        f_before = fx
        for i in range(x.size):
            moved = False
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sign * steps[i]
                ft = float(objective(trial))
                if ft < fx:
                    x, fx = trial, ft
                    moved = True
                    break
            if moved:
                steps[i] *= grow
            else:
                steps[i] *= shrink
        if f_before - fx < tol and steps.max() < small:
            break
    return x, fx
