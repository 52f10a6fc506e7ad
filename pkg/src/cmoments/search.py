"""Derivative-free local maximisation used by the optimizers."""

from __future__ import annotations

import itertools

import numpy as np


def stencil(dim: int) -> np.ndarray:
    """Compass directions plus the pairwise differences e_i - e_j.

    The difference directions let the search slide along faces of a simplex
    (sum of coordinates fixed), where plain compass moves would stall.
    """
    dirs = [np.eye(dim)[i] * s for i in range(dim) for s in (1.0, -1.0)]
    for i, j in itertools.combinations(range(dim), 2):
        d = np.zeros(dim)
        d[i], d[j] = 1.0, -1.0
        dirs += [d, -d]
    return np.array(dirs)


def pattern_max(f, x0, step: float, tol: float, max_evals: int = 20_000, scales=None):
    """Maximise ``f`` from ``x0`` by an expanding/contracting pattern search.

    ``f`` returns -inf for infeasible points.  ``scales`` stretches the step
    per coordinate.  Returns ``(x, f(x))``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    dirs = stencil(x.size)
    if scales is not None:
        dirs = dirs * np.asarray(scales, dtype=float)
    evals = 1
    while step >= tol and evals < max_evals:
        improved = False
        for d in dirs:
            y = x + step * d
            fy = f(y)
            evals += 1
            if fy > fx:
                x, fx, improved = y, fy, True
                break
        if improved:
            step *= 2.0
        else:
            step *= 0.5
    return x, fx


def pattern_max_batch(fb, x0, step: float, tol: float, max_iter: int = 10_000, scales=None):
    """Batched variant of :func:`pattern_max`: ``fb`` maps an (N, dim) array of points to N values.

    The whole stencil is polled at once and the best improving point is taken.
    """
    x = np.array(x0, dtype=float)
    fx = float(fb(x[None])[0])
    dirs = stencil(x.size)
    if scales is not None:
        dirs = dirs * np.asarray(scales, dtype=float)
    for _ in range(max_iter):
        if step < tol:
            break
        trial = x[None] + step * dirs
        vals = fb(trial)
        i = int(np.argmax(vals))
        if vals[i] > fx:
            x, fx = trial[i], float(vals[i])
            step *= 2.0
        else:
            step *= 0.5
    return x, fx
