"""Distance from a matrix to the scalars, min over lambda of ||A - lambda I||.

For normal matrices this is the radius of the smallest disc containing the
spectrum; for everything else the convex function
``lambda -> sigma_max(A - lambda I)`` is minimised numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, NoConvergenceError
from .linalg import MatrixClass, Spectrum, as_matrix, classify, eig_normal, opnorm

DEFAULT_SEED = 0
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class DistanceMethod(str, enum.Enum):
    ENCLOSING_DISC = "EnclosingDisc"
    CONVEX_DESCENT = "ConvexDescent"


@dataclass(frozen=True)
class EnclosingDisc:
    center: complex
    radius: float
    support: tuple = ()

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return abs(z - self.center) <= self.radius + slack


@dataclass(frozen=True)
class DistanceResult:
    lambda0: complex
    distance: float
    method: DistanceMethod


def _disc2(a: complex, b: complex) -> EnclosingDisc:
    c = 0.5 * (a + b)
    return EnclosingDisc(c, max(abs(a - c), abs(b - c)), (a, b))


def _disc3(a: complex, b: complex, c: complex) -> EnclosingDisc:
    ax, ay, bx, by, cx, cy = a.real, a.imag, b.real, b.imag, c.real, c.imag
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    scale = max(abs(a - b), abs(b - c), abs(a - c)) ** 2
    if abs(d) <= 1e-14 * scale:
        # collinear: the farthest pair spans the disc
        return max((_disc2(p, q) for p, q in ((a, b), (b, c), (a, c))), key=lambda e: e.radius)
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    center = complex(ux, uy)
    return EnclosingDisc(center, max(abs(a - center), abs(b - center), abs(c - center)), (a, b, c))


def smallest_enclosing_disc(points, seed: int | None = DEFAULT_SEED) -> EnclosingDisc:
    """Minimal enclosing disc by randomized incremental construction (Welzl, move-to-front)."""
    pts = [complex(p) for p in np.ravel(np.asarray(points, dtype=complex))]
    if not pts:
        raise EmptyInputError("smallest_enclosing_disc needs at least one point")
    rng = np.random.default_rng(seed)
    pts = [pts[i] for i in rng.permutation(len(pts))]
    span = max(abs(p - pts[0]) for p in pts)
    slack = 1e-12 * (1.0 + span)

    disc = EnclosingDisc(pts[0], 0.0, (pts[0],))
    for i, p in enumerate(pts):
        if disc.contains(p, slack):
            continue
        disc = EnclosingDisc(p, 0.0, (p,))
        for j in range(i):
            q = pts[j]
            if disc.contains(q, slack):
                continue
            disc = _disc2(p, q)
            for m in range(j):
                r = pts[m]
                if not disc.contains(r, slack):
                    disc = _disc3(p, q, r)
    return disc


def spectral_diameter(spec) -> float:
    """Largest pairwise distance between eigenvalues."""
    ev = np.asarray(spec.eigenvalues if isinstance(spec, Spectrum) else spec, dtype=complex)
    if ev.size == 0:
        raise EmptyInputError("empty spectrum")
    return float(np.abs(ev[:, None] - ev[None, :]).max())


def _golden_min(f, lo: float, hi: float, tol: float):
    """Golden-section minimisation of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _convex_descent(A: np.ndarray, tol: float) -> DistanceResult:
    n = A.shape[0]
    eye = np.eye(n)
    center = complex(np.trace(A) / n)
    # the optimum lies in the numerical range, inside the disc of radius ||A - center||
    half = 1.01 * opnorm(A - center * eye)
    step = tol * max(half, 1.0)
    # inner values feed the outer comparisons, so they must be near machine precision
    inner_step = 8 * np.finfo(float).eps * (abs(center) + half)

    def f(lam: complex) -> float:
        return opnorm(A - lam * eye)

    def inner(x: float):
        y, v = _golden_min(lambda y: f(complex(x, y)), center.imag - half, center.imag + half, inner_step)
        return v, y

    memo: dict[float, tuple] = {}

    def outer(x: float) -> float:
        if x not in memo:
            memo[x] = inner(x)
        return memo[x][0]

    x, _ = _golden_min(outer, center.real - half, center.real + half, max(step, inner_step))
    _, y = inner(x)
    lam = complex(x, y)
    best = f(lam)
    # flatness check: no stencil point may beat the final value by more than tol
    for ang in np.arange(8) * (np.pi / 4):
        probe = f(lam + step * complex(math.cos(ang), math.sin(ang)))
        if probe < best - step:
            raise NoConvergenceError("distance search ended on a non-flat stencil")
    return DistanceResult(lam, best, DistanceMethod.CONVEX_DESCENT)


def min_scalar_distance(A, tol: float = 1e-10, method: str | None = None) -> DistanceResult:
    """min over complex lambda of the operator norm ||A - lambda I||.

    ``method`` forces "EnclosingDisc" (normal input only) or "ConvexDescent";
    by default normal matrices use the disc and others the convex search.
    """
    A = as_matrix(A)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = A.shape[0]
    c = A[0, 0]
    if np.allclose(A, c * np.eye(n), rtol=0.0, atol=1e-14 * (1.0 + abs(c))):
        return DistanceResult(complex(c), 0.0, DistanceMethod.ENCLOSING_DISC)
    if method is None:
        normal = classify(A) is not MatrixClass.GENERAL
        method = DistanceMethod.ENCLOSING_DISC if normal else DistanceMethod.CONVEX_DESCENT
    method = DistanceMethod(method)
    if method is DistanceMethod.ENCLOSING_DISC:
        disc = smallest_enclosing_disc(eig_normal(A).eigenvalues)
        return DistanceResult(disc.center, opnorm(A - disc.center * np.eye(n)), method)
    return _convex_descent(A, tol)
