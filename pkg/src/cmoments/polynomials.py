"""The extremal moment polynomials and their sup-norms on [0, 1].

    p_k(x) = x (1 - x)^k + (-1)^k x^k (1 - x)
    q_k(x) = x (1 - x)^k + x^k (1 - x)

``|p_k|`` is the k-th central moment of a two-point law with weight x,
``q_k`` its absolute counterpart.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvalidKError, check_k

K_MAX = 64
GRID_POINTS = 10_000
BISECT_TOL = 1e-14


class Kind(str, enum.Enum):
    P = "p"
    Q = "q"


@dataclass(frozen=True)
class MomentPolynomial:
    k: int
    kind: Kind
    coefficients: tuple  # ascending powers, length k + 2

    @property
    def sign(self) -> float:
        return (-1.0) ** self.k if self.kind is Kind.P else 1.0

    def __call__(self, x):
        # factored form; the monomial expansion cancels badly once k > ~30
        x = np.asarray(x, dtype=float)
        return x * (1 - x) ** self.k + self.sign * x**self.k * (1 - x)

    def horner(self, x):
        return P.polyval(x, self.coefficients)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k = self.k
        return (1 - x) ** (k - 1) * (1 - (k + 1) * x) + self.sign * x ** (k - 1) * (k - (k + 1) * x)


@dataclass(frozen=True)
class SupNormResult:
    value: float
    argmax: float


def build(k: int, kind="p") -> MomentPolynomial:
    k = check_k(k)
    if k > K_MAX:
        raise InvalidKError(f"k must be at most {K_MAX}")
    kind = Kind(str(getattr(kind, "value", kind)).lower())
    return _build(k, kind)


@lru_cache(maxsize=None)
def _build(k: int, kind: Kind) -> MomentPolynomial:
    # integer coefficients: expand exactly in Python ints, then convert
    one_minus_x_k = [(-1) ** j * comb(k, j) for j in range(k + 1)]
    first = [0] + one_minus_x_k + [0]  # x (1-x)^k
    sign = (-1) ** k if kind is Kind.P else 1
    second = [0] * (k + 2)
    second[k] += sign  # x^k (1 - x)
    second[k + 1] -= sign
    coeffs = tuple(float(a + b) for a, b in zip(first, second))
    return MomentPolynomial(k, kind, coeffs)


def _bisect(f, a: float, b: float, fa: float, tol: float = BISECT_TOL) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def critical_points(poly: MomentPolynomial, grid_points: int = GRID_POINTS) -> list[float]:
    """Roots of the derivative in (0, 1), bracketed on a uniform grid and bisected."""
    xs = np.linspace(0.0, 1.0, grid_points + 1)
    ds = poly.derivative(xs)
    roots = list(xs[1:-1][ds[1:-1] == 0.0])
    sgn = np.sign(ds)
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        roots.append(_bisect(poly.derivative, xs[i], xs[i + 1], ds[i]))
    return sorted(roots)


def sup_norm(poly: MomentPolynomial) -> SupNormResult:
    """max |poly| on [0, 1]; ties resolve to the smallest maximiser.

    Candidates are the endpoints and every bracketed root of the derivative.
    Values within 1e-12 (relative) of the best count as ties, which absorbs
    rounding differences between mirror-image maxima.
    """
    cands = sorted([0.0, 1.0] + critical_points(poly))
    vals = np.abs(poly(np.array(cands)))
    best = float(vals.max())
    slack = 1e-12 * best
    i = int(np.nonzero(vals >= best - slack)[0][0])
    return SupNormResult(float(vals[i]), float(cands[i]))


@lru_cache(maxsize=None)
def sup_norm_of(k: int, kind: str = "p") -> SupNormResult:
    """Cached ``sup_norm(build(k, kind))``."""
    return sup_norm(build(k, kind))


def moment_constant(k: int, kind: str = "p") -> float:
    """||poly_k||_inf ** (1/k)."""
    return sup_norm_of(k, Kind(kind).value).value ** (1.0 / k)
