"""Moment maximisation over probability measures on a finite spectrum.

For a normal matrix every state restricted to C*(A) is a probability
measure on the spectrum, so the strong moment E|X - EX|^k and the weak
moment |E(X - EX)^k| only have to be maximised over the simplex of weights.

Three independent routes are provided:

* ``weak_moment_hermitian``: two-point closed form for real spectra.
* atom search (``strong_moment_discrete`` / ``weak_moment_discrete``):
  every support of at most three atoms, dense weight grid, local refinement.
* ``fixed_mean_moment``: for a fixed mean the problem is linear (strong) or
  convex (weak) in the weights, so the optimum is a vertex of
  ``{t >= 0, sum t = 1, sum t x = mu}``; the mean is then searched over.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .distance import spectral_diameter
from .errors import (
    EmptyInputError,
    NonRealSpectrumError,
    ResolutionTooHighError,
    TooManyAtomsError,
    check_k,
)
from .linalg import Spectrum
from .polynomials import sup_norm_of
from .search import pattern_max, pattern_max_batch
from .states import Certificate, DiscreteState, Mode, MomentResult, as_mode

GRID_RESOLUTION = 400
SCREEN_RESOLUTION = 60
SCREEN_MARGIN = 0.98
REFINE_TOL = 1e-11
AGREEMENT_TOL = 1e-4
MERGE_TOL = 1e-9


def support_points(spec) -> np.ndarray:
    """Distinct eigenvalues, sorted by (real, imag); near-equal ones are merged."""
    ev = np.asarray(spec.eigenvalues if isinstance(spec, Spectrum) else spec, dtype=complex).ravel()
    if ev.size == 0:
        raise EmptyInputError("empty spectrum")
    tol = MERGE_TOL * (1.0 + np.abs(ev).max())
    ev = ev[np.lexsort((ev.imag, ev.real))]
    out: list[complex] = []
    for z in ev:
        if not any(abs(z - u) <= tol for u in out):
            out.append(complex(z))
    return np.array(out)


def _objective(points: np.ndarray, W: np.ndarray, k: int, mode: Mode) -> np.ndarray:
    """k-th power moment for each row of the weight matrix W."""
    mu = W @ points
    dev = points[None, :] - mu[:, None]
    if mode is Mode.STRONG:
        sq = dev.real**2 + dev.imag**2
        return np.sum(W * (sq ** (k // 2) if k % 2 == 0 else sq ** (k / 2)), axis=1)
    return np.abs(np.sum(W * dev**k, axis=1))


def _objective_batch(P: np.ndarray, W: np.ndarray, k: int, mode: Mode) -> np.ndarray:
    """Objective for every support row of P (S, m) and weight row of W (G, m); shape (S, G)."""
    mu = P @ W.T
    dev = P[:, None, :] - mu[:, :, None]
    if mode is Mode.STRONG:
        sq = dev.real**2 + dev.imag**2
        return np.einsum("gm,sgm->sg", W, sq ** (k // 2) if k % 2 == 0 else sq ** (k / 2))
    return np.abs(np.einsum("gm,sgm->sg", W, dev**k))


@lru_cache(maxsize=1024)
def compositions(m: int, total: int) -> np.ndarray:
    """Integer vectors of length m with non-negative entries summing to ``total`` (read-only, cached)."""
    if m == 1:
        out = np.array([[total]])
    elif m == 2:
        i = np.arange(total + 1)
        out = np.column_stack([i, total - i])
    else:
        blocks = []
        for first in range(total + 1):
            rest = compositions(m - 1, total - first)
            blocks.append(np.column_stack([np.full(len(rest), first), rest]))
        out = np.vstack(blocks)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def simplex_grid(m: int, resolution: int) -> np.ndarray:
    """Weight vectors on the (m-1)-simplex with coordinates in multiples of 1/resolution."""
    grid = compositions(m, resolution) / resolution
    grid.setflags(write=False)
    return grid


def _weights_from_free(x: np.ndarray) -> np.ndarray:
    return np.append(x, 1.0 - x.sum())


def _grid_subset(points, k, mode, resolution):
    grid = simplex_grid(len(points), resolution)
    vals = _objective(points, grid, k, mode)
    i = int(np.argmax(vals))
    return np.array(grid[i]), float(vals[i])


def _refine_subset(points, w0, v0, k, mode, step, tol):
    """Local pattern search over the weights of one support set."""

    def fb(X):
        W = np.column_stack([X, 1.0 - X.sum(axis=1)])
        vals = _objective(points, np.clip(W, 0.0, None), k, mode)
        vals[np.any(W < 0, axis=1)] = -np.inf
        return vals

    x, fx = pattern_max_batch(fb, w0[:-1], step, tol)
    if fx < v0:
        return w0, v0
    return _weights_from_free(x), fx


def _optimize_subset(points, k, mode, resolution, tol):
    if len(points) == 1:
        return np.ones(1), 0.0
    w0, v0 = _grid_subset(points, k, mode, resolution)
    return _refine_subset(points, w0, v0, k, mode, 1.0 / resolution, tol)


def _atom_search(spec, k: int, mode: Mode, tol: float, max_atoms: int = 3):
    """Grid every support of at most ``max_atoms`` points, refine the promising ones.

    A coarse screening grid comes first; subsets more than 2% below the best
    screened value cannot win (the coarse grid error is well under 1% for the
    moment orders used here) and keep their screening value.
    """
    points = support_points(spec)
    m = len(points)
    cands = [((0,), np.ones(1), 0.0)]
    for size in range(2, min(max_atoms, m) + 1):
        subsets = list(itertools.combinations(range(m), size))
        grid = simplex_grid(size, SCREEN_RESOLUTION)
        for lo in range(0, len(subsets), 64):
            chunk = subsets[lo:lo + 64]
            vals = _objective_batch(points[np.array(chunk)], grid, k, mode)
            best_rows = np.argmax(vals, axis=1)
            for subset, i, row in zip(chunk, best_rows, vals):
                cands.append((subset, np.array(grid[i]), float(row[i])))
    top = max(v for _, _, v in cands)
    best = None  # (objective, subset, weights)
    per_size: dict[int, float] = {}
    for subset, w, v in cands:
        if len(subset) > 1 and v >= SCREEN_MARGIN * top:
            w, v = _refine_subset(points[list(subset)], w, v, k, mode, 1.0 / SCREEN_RESOLUTION, tol)
        per_size[len(subset)] = max(per_size.get(len(subset), 0.0), v)
        # strict improvement needed: ties keep the smaller / lexicographically earlier support
        if best is None or v > best[0] * (1.0 + 1e-9) + 1e-300:
            best = (v, subset, w)
    val, subset, w = best
    keep = w > 0
    state = DiscreteState(points[list(subset)][keep], w[keep] / w[keep].sum())
    info = {"best_by_support_size": {str(s): v ** (1.0 / k) for s, v in per_size.items()}}
    return state, info


def _finish(state: DiscreteState, k: int, mode: Mode, cert: Certificate, info=None) -> MomentResult:
    raw = state.strong_moment(k) if mode is Mode.STRONG else abs(state.weak_moment(k))
    return MomentResult(k, mode, raw ** (1.0 / k), state.mean(), state, cert, info or {})


def moment_discrete(spec, k: int, mode="Strong", tol: float = REFINE_TOL, cross_check: bool = True) -> MomentResult:
    """Maximal strong or weak k-th central moment over measures on the spectrum.

    The atom search result is returned.  With ``cross_check`` the fixed-mean
    vertex route is run as well; its value is stored in ``info`` and
    ``info["flagged"]`` is set when the two disagree by more than 1e-4.
    """
    k = check_k(k)
    mode = as_mode(mode)
    state, info = _atom_search(spec, k, mode, tol)
    res = _finish(state, k, mode, Certificate.ATOM_SEARCH, info)
    if cross_check:
        other = fixed_mean_moment(spec, k, mode)
        info["fixed_mean_value"] = other.value
        info["flagged"] = bool(abs(other.value - res.value) > AGREEMENT_TOL * (1.0 + res.value))
    return res


def strong_moment_discrete(spec, k: int, tol: float = REFINE_TOL, cross_check: bool = True) -> MomentResult:
    return moment_discrete(spec, k, Mode.STRONG, tol, cross_check)


def weak_moment_discrete(spec, k: int, tol: float = REFINE_TOL, cross_check: bool = True) -> MomentResult:
    return moment_discrete(spec, k, Mode.WEAK, tol, cross_check)


def weak_moment_hermitian(spec, k: int) -> MomentResult:
    """Closed form for real spectra: ||p_k||^(1/k) * diam, attained by a two-point law.

    The witness puts weight xi (the maximiser of |p_k|) on the largest
    eigenvalue and 1 - xi on the smallest.
    """
    k = check_k(k)
    points = support_points(spec)
    scale = 1.0 + np.abs(points).max()
    if np.any(np.abs(points.imag) > 1e-10 * scale):
        raise NonRealSpectrumError("weak_moment_hermitian needs a real spectrum")
    hi, lo = points.real.max(), points.real.min()
    sn = sup_norm_of(k, "p")
    if len(points) == 1 or sn.argmax in (0.0, 1.0):
        state = DiscreteState([complex(hi)], [1.0])
    else:
        state = DiscreteState([complex(hi), complex(lo)], [sn.argmax, 1.0 - sn.argmax])
    res = _finish(state, k, Mode.WEAK, Certificate.CLOSED_FORM)
    value = sn.value ** (1.0 / k) * (hi - lo)
    return MomentResult(k, Mode.WEAK, value, res.mean, state, Certificate.CLOSED_FORM, {"diameter": hi - lo})


# ---------------------------------------------------------------------------
# fixed-mean vertex enumeration


def _affine_frame(points: np.ndarray):
    """Dimension (0, 1 or 2) of the affine hull, with an origin and direction for dim 1."""
    p0 = points[0]
    rel = points - p0
    span = np.abs(rel).max()
    if span == 0.0:
        return 0, p0, None
    direction = rel[np.argmax(np.abs(rel))] / span
    direction /= abs(direction)
    off_line = np.abs((rel * direction.conjugate()).imag)
    if off_line.max() <= 1e-12 * span:
        return 1, p0, direction
    return 2, p0, None


def _vertex_values(points, mu: complex, k: int, mode: Mode, triangles, dim, frame, pairs=None):
    """Best vertex of the fixed-mean polytope; returns (objective, support indices, weights)."""
    dev = points - mu
    c = np.abs(dev) ** k if mode is Mode.STRONG else dev**k
    if dim == 1:
        p0, direction = frame
        u = ((points - p0) * direction.conjugate()).real
        v = ((mu - p0) * direction.conjugate()).real
        a, b = pairs[:, 0], pairs[:, 1]  # ordered so that u[a] < u[b]
        ok = (u[a] - 1e-15 <= v) & (v <= u[b] + 1e-15)
        if not ok.any():
            return (-np.inf, None, None)
        t = np.clip((u[b] - v) / (u[b] - u[a]), 0.0, 1.0)
        vals = np.abs(t * c[a] + (1 - t) * c[b])
        vals[~ok] = -np.inf
        i = int(np.argmax(vals))
        return (float(vals[i]), (a[i], b[i]), np.array([t[i], 1 - t[i]]))
    tri = triangles
    P = points[tri]  # (T, 3)
    # barycentric coordinates of mu in every triangle
    x, y = P.real, P.imag
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    ok = np.abs(det) > 1e-14
    det = np.where(ok, det, 1.0)
    l1 = ((mu.real - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (mu.imag - y[:, 0])) / det
    l2 = ((x[:, 1] - x[:, 0]) * (mu.imag - y[:, 0]) - (mu.real - x[:, 0]) * (y[:, 1] - y[:, 0])) / det
    L = np.column_stack([1 - l1 - l2, l1, l2])
    ok &= np.all(L >= -1e-12, axis=1)
    if not ok.any():
        return (-np.inf, None, None)
    L = np.clip(L, 0.0, None)
    L /= L.sum(axis=1, keepdims=True)
    vals = np.abs(np.sum(L * c[tri], axis=1))
    vals[~ok] = -np.inf
    i = int(np.argmax(vals))
    return (float(vals[i]), tuple(tri[i]), L[i])


def _grid_scores(points, mus: np.ndarray, k: int, mode: Mode, triangles, chunk: int = 256) -> np.ndarray:
    """Vectorised best-vertex values for many means at once (2-d affine hull)."""
    P = points[triangles]
    x, y = P.real, P.imag
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    good = np.abs(det) > 1e-14
    det = np.where(good, det, 1.0)
    out = np.empty(len(mus))
    for lo in range(0, len(mus), chunk):
        mu = mus[lo:lo + chunk, None]
        l1 = ((mu.real - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (mu.imag - y[:, 0])) / det
        l2 = ((x[:, 1] - x[:, 0]) * (mu.imag - y[:, 0]) - (mu.real - x[:, 0]) * (y[:, 1] - y[:, 0])) / det
        L = np.stack([1 - l1 - l2, l1, l2], axis=-1)
        ok = good & np.all(L >= -1e-12, axis=-1)
        L = np.clip(L, 0.0, None)
        L /= L.sum(axis=-1, keepdims=True)
        dev = P[None] - mu[..., None]
        c = np.abs(dev) ** k if mode is Mode.STRONG else dev**k
        vals = np.abs(np.sum(L * c, axis=-1))
        vals[~ok] = -np.inf
        out[lo:lo + chunk] = vals.max(axis=1)
    return out


def fixed_mean_moment(spec, k: int, mode="Strong", grid: int = 41, seeds: int = 3, tol: float = REFINE_TOL) -> MomentResult:
    """Maximise over the mean: for each mean the optimum sits on a polytope vertex."""
    k = check_k(k)
    mode = as_mode(mode)
    points = support_points(spec)
    dim, p0, direction = _affine_frame(points)
    if dim == 0:
        return _finish(DiscreteState([p0], [1.0]), k, mode, Certificate.FIXED_MEAN_LP)
    triangles = np.array(list(itertools.combinations(range(len(points)), 3))) if dim == 2 else None
    pairs = None
    if dim == 1:
        u = ((points - p0) * direction.conjugate()).real
        pairs = np.array([(i, j) if u[i] < u[j] else (j, i) for i, j in itertools.combinations(range(len(points)), 2)])

    if dim == 1:
        u = ((points - p0) * direction.conjugate()).real
        coords = [np.array([s]) for s in np.linspace(u.min(), u.max(), grid * grid)]
        to_mu = lambda x: p0 + x[0] * direction  # noqa: E731
        cell = (u.max() - u.min()) / (grid * grid)
    else:
        xs = np.linspace(points.real.min(), points.real.max(), grid)
        ys = np.linspace(points.imag.min(), points.imag.max(), grid)
        coords = [np.array([a, b]) for a in xs for b in ys]
        to_mu = lambda x: complex(x[0], x[1])  # noqa: E731
        cell = max(xs[1] - xs[0], ys[1] - ys[0])

    def value(x):
        return _vertex_values(points, to_mu(x), k, mode, triangles, dim, (p0, direction), pairs)[0]

    if dim == 2:
        def batch(X):
            return _grid_scores(points, X[:, 0] + 1j * X[:, 1], k, mode, triangles)
    else:
        def batch(X):
            return np.array([value(x) for x in X])

    scores = batch(np.array(coords))
    scored = sorted(zip(scores, range(len(coords))), key=lambda t: -t[0])
    best_x, best_v = None, -np.inf
    for v0, i in scored[:seeds]:
        if not np.isfinite(v0):
            continue
        x, v = pattern_max_batch(batch, coords[i], cell, tol * (1.0 + np.abs(points).max()))
        if v > best_v:
            best_x, best_v = x, v
    _, subset, w = _vertex_values(points, to_mu(best_x), k, mode, triangles, dim, (p0, direction), pairs)
    if dim == 2 and np.count_nonzero(w > 1e-9) == 2:
        # the value is a ridge along the winning edge; follow it in one dimension
        a, b = (points[i] for i, wi in zip(subset, w) if wi > 1e-9)
        t0 = ((to_mu(best_x) - a) * np.conj(b - a)).real / abs(b - a) ** 2

        def line(T):
            mus = a + T[:, 0] * (b - a)
            return batch(np.column_stack([mus.real, mus.imag]))

        t, v = pattern_max_batch(line, np.array([t0]), 1.0 / grid, tol)
        if v > best_v:
            mu = a + t[0] * (b - a)
            best_x, best_v = np.array([mu.real, mu.imag]), v
            _, subset, w = _vertex_values(points, mu, k, mode, triangles, dim, (p0, direction), pairs)
    keep = w > 1e-15
    state = DiscreteState(points[list(subset)][keep], w[keep] / w[keep].sum())
    return _finish(state, k, mode, Certificate.FIXED_MEAN_LP)


# ---------------------------------------------------------------------------
# independent brute force


def bruteforce_simplex_oracle(support, k: int, mode="Weak", resolution: int = 200) -> float:
    """Grid maximum of the moment over all weight vectors (no vertex reduction).

    Returns the k-th root of the best grid value, a lower bound on the
    optimum that converges as the resolution grows.
    """
    k = check_k(k)
    mode = as_mode(mode)
    points = np.asarray(support, dtype=complex).ravel()
    if len(points) > 4:
        raise TooManyAtomsError("the brute-force oracle handles at most 4 atoms")
    if resolution > 400:
        raise ResolutionTooHighError("resolution must be at most 400")
    if len(points) == 0:
        raise EmptyInputError("empty support")
    if len(points) == 1:
        return 0.0
    best = 0.0
    m = len(points)
    # chunk on the first coordinate to bound memory
    for first in range(resolution + 1):
        rest = compositions(m - 1, resolution - first)
        W = np.column_stack([np.full(len(rest), first), rest]) / resolution
        best = max(best, float(_objective(points, W, k, mode).max()))
    return best ** (1.0 / k)


def two_atom_optimum(support, k: int, mode="Weak", tol: float = REFINE_TOL) -> float:
    """Best value over all two-point sub-supports."""
    mode = as_mode(mode)
    points = np.asarray(support, dtype=complex).ravel()
    best = 0.0
    for i, j in itertools.combinations(range(len(points)), 2):
        _, v = _optimize_subset(points[[i, j]], k, mode, GRID_RESOLUTION, tol)
        best = max(best, v)
    return best ** (1.0 / k)


def spectrum_diameter(spec) -> float:
    return spectral_diameter(support_points(spec))
