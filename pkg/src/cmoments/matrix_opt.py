"""Moment optimisation over density matrices, for matrices that need not be normal.

Lower bounds come from primal ascent: the state is parametrised as
``D = V V* / Tr(V V*)`` with ``V`` an n x 2 complex factor and the moment is
maximised with L-BFGS from many random starts.

Upper bounds come from the fixed-mean program.  For a fixed mean ``mu`` and
a Hermitian objective ``M``,

    max { Tr(D M) : D >= 0, Tr D = 1, Tr(D A) = mu }
      <= min_y  lambda_max(M - y1 H1 - y2 H2) + y1 Re(mu) + y2 Im(mu)

with ``H1 = (A + A*)/2`` and ``H2 = (A - A*)/2i``.  Any ``y`` gives a valid
bound; the minimum is found by Newton's method on a log-sum-exp smoothing
of ``lambda_max`` with a shrinking temperature.  The bound is then maximised
over a grid of means (and, for the weak moment, of phases ``theta`` with
``M = Herm(e^{i theta} (A - mu)^k)``) and refined locally.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .errors import NotHermitianError, check_k
from .linalg import adjoint, as_matrix, herm
from .states import (
    Certificate,
    DensityState,
    Mode,
    MomentResult,
    as_mode,
    strong_moment_fixed_state,
    weak_moment_fixed_state,
)

RANK = 2

DEFAULT_RESTARTS = 32
MAX_ITER = 2000
MU_GRID = 21
N_PHASES = 64
SUPPORT_ANGLES = 256
DEFAULT_SEED = 20240501


# ---------------------------------------------------------------------------
# primal ascent


def _unpack(x: np.ndarray, n: int, rank: int) -> np.ndarray:
    half = n * rank
    return (x[:half] + 1j * x[half:]).reshape(n, rank)


def _pack(Z: np.ndarray) -> np.ndarray:
    return np.concatenate([Z.real.ravel(), Z.imag.ravel()])


def _psd_fn_and_divdiff(P: np.ndarray, k: int):
    """P^(k/2) and the divided-difference matrix of x -> x^(k/2) at the eigenvalues of P."""
    e, U = np.linalg.eigh(P)
    scale = max(e.max(), 1e-300)
    e = np.clip(e, 0.0, None)
    half = k / 2.0
    fe = e**half
    de = e[:, None] - e[None, :]
    close = np.abs(de) <= 1e-10 * scale
    mid = np.maximum(0.5 * (e[:, None] + e[None, :]), 1e-14 * scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = np.where(close, half * mid ** (half - 1.0), (fe[:, None] - fe[None, :]) / np.where(close, 1.0, de))
    return U, fe, dd


class _PrimalObjective:
    """Negated moment and its gradient in the real coordinates of the factor V."""

    def __init__(self, A: np.ndarray, k: int, mode: Mode, rank: int = RANK):
        self.A, self.Ah = A, adjoint(A)
        self.n, self.k, self.mode, self.rank = A.shape[0], k, mode, rank
        self.eye = np.eye(self.n)

    def state(self, x):
        V = _unpack(x, self.n, self.rank)
        G = V @ adjoint(V)
        tr = np.trace(G).real
        return V, G / tr, tr

    def __call__(self, x):
        V, D, tr = self.state(x)
        A, k = self.A, self.k
        mu = np.trace(D @ A)
        B = A - mu * self.eye
        if self.mode is Mode.WEAK:
            Bk1 = np.linalg.matrix_power(B, k - 1)
            N = Bk1 @ B
            F = np.trace(D @ N)
            c = -k * np.trace(D @ Bk1)
            mag = abs(F)
            s = F.conjugate() / mag if mag > 0 else 1.0
            G = herm(s * (N + c * A))
            val = mag
        else:
            U, fe, dd = _psd_fn_and_divdiff(adjoint(B) @ B, k)
            fP = (U * fe) @ adjoint(U)
            Y = adjoint(U) @ D @ U
            Gamma = U @ (dd * Y) @ adjoint(U)
            c = np.trace(Gamma @ adjoint(B))
            G = fP - (c * A + np.conj(c) * self.Ah)
            val = np.trace(D @ fP).real
        G = herm(G)
        Z = (2.0 / tr) * (G - np.trace(G @ D).real * self.eye) @ V
        return -float(val), -_pack(Z)


def _restart_seeds(seed: int, budget: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(budget)]


def moment_lower(A, k: int, mode="Weak", budget: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                 rank: int = RANK, max_iter: int = MAX_ITER) -> MomentResult:
    """Best state found by multi-start L-BFGS on the rank-limited factor."""
    A = as_matrix(A)
    k = check_k(k)
    mode = as_mode(mode)
    n = A.shape[0]
    if mode is Mode.WEAK and k == 1:
        # Tr(D (A - Tr(DA))) vanishes for every state
        state = DensityState.maximally_mixed(n)
        return MomentResult(k, mode, 0.0, state(A), state, Certificate.CLOSED_FORM, {"restarts": 0, "rank": rank})
    obj = _PrimalObjective(A, k, mode, rank)
    best_x, best_f = None, np.inf
    for rng in _restart_seeds(seed, budget):
        x0 = rng.standard_normal(2 * n * rank)
        res = minimize(obj, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-12})
        if res.fun < best_f - 1e-14 * max(1.0, abs(best_f) if np.isfinite(best_f) else 1.0):
            best_x, best_f = res.x, res.fun
    _, D, _ = obj.state(best_x)
    state = DensityState(D)
    if mode is Mode.STRONG:
        raw = strong_moment_fixed_state(A, state, k)
    else:
        raw = abs(weak_moment_fixed_state(A, state, k))
    return MomentResult(k, mode, max(raw, 0.0) ** (1.0 / k), state(A), state, Certificate.PRIMAL_ASCENT,
                        {"restarts": budget, "rank": rank})


# ---------------------------------------------------------------------------
# fixed-mean dual


class MeanConstraints:
    """Independent Hermitian constraint matrices describing ``Tr(D A) = mu``.

    ``A = tau I + H1 + i H2`` with traceless H1, H2.  An orthonormal basis
    ``G`` (Frobenius) of span{H1, H2} is kept together with the 2 x r matrix
    ``C`` so that ``(Re(mu - tau), Im(mu - tau)) = C s`` when ``Tr(D G_a) = s_a``.
    """

    def __init__(self, A: np.ndarray):
        n = A.shape[0]
        self.A = A
        self.tau = complex(np.trace(A) / n)
        A0 = A - self.tau * np.eye(n)
        H = [herm(A0), (A0 - adjoint(A0)) / 2j]
        scale = max(np.linalg.norm(A0), 1e-300)
        basis: list[np.ndarray] = []
        for X in H:
            R = X.copy()
            for Gb in basis:
                R = R - np.trace(Gb @ R).real * Gb
            nr = np.linalg.norm(R)
            if nr > 1e-10 * scale:
                basis.append(R / nr)
        self.G = np.array(basis) if basis else np.zeros((0, n, n), dtype=complex)
        self.r = len(basis)
        self.C = np.array([[np.trace(Gb @ X).real for Gb in basis] for X in H]).reshape(2, self.r)
        self.H = H
        self.scale = scale
        if self.r == 2:
            ang = 2 * np.pi * np.arange(SUPPORT_ANGLES) / SUPPORT_ANGLES
            self.dirs = np.column_stack([np.cos(ang), np.sin(ang)])
            mats = np.einsum("da,aij->dij", self.dirs, self.G)
            self.support = np.linalg.eigvalsh(mats)[:, -1]
        elif self.r == 1:
            ev = np.linalg.eigvalsh(self.G[0])
            self.interval = (ev[0], ev[-1])

    def to_s(self, mu: complex):
        """Constraint values for a mean; ``None`` when mu is off the affine hull."""
        b = np.array([mu.real - self.tau.real, mu.imag - self.tau.imag])
        if self.r == 0:
            return np.zeros(0) if np.linalg.norm(b) <= 1e-12 * (1 + self.scale) else None
        s, *_ = np.linalg.lstsq(self.C, b, rcond=None)
        if np.linalg.norm(self.C @ s - b) > 1e-9 * (1 + self.scale):
            return None
        return s

    def to_mu(self, s) -> complex:
        b = self.C @ np.asarray(s) if self.r else np.zeros(2)
        return complex(self.tau.real + b[0], self.tau.imag + b[1])

    def contains(self, s, slack: float = 1e-12) -> bool:
        """Membership of s in the joint numerical range of G (outer polygon test)."""
        if s is None:
            return False
        if self.r == 0:
            return True
        if self.r == 1:
            lo, hi = self.interval
            return bool(lo - slack <= s[0] <= hi + slack)
        return bool(np.all(self.dirs @ s <= self.support + slack))


def _lmax(M: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(M)[..., -1]


def _smoothed_value(Ms, Gs, S, y, t):
    lam = np.linalg.eigvalsh(Ms - np.einsum("ba,aij->bij", y, Gs))
    top = lam[:, -1:]
    return top[:, 0] + t * np.log(np.exp((lam - top) / t[:, None]).sum(axis=1)) + np.einsum("ba,ba->b", y, S)


def _smoothed(Ms, Gs, S, y, t):
    """Log-sum-exp smoothed dual objective, its gradient and Hessian (batched)."""
    L = Ms - np.einsum("ba,aij->bij", y, Gs)
    lam, U = np.linalg.eigh(L)
    top = lam[:, -1:]
    z = np.exp((lam - top) / t[:, None])
    ssum = z.sum(axis=1, keepdims=True)
    p = z / ssum
    f = top[:, 0] + t * np.log(ssum[:, 0]) + np.einsum("ba,ba->b", y, S)
    h = np.einsum("bji,ajk,bkl->bail", U.conj(), Gs, U)  # U* G_a U
    d = np.einsum("baii->bai", h).real
    pd = np.einsum("bi,bai->ba", p, d)
    grad = S - pd
    dl = lam[:, :, None] - lam[:, None, :]
    x = dl / t[:, None, None]
    small = np.abs(x) < 1.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        near = (p[:, None, :] / t[:, None, None]) * np.where(small, np.expm1(x) / np.where(x == 0, 1.0, x), 0.0)
        near = np.where(small & (x == 0), p[:, None, :] / t[:, None, None], near)
        far = (p[:, :, None] - p[:, None, :]) / np.where(small, 1.0, dl)
    phi = np.where(small, near, far)
    hess = np.einsum("bij,baij,bcij->bac", phi, h, h.conj()).real
    hess -= np.einsum("ba,bc->bac", pd, pd) / t[:, None, None]
    return f, grad, hess


def dual_bound_batch(Ms, Gs, S, t_final: float = 1e-10, t_start: float = 1e-1, newton_iters: int = 30):
    """Minimise the fixed-mean dual for a batch of (M, s) sharing constraint matrices Gs.

    Returns ``(values, y)``; every value is a valid upper bound on its primal.
    Temperatures are relative to the eigenvalue spread of each M.
    """
    Ms = np.asarray(Ms, dtype=complex)
    S = np.asarray(S, dtype=float).reshape(len(Ms), -1)
    r = len(Gs)
    B = len(Ms)
    if r == 0:
        return _lmax(Ms), np.zeros((B, 0))
    ev = np.linalg.eigvalsh(Ms)
    spread = np.maximum(ev[:, -1] - ev[:, 0], 1e-8 * (1.0 + np.abs(ev).max(axis=1)))
    y = np.zeros((B, r))
    # step cap per element: the Hessian is nearly singular wherever the smoothed
    # weights sit on a single eigenvalue, so raw Newton steps can be huge
    radius = spread.copy()
    rel = t_start
    eye = np.eye(r)
    while True:
        t = rel * spread
        active = np.ones(B, dtype=bool)
        for _ in range(newton_iters):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            f, g, H = _smoothed(Ms[idx], Gs, S[idx], y[idx], t[idx])
            reg = 1e-12 * np.abs(np.trace(H, axis1=1, axis2=2)) + 1e-10 / t[idx]
            step = -np.linalg.solve(H + reg[:, None, None] * eye, g[..., None])[..., 0]
            slope = np.einsum("ba,ba->b", g, step)
            bad = ~(slope < 0)
            step[bad] = -g[bad]
            slope[bad] = -np.einsum("ba,ba->b", g[bad], g[bad])
            # suboptimality is about half the Newton decrement, far below the smoothing error t log n
            done = -slope <= np.maximum(1e-6 * t[idx], 1e-13 * (np.abs(f) + spread[idx]))
            norm = np.linalg.norm(step, axis=1)
            capped = norm > radius[idx]
            shrink = np.where(capped, radius[idx] / np.where(norm > 0, norm, 1.0), 1.0)
            step *= shrink[:, None]
            slope *= shrink
            alpha = np.ones(idx.size)
            todo = ~done
            for _ in range(30):
                if not todo.any():
                    break
                j = idx[todo]
                f_new = _smoothed_value(Ms[j], Gs, S[j], y[j] + alpha[todo, None] * step[todo], t[j])
                ok = f_new <= f[todo] + 0.25 * alpha[todo] * slope[todo] + 4 * np.finfo(float).eps * np.abs(f[todo])
                upd = np.nonzero(todo)[0][ok]
                y[idx[upd]] += alpha[upd, None] * step[upd]
                todo[upd] = False
                alpha[todo] *= 0.5
            moved = ~done & ~todo
            grow = moved & capped & (alpha == 1.0)
            radius[idx[grow]] *= 4.0
            cut = moved & (alpha < 1.0)
            radius[idx[cut]] = alpha[cut] * norm[cut] * shrink[cut]
            # a failed line search means rounding dominates: treat as converged
            done |= todo
            active[idx[done]] = False
        if rel <= t_final * (1 + 1e-9):
            break
        rel = max(rel * 0.01, t_final)
    values = _lmax(Ms - np.einsum("ba,aij->bij", y, Gs)) + np.einsum("ba,ba->b", y, S)
    return values, y


def dual_fixed_mean_value(A, M, mu: complex, tol: float = 1e-10) -> float:
    """Upper bound on max{Tr(D M) : D >= 0, Tr D = 1, Tr(D A) = mu} by eigenvalue duality.

    Returns -inf when mu is not the mean of any state (outside the numerical range).
    """
    A = as_matrix(A)
    M = as_matrix(M)
    if np.linalg.norm(M - adjoint(M)) > 1e-10 * (1.0 + np.linalg.norm(M)):
        raise NotHermitianError("M must be Hermitian")
    cons = MeanConstraints(A)
    s = cons.to_s(complex(mu))
    if not cons.contains(s, 1e-9 * (1.0 + cons.scale)):
        return -np.inf
    vals, _ = dual_bound_batch(herm(M)[None], cons.G, s[None], t_final=tol)
    return float(vals[0])


def _objective_matrices(A, mus, k, mode, thetas):
    """Hermitian objectives for every (mu, theta) pair, flattened mu-major."""
    n = A.shape[0]
    eye = np.eye(n)
    out = []
    for mu in mus:
        B = A - mu * eye
        if mode is Mode.STRONG:
            e, U = np.linalg.eigh(adjoint(B) @ B)
            out.append(((U * np.clip(e, 0, None) ** (k / 2.0)) @ adjoint(U))[None])
        else:
            N = np.linalg.matrix_power(B, k)
            out.append(herm(np.exp(1j * np.asarray(thetas))[:, None, None] * N[None]))
    return np.concatenate(out)


def moment_upper(A, k: int, mode="Weak", lower: MomentResult | None = None, mu_grid: int = MU_GRID,
                 n_phases: int = N_PHASES, seeds: int = 3, tol: float = 1e-10) -> tuple[float, dict]:
    """Dual upper estimate: sup over a mean grid (and phases) of the fixed-mean dual, refined locally.

    The grid search is not a certificate for the sup over all means; it is an
    estimate that brackets the primal value from above at every point it visits.
    """
    A = as_matrix(A)
    k = check_k(k)
    mode = as_mode(mode)
    cons = MeanConstraints(A)
    if cons.r == 0 or (mode is Mode.WEAK and k == 1):
        return 0.0, {"grid_points": 0}
    thetas = [0.0] if mode is Mode.STRONG else 2 * np.pi * np.arange(n_phases) / n_phases

    # mean grid over the numerical-range box, restricted to the range itself
    if cons.r == 2:
        re = np.linalg.eigvalsh(herm(A))
        im = np.linalg.eigvalsh((A - adjoint(A)) / 2j)
        cand = [complex(a, b) for a in np.linspace(re[0], re[-1], mu_grid) for b in np.linspace(im[0], im[-1], mu_grid)]
    else:
        lo, hi = cons.interval
        cand = [cons.to_mu([s]) for s in np.linspace(lo, hi, 4 * mu_grid + 1)]
    svals, mus = [], []
    for mu in cand:
        s = cons.to_s(mu)
        if s is not None and cons.contains(s, 1e-12 * (1 + cons.scale)):
            svals.append(s)
            mus.append(mu)
    svals = np.array(svals).reshape(len(mus), cons.r)
    T = len(thetas)
    coarse = np.full(len(mus) * T, -np.inf)
    chunk = max(1, 4096 // T)
    for i in range(0, len(mus), chunk):
        Ms = _objective_matrices(A, mus[i:i + chunk], k, mode, thetas)
        S = np.repeat(svals[i:i + chunk], T, axis=0)
        coarse[i * T:i * T + len(Ms)], _ = dual_bound_batch(Ms, cons.G, S, t_final=1e-4)

    starts = []
    for j in np.argsort(-coarse, kind="stable")[:seeds]:
        starts.append((svals[j // T], thetas[j % T]))
    if lower is not None:
        s0 = cons.to_s(lower.mean)
        if s0 is not None:
            F = weak_moment_fixed_state(A, lower.witness, k) if mode is Mode.WEAK else 1.0
            starts.append((s0, -np.angle(F) if mode is Mode.WEAK else 0.0))

    cell = max(np.ptp(svals, axis=0).max() / (mu_grid - 1), 1e-8) if len(svals) > 1 else 1e-3
    best, best_at = -np.inf, None

    def evaluate(points, t_final):
        """points: (P, r + 1) rows of (s, theta)."""
        ok = np.array([cons.contains(p[:-1], 1e-12 * (1 + cons.scale)) for p in points])
        vals = np.full(len(points), -np.inf)
        if ok.any():
            pts = points[ok]
            Ms = np.concatenate([_objective_matrices(A, [cons.to_mu(p[:-1])], k, mode, [p[-1]]) for p in pts])
            vals[ok], _ = dual_bound_batch(Ms, cons.G, pts[:, :-1], t_final=t_final)
        return vals

    dim = cons.r + (0 if mode is Mode.STRONG else 1)
    for s0, th0 in starts:
        x = np.append(s0, th0)
        fx = evaluate(x[None], 1e-8)[0]
        # the start itself is always kept, even if it sits on the range boundary
        if not np.isfinite(fx):
            Ms = _objective_matrices(A, [cons.to_mu(s0)], k, mode, [th0])
            fx = dual_bound_batch(Ms, cons.G, s0[None], t_final=1e-8)[0][0]
        step = cell
        scales = np.ones(cons.r + 1)
        scales[-1] = (2 * np.pi / max(len(thetas), 1)) / cell
        dirs = np.vstack([np.eye(cons.r + 1), -np.eye(cons.r + 1)])[:, :] * scales
        if dim == cons.r:
            dirs = dirs[np.abs(dirs[:, -1]) == 0]
        while step > tol * (1 + cons.scale):
            trial = x[None] + step * dirs
            vals = evaluate(trial, 1e-8)
            i = int(np.argmax(vals))
            if vals[i] > fx:
                x, fx = trial[i], vals[i]
                step *= 2.0
            else:
                step *= 0.5
            if step < 1e-6 * cell:
                break
        Ms = _objective_matrices(A, [cons.to_mu(x[:-1])], k, mode, [x[-1]])
        fx = dual_bound_batch(Ms, cons.G, x[None, :-1], t_final=tol)[0][0]
        if fx > best:
            best, best_at = fx, x
    info = {
        "grid_points": len(mus),
        "phases": T,
        "best_mean": cons.to_mu(best_at[:-1]),
        "best_phase": float(best_at[-1]),
    }
    return max(best, 0.0) ** (1.0 / k), info


def moment_matrix(A, k: int, mode="Weak", budget: int = DEFAULT_RESTARTS, tol: float = 1e-10,
                  seed: int = DEFAULT_SEED, **upper_kw):
    """(lower MomentResult, upper estimate) for the strong or weak moment of A."""
    lower = moment_lower(A, k, mode, budget, seed)
    upper, info = moment_upper(A, k, mode, lower, tol=tol, **upper_kw)
    lower.info["upper"] = info
    return lower, max(upper, lower.value)


def weak_moment_matrix(A, k: int, budget: int = DEFAULT_RESTARTS, tol: float = 1e-10, seed: int = DEFAULT_SEED, **kw):
    return moment_matrix(A, k, Mode.WEAK, budget, tol, seed, **kw)


def strong_moment_matrix(A, k: int, budget: int = DEFAULT_RESTARTS, tol: float = 1e-10, seed: int = DEFAULT_SEED, **kw):
    return moment_matrix(A, k, Mode.STRONG, budget, tol, seed, **kw)
