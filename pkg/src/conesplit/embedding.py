"""The linear-algebra side of the self-dual embedding iteration.

The embedding couples the problem data into the skew matrix

    Q = [[0, A^T, c], [-A, 0, b], [-c^T, -b^T, 0]],

which is never materialized.  Each iteration needs the affine projection
u = (I + Q)^{-1} w; a Schur-complement reduction turns that into one solve
with M = [[I, A^T], [-A, I]] plus a rank-one correction using the cached
vector g = M^{-1} h, h = (c, b).  M solves go through either a cached LDL^T
factorization of the symmetric form [[I, A^T], [A, -I]] (direct mode) or a
warm-started conjugate gradient on I + A^T A (indirect mode).
"""

from dataclasses import dataclass, field

import numpy as np

from .sparse_linalg import build_kkt, cg_solve, ldl_factor, ldl_solve, spmv, spmv_t


class SetupError(RuntimeError):
    """Raised when the linear-system cache cannot be constructed."""


@dataclass
class EmbeddingCache:
    """Cached linear-system artifacts for one problem's solves.

    Mutable (CG warm start, tolerance schedule counter), so an instance must
    not be shared between concurrently running solves.
    """

    mode: str
    h: np.ndarray
    g: np.ndarray
    denom: float
    factor: object = None
    cg_warm: np.ndarray = None
    cg_max: int = 2
    cg_tol: float = None  # fixed override; None selects the decaying schedule
    iter_count: int = 0
    cg_iters_total: int = 0

    def reset_schedule(self):
        self.iter_count = 0
        if self.cg_warm is not None:
            self.cg_warm[:] = 0.0


def apply_q(data, u):
    """Apply the skew embedding matrix Q to a vector of length n + m + 1."""
    n, m = data.n, data.m
    u = np.asarray(u, dtype=float)
    if u.shape != (n + m + 1,):
        raise ValueError(f"apply_q: expected length {n + m + 1}, got {u.shape}")
    ux, uy, ut = u[:n], u[n : n + m], u[-1]
    out = np.empty_like(u)
    out[:n] = spmv_t(data.A, uy) + data.c * ut
    out[n : n + m] = -spmv(data.A, ux) + data.b * ut
    out[-1] = -(data.c @ ux) - (data.b @ uy)
    return out


def q_matrix(data):
    """Dense Q, for small-problem reference computations and tests."""
    n, m = data.n, data.m
    Ad = data.A.to_dense()
    Q = np.zeros((n + m + 1, n + m + 1))
    Q[:n, n : n + m] = Ad.T
    Q[:n, -1] = data.c
    Q[n : n + m, :n] = -Ad
    Q[n : n + m, -1] = data.b
    Q[-1, :n] = -data.c
    Q[-1, n : n + m] = -data.b
    return Q


def _apply_m(data, z):
    """Apply M = [[I, A^T], [-A, I]]."""
    n = data.n
    zx, zy = z[:n], z[n:]
    return np.concatenate([zx + spmv_t(data.A, zy), -spmv(data.A, zx) + zy])


def solve_kkt(cache, data, w_xy, tol=None, max_iter=None):
    """Solve M z = w_xy with M = [[I, A^T], [-A, I]].

    Direct mode solves the symmetric system [[I, A^T], [A, -I]] zeta =
    (w_x, -w_y), whose solution equals z.  Indirect mode eliminates z_y and
    runs CG on (I + A^T A) z_x = w_x - A^T w_y, warm-started from the
    previous call's solution.
    """
    n, m = data.n, data.m
    w_xy = np.asarray(w_xy, dtype=float)
    if w_xy.shape != (n + m,):
        raise ValueError(f"solve_kkt: expected length {n + m}, got {w_xy.shape}")
    if cache.mode == "direct":
        rhs = np.concatenate([w_xy[:n], -w_xy[n:]])
        return ldl_solve(cache.factor, rhs)
    if tol is None:
        tol = 1e-9 * (1.0 + np.linalg.norm(w_xy))
    if max_iter is None:
        max_iter = 10 * n + 100

    def gram(v):
        return v + spmv_t(data.A, spmv(data.A, v))

    cg_rhs = w_xy[:n] - spmv_t(data.A, w_xy[n:])
    zx, iters, _ = cg_solve(gram, cg_rhs, cache.cg_warm, tol, max_iter)
    cache.cg_warm = zx.copy()
    cache.cg_iters_total += iters
    zy = w_xy[n:] + spmv(data.A, zx)
    return np.concatenate([zx, zy])


def setup_cache(data, mode="direct", cg_max=2, cg_tol=None):
    """Build the per-problem cache: factorization (direct) and g = M^{-1} h.

    g is always computed to a tight tolerance because it is reused by every
    iteration.
    """
    if mode not in ("direct", "indirect"):
        raise ValueError(f"unknown linear-system mode {mode!r}")
    n, m = data.n, data.m
    h = np.concatenate([data.c, data.b])
    cache = EmbeddingCache(
        mode=mode,
        h=h,
        g=np.zeros(n + m),
        denom=1.0,
        cg_warm=np.zeros(n) if mode == "indirect" else None,
        cg_max=cg_max,
        cg_tol=cg_tol,
    )
    if mode == "direct":
        try:
            cache.factor = ldl_factor(build_kkt(data.A))
        except ValueError as exc:
            raise SetupError(str(exc)) from exc
    refresh_cache_vectors(cache, data)
    return cache


def refresh_cache_vectors(cache, data):
    """Recompute h, g, denom after b or c changed; the factorization is kept."""
    cache.h = np.concatenate([data.c, data.b])
    tight = 1e-9 * (1.0 + np.linalg.norm(cache.h))
    if cache.mode == "indirect":
        saved = cache.cg_warm
        cache.cg_warm = np.zeros(data.n)
        cache.g = solve_kkt(cache, data, cache.h, tol=tight)
        cache.cg_warm = saved
    else:
        cache.g = solve_kkt(cache, data, cache.h)
        resid = np.linalg.norm(_apply_m(data, cache.g) - cache.h)
        if resid > 1e-8 * (1.0 + np.linalg.norm(cache.h)):
            raise SetupError(f"cached solve of M g = h has residual {resid:.3e}")
    cache.denom = 1.0 + cache.h @ cache.g
    if cache.denom < 1.0 - 1e-9:
        raise SetupError(f"Schur denominator {cache.denom} below 1")
    return cache


def project_affine(cache, data, w, advance_schedule=False):
    """Affine-subspace step: solve (I + Q) u = w via the cached reduction.

    With advance_schedule=True (used once per solver iteration in indirect
    mode) the CG tolerance follows the summable schedule
    tol_0 / k^1.5 with tol_0 = 1e-3 (1 + ||rhs||), capped at cache.cg_max
    iterations; a fixed cache.cg_tol overrides the schedule.
    """
    n, m = data.n, data.m
    w = np.asarray(w, dtype=float)
    if w.shape != (n + m + 1,):
        raise ValueError(f"project_affine: expected length {n + m + 1}, got {w.shape}")
    rhs = w[:-1] - w[-1] * cache.h
    if cache.mode == "indirect":
        if advance_schedule:
            cache.iter_count += 1
            k = max(cache.iter_count, 1)
            if cache.cg_tol is not None:
                tol = cache.cg_tol
            else:
                tol = 1e-3 * (1.0 + np.linalg.norm(rhs)) / k**1.5
            p = solve_kkt(cache, data, rhs, tol=tol, max_iter=cache.cg_max)
        else:
            tol = cache.cg_tol if cache.cg_tol is not None else None
            p = solve_kkt(cache, data, rhs, tol=tol)
    else:
        p = solve_kkt(cache, data, rhs)
    correction = (cache.h @ p) / cache.denom
    u_xy = p - correction * cache.g
    out = np.empty(n + m + 1)
    out[:-1] = u_xy
    out[-1] = w[-1] + data.c @ u_xy[:n] + data.b @ u_xy[n:]
    return out
