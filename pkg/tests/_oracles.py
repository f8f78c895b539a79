"""Independent reference computations used as test oracles.

Nothing here calls into the solver's own linear algebra or projection code;
expected values asserted in the tests come from these routines (or were
frozen from them).
"""

import numpy as np


def soc_projection_oracle(x):
    """Projection onto {(t, z) : ||z|| <= t} by bisection over the apex height.

    For a fixed height t >= 0 the nearest cone point to (x0, z) is
    (t, z * min(1, t / ||z||)); the squared distance is convex in t, so its
    derivative has a sign change we can bisect on.
    """
    x = np.asarray(x, dtype=float)
    x0, z = x[0], x[1:]
    nz = np.linalg.norm(z)

    def ddist(t):  # d/dt of (t - x0)^2 + max(0, ||z|| - t)^2
        return 2.0 * (t - x0) - 2.0 * max(0.0, nz - t)

    lo, hi = 0.0, max(abs(x0), nz) + 1.0
    if ddist(lo) >= 0:
        t_best = 0.0
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if ddist(mid) < 0:
                lo = mid
            else:
                hi = mid
        t_best = 0.5 * (lo + hi)
    out = np.empty_like(x)
    out[0] = t_best
    out[1:] = z * min(1.0, t_best / nz) if nz > 0 else 0.0
    return out


def dense_iq_solve(Q, w):
    """Solve (I + Q) u = w densely."""
    return np.linalg.solve(np.eye(Q.shape[0]) + Q, np.asarray(w, dtype=float))


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, v.size + 1) > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def lasso_prox_gradient(F, g, mu, rel_change=1e-10, max_iters=2_000_000):
    """Proximal gradient (ISTA) for (1/2)||Fz - g||^2 + mu ||z||_1.

    Runs until the relative objective change over a check window drops below
    rel_change.  Returns (z, objective).
    """
    F = np.asarray(F, dtype=float)
    g = np.asarray(g, dtype=float)
    step = 1.0 / np.linalg.norm(F, 2) ** 2

    def objective(z):
        return 0.5 * np.sum((F @ z - g) ** 2) + mu * np.sum(np.abs(z))

    z = np.zeros(F.shape[1])
    prev = objective(z)
    for it in range(max_iters):
        z = z - step * (F.T @ (F @ z - g))
        z = np.sign(z) * np.maximum(np.abs(z) - mu * step, 0.0)
        if it % 50 == 49:
            cur = objective(z)
            if abs(prev - cur) <= rel_change * max(1.0, abs(cur)):
                return z, cur
            prev = cur
    raise RuntimeError("lasso oracle did not converge")


def portfolio_projected_gradient(mu_ret, F, d_idio, gamma, stat_tol=1e-12,
                                 max_iters=2_000_000):
    """Projected gradient for min gamma z' Sigma z - mu' z over the simplex.

    Sigma = F F^T + diag(d_idio).  Runs until the iterate movement under a
    fixed 1/L step falls below stat_tol.  Returns (z, objective).
    """
    Sigma = F @ F.T + np.diag(d_idio)
    step = 1.0 / (2.0 * gamma * np.linalg.eigvalsh(Sigma).max())
    p = mu_ret.size
    z = np.ones(p) / p
    for _ in range(max_iters):
        grad = 2.0 * gamma * (Sigma @ z) - mu_ret
        z_new = project_simplex(z - step * grad)
        if np.max(np.abs(z_new - z)) <= stat_tol:
            z = z_new
            break
        z = z_new
    else:
        raise RuntimeError("portfolio oracle did not converge")
    return z, gamma * z @ Sigma @ z - mu_ret @ z


def nuclear_norm_svd(B):
    """Nuclear norm via numpy's SVD (independent of the package eigensolver)."""
    return np.linalg.svd(np.asarray(B, dtype=float), compute_uv=False).sum()


def random_spec(rng):
    """A random mixed cone for property tests (numpy Generator in, spec dims out)."""
    zero = int(rng.integers(0, 3))
    nonneg = int(rng.integers(0, 4))
    socs = tuple(int(rng.integers(1, 5)) for _ in range(rng.integers(0, 3)))
    psds = tuple(int(rng.integers(1, 4)) for _ in range(rng.integers(0, 2)))
    return zero, nonneg, socs, psds
