"""Seeded generators for benchmark cone programs.

Each generator is a pure function of its dimensions and seed, producing a
standard-form problem  min c^T x  s.t.  Ax + s = b,  s in K.  Three families
model classic applications (sparse regression, long-only portfolio
selection, sparse-plus-low-rank matrix recovery); the LP families plant a
known optimum, a Farkas infeasibility certificate, or an unbounded ray, for
exercising status detection end to end.
"""

from dataclasses import dataclass, field

import numpy as np

from .cones import ConeSpec, packed_length
from .problem import ProblemData
from .rng import Xoshiro256StarStar
from .sparse_linalg import SparseMatrix, spmv, spmv_t

FAMILIES = (
    "lasso",
    "portfolio",
    "rpca",
    "lp_feasible",
    "lp_infeasible",
    "lp_unbounded",
)


@dataclass
class GeneratorParams:
    """Family name, family-specific dims, and the 64-bit seed."""

    family: str
    dims: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


def generate(params):
    """Dispatch a GeneratorParams to the matching generator."""
    d = params.dims
    if params.family == "lasso":
        return gen_lasso(d["p"], d["q"], params.seed)
    if params.family == "portfolio":
        return gen_portfolio(d["p"], d["q"], params.seed)
    if params.family == "rpca":
        return gen_rpca(d["p"], d["r"], params.seed)
    return gen_lp_family(params.family, d["n"], d["m"], params.seed)


def gen_lasso(p, q, seed, mu=None):
    """Sparse-regression SOCP: min (1/2)||Fz - g||^2 + mu ||z||_1.

    F is q x p standard normal; the planted coefficient vector has
    max(1, p // 10) nonzero entries; g = F z_hat + noise with noise variance
    0.1.  By default mu = 0.1 * ||F^T g||_inf, a tenth of the smallest value
    that zeroes the solution; pass mu to override.

    Standard form uses variables (z, t, w): t bounds |z| through 2p
    nonnegative rows and w bounds the squared fit error through one
    second-order block of dimension q + 2 encoding
    ||(1 - w, 2(Fz - g))|| <= 1 + w.
    """
    if p < 1 or q < 1:
        raise ValueError("lasso needs p >= 1 and q >= 1")
    rng = Xoshiro256StarStar(seed)
    F = rng.normals(q * p).reshape(q, p)
    k = max(1, p // 10)
    support = rng.choice_without_replacement(p, k)
    z_hat = np.zeros(p)
    z_hat[support] = rng.normals(k)
    noise = rng.normals(q) * np.sqrt(0.1)
    g = F @ z_hat + noise
    if mu is None:
        mu = 0.1 * np.max(np.abs(F.T @ g))

    n = 2 * p + 1
    m = 2 * p + q + 2
    w_col = 2 * p
    rows, cols, vals = [], [], []
    b = np.zeros(m)

    idx = np.arange(p)
    # z - t <= 0 and -z - t <= 0
    rows.extend(idx)
    cols.extend(idx)
    vals.extend(np.ones(p))
    rows.extend(idx)
    cols.extend(p + idx)
    vals.extend(-np.ones(p))
    rows.extend(p + idx)
    cols.extend(idx)
    vals.extend(-np.ones(p))
    rows.extend(p + idx)
    cols.extend(p + idx)
    vals.extend(-np.ones(p))
    # second-order block: (1 + w, 1 - w, 2g - 2Fz)
    r0 = 2 * p
    rows.append(r0)
    cols.append(w_col)
    vals.append(-1.0)
    b[r0] = 1.0
    rows.append(r0 + 1)
    cols.append(w_col)
    vals.append(1.0)
    b[r0 + 1] = 1.0
    rr, cc = np.nonzero(F)
    rows.extend(r0 + 2 + rr)
    cols.extend(cc)
    vals.extend(2.0 * F[rr, cc])
    b[r0 + 2 :] = 2.0 * g

    c = np.concatenate([np.zeros(p), mu * np.ones(p), [0.5]])
    A = SparseMatrix.from_triplets(m, n, rows, cols, vals)
    spec = ConeSpec(nonneg_dim=2 * p, soc_dims=(q + 2,))
    return ProblemData(A, b, c, spec)


def gen_portfolio(p, q, seed, gamma=10.0):
    """Long-only portfolio SOCP with a factor risk model.

    Maximizes mu^T z - gamma z^T (F F^T + D) z over the simplex, written as
    min -mu^T z + gamma (t + s) with epigraph variables (t, s, u, v):
    one zero-cone budget row, p nonnegativity rows, and second-order blocks
    of dimensions p+1, q+1, 3, 3 bounding ||D^(1/2) z|| <= u,
    ||F^T z|| <= v, u^2 <= t, v^2 <= s.  Returns are lognormal, factor
    loadings standard normal, idiosyncratic variances uniform on [0, 2].
    """
    if not p > q >= 1:
        raise ValueError("portfolio needs p > q >= 1")
    rng = Xoshiro256StarStar(seed)
    mu_ret = np.exp(rng.normals(p))
    F = rng.normals(p * q).reshape(p, q)
    d_idio = 2.0 * rng.uniforms(p)

    n = p + 4
    t_col, s_col, u_col, v_col = p, p + 1, p + 2, p + 3
    m = 2 * p + q + 9
    rows, cols, vals = [], [], []
    b = np.zeros(m)

    idx = np.arange(p)
    # budget row (zero cone)
    rows.extend(np.zeros(p, dtype=int))
    cols.extend(idx)
    vals.extend(np.ones(p))
    b[0] = 1.0
    # z >= 0
    rows.extend(1 + idx)
    cols.extend(idx)
    vals.extend(-np.ones(p))
    # ||D^(1/2) z|| <= u
    r0 = 1 + p
    rows.append(r0)
    cols.append(u_col)
    vals.append(-1.0)
    rows.extend(r0 + 1 + idx)
    cols.extend(idx)
    vals.extend(-np.sqrt(d_idio))
    # ||F^T z|| <= v
    r1 = r0 + p + 1
    rows.append(r1)
    cols.append(v_col)
    vals.append(-1.0)
    rr, cc = np.nonzero(F.T)
    rows.extend(r1 + 1 + rr)
    cols.extend(cc)
    vals.extend(-F.T[rr, cc])
    # u^2 <= t as ||(1 - t, 2u)|| <= 1 + t
    r2 = r1 + q + 1
    rows.extend([r2, r2 + 1, r2 + 2])
    cols.extend([t_col, t_col, u_col])
    vals.extend([-1.0, 1.0, -2.0])
    b[r2] = 1.0
    b[r2 + 1] = 1.0
    # v^2 <= s
    r3 = r2 + 3
    rows.extend([r3, r3 + 1, r3 + 2])
    cols.extend([s_col, s_col, v_col])
    vals.extend([-1.0, 1.0, -2.0])
    b[r3] = 1.0
    b[r3 + 1] = 1.0

    c = np.zeros(n)
    c[:p] = -mu_ret
    c[t_col] = gamma
    c[s_col] = gamma
    A = SparseMatrix.from_triplets(m, n, rows, cols, vals)
    spec = ConeSpec(zero_dim=1, nonneg_dim=p, soc_dims=(p + 1, q + 1, 3, 3))
    return ProblemData(A, b, c, spec)


def gen_rpca(p, r, seed):
    """Sparse-plus-low-rank recovery SDP (square p x p measurements).

    min ||L||_* s.t. ||vec(S)||_1 <= mu, L + S = M, written with the
    nuclear-norm dilation: minimize (1/2)(tr W1 + tr W2) subject to
    [[W1, L], [L^T, W2]] >= 0.  M = L_hat + S_hat with L_hat of rank r and
    S_hat about 10% dense; mu equals ||vec(S_hat)||_1, so the planted pair
    is feasible and near-optimal.
    """
    if not p >= r >= 1:
        raise ValueError("rpca needs p >= r >= 1")
    rng = Xoshiro256StarStar(seed)
    left = rng.normals(p * r).reshape(p, r)
    right = rng.normals(p * r).reshape(p, r)
    L_hat = left @ right.T
    mask = rng.uniforms(p * p).reshape(p, p) < 0.1
    S_vals = rng.normals(p * p).reshape(p, p)
    S_hat = np.where(mask, S_vals, 0.0)
    M = L_hat + S_hat
    mu = np.sum(np.abs(S_hat))

    psq = p * p
    pl = packed_length(p)
    oL, oS, oW1, oW2, oT = 0, psq, 2 * psq, 2 * psq + pl, 2 * psq + 2 * pl
    n = 3 * psq + 2 * pl
    side = 2 * p
    m_rows = 3 * psq + 1 + packed_length(side)
    rows, cols, vals = [], [], []
    b = np.zeros(m_rows)

    def vec_idx(i, j):  # column-major
        return j * p + i

    def packed_idx(i, j, s):  # lower triangle, column-major, i >= j
        return j * s - j * (j - 1) // 2 + (i - j)

    k = np.arange(psq)
    jj, ii = np.divmod(k, p)
    # L + S = M (zero cone, one row per entry, column-major)
    rows.extend(k)
    cols.extend(oL + k)
    vals.extend(np.ones(psq))
    rows.extend(k)
    cols.extend(oS + k)
    vals.extend(np.ones(psq))
    b[:psq] = M[ii, jj]
    # vec(S) <= t and -vec(S) <= t
    rows.extend(psq + k)
    cols.extend(oS + k)
    vals.extend(np.ones(psq))
    rows.extend(psq + k)
    cols.extend(oT + k)
    vals.extend(-np.ones(psq))
    rows.extend(2 * psq + k)
    cols.extend(oS + k)
    vals.extend(-np.ones(psq))
    rows.extend(2 * psq + k)
    cols.extend(oT + k)
    vals.extend(-np.ones(psq))
    # 1^T t <= mu
    rows.extend(np.full(psq, 3 * psq))
    cols.extend(oT + k)
    vals.extend(np.ones(psq))
    b[3 * psq] = mu
    # PSD block: s = packed([[W1, L], [L^T, W2]])
    r0 = 3 * psq + 1
    sqrt2 = np.sqrt(2.0)
    for J in range(side):
        for I in range(J, side):
            row = r0 + packed_idx(I, J, side)
            if I < p and J < p:
                rows.append(row)
                cols.append(oW1 + packed_idx(I, J, p))
                vals.append(-1.0)
            elif I >= p and J < p:
                rows.append(row)
                cols.append(oL + vec_idx(J, I - p))
                vals.append(-sqrt2)
            else:
                rows.append(row)
                cols.append(oW2 + packed_idx(I - p, J - p, p))
                vals.append(-1.0)

    c = np.zeros(n)
    diag_w = np.array([packed_idx(j, j, p) for j in range(p)])
    c[oW1 + diag_w] = 0.5
    c[oW2 + diag_w] = 0.5
    A = SparseMatrix.from_triplets(m_rows, n, rows, cols, vals)
    spec = ConeSpec(zero_dim=psq, nonneg_dim=2 * psq + 1, psd_sides=(side,))
    return ProblemData(A, b, c, spec)


def _random_sparse_columns(rng, m, n):
    """Column-wise sparse triplets with normal values; small problems are denser."""
    per_col = min(m, max(2, round(0.3 * m))) if m <= 60 else 8
    rows, cols, vals = [], [], []
    for j in range(n):
        picked = rng.choice_without_replacement(m, per_col)
        for i in sorted(picked.tolist()):
            rows.append(i)
            cols.append(j)
            vals.append(rng.normal())
    return rows, cols, vals


def gen_lp_family(kind, n, m, seed):
    """Random LP over the nonnegative orthant with planted ground truth."""
    data, _witness = gen_lp_family_with_witness(kind, n, m, seed)
    return data


def gen_lp_family_with_witness(kind, n, m, seed):
    """As gen_lp_family, also returning the planted object.

    lp_feasible: witness is the optimal (x, y, s) triple (complementary by
    construction).  lp_infeasible: witness y0 >= 0 satisfies A^T y0 = 0 and
    b^T y0 = -1.  lp_unbounded: witness x0 satisfies -A x0 > 0 and
    c^T x0 = -1 (so it is an improving feasible ray).
    """
    if not m >= n >= 1:
        raise ValueError("lp families need m >= n >= 1")
    rng = Xoshiro256StarStar(seed)
    spec = ConeSpec(nonneg_dim=m)

    if kind == "lp_feasible":
        rows, cols, vals = _random_sparse_columns(rng, m, n)
        A = SparseMatrix.from_triplets(m, n, rows, cols, vals)
        x_star = rng.normals(n)
        n_tight = max(1, m // 2)
        tight = rng.choice_without_replacement(m, n_tight)
        y_star = np.zeros(m)
        y_star[tight] = 0.1 + rng.uniforms(n_tight)
        s_star = np.zeros(m)
        loose = np.setdiff1d(np.arange(m), tight)
        s_star[loose] = 0.1 + rng.uniforms(loose.size)
        b = spmv(A, x_star) + s_star
        c = -spmv_t(A, y_star)
        return ProblemData(A, b, c, spec), (x_star, y_star, s_star)

    if kind == "lp_infeasible":
        rows, cols, vals = _random_sparse_columns(rng, m, n)
        r1 = int(rng.integer(m))
        r2 = int(rng.integer(m - 1))
        if r2 >= r1:
            r2 += 1
        keep = [t for t in zip(rows, cols, vals) if t[0] != r2]
        mirrored = [(r2, c_, -v_) for (i_, c_, v_) in keep if i_ == r1]
        trip = keep + mirrored
        A = SparseMatrix.from_triplets(
            m, n, [t[0] for t in trip], [t[1] for t in trip], [t[2] for t in trip]
        )
        b = rng.normals(m)
        b[r2] = -1.0 - b[r1]
        y_feas = rng.uniforms(m)  # keeps the dual feasible: c = -A^T y_feas
        c = -spmv_t(A, y_feas)
        y0 = np.zeros(m)
        y0[r1] = 1.0
        y0[r2] = 1.0
        return ProblemData(A, b, c, spec), y0

    if kind == "lp_unbounded":
        rows, cols, vals = _random_sparse_columns(rng, m, n)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        present = np.zeros(m, dtype=bool)
        present[rows] = True
        for i in np.flatnonzero(~present):
            rows = np.append(rows, i)
            cols = np.append(cols, rng.integer(n))
            vals = np.append(vals, rng.normal())
        x0 = 0.5 + rng.uniforms(n)
        slack = 0.1 + rng.uniforms(m)
        # force A x0 = -slack by adjusting one entry per row
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        reach = np.bincount(rows, weights=vals * x0[cols], minlength=m)
        first = np.searchsorted(rows, np.arange(m))
        vals[first] -= (reach + slack) / x0[cols[first]]
        A = SparseMatrix.from_triplets(m, n, rows, cols, vals)
        c = rng.normals(n)
        j_fix = int(rng.integer(n))
        c[j_fix] -= (c @ x0 + 1.0) / x0[j_fix]
        b = rng.uniforms(m)  # x = 0 is feasible, so the problem is unbounded
        return ProblemData(A, b, c, spec), x0

    raise ValueError(f"unknown LP family kind {kind!r}")
