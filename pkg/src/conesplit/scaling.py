"""Data equilibration, solution un-scaling, and original-problem residuals.

The solver works on rescaled data A_hat = D A E, b_hat = sigma D b,
c_hat = rho E c with positive diagonal D, E and positive scalars sigma, rho.
D is constant inside every second-order and PSD block so the scaled cone is
the original cone.  Residuals and stopping tests are always evaluated in
original-problem units, expressed directly in terms of the scaled iterates.
"""

from dataclasses import dataclass

import numpy as np

from .problem import ProblemData
from .sparse_linalg import SparseMatrix, spmv, spmv_t


@dataclass
class ScalingData:
    """Diagonal scalings and the scalars needed to undo them."""

    D: np.ndarray
    E: np.ndarray
    sigma: float
    rho: float

    def __post_init__(self):
        self.D = np.ascontiguousarray(self.D, dtype=np.float64)
        self.E = np.ascontiguousarray(self.E, dtype=np.float64)
        for name, arr in (("D", self.D), ("E", self.E)):
            if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0)):
                raise ValueError(f"{name} entries must be finite and positive")
        if not (self.sigma > 0 and self.rho > 0):
            raise ValueError("sigma and rho must be positive")


@dataclass
class Residuals:
    """Residual norms and stopping scales in original-problem units.

    pri_norm/dual_norm/gap are compared against eps * pri_thresh etc.;
    the thresholds carry the (1 + norm) factors without the eps.  The
    certificate measures are already normalized so they compare against a
    bare eps, and are +inf when the corresponding sign condition fails.
    Optimality fields are +inf when the iterate has tau = 0.
    """

    pri_norm: float
    dual_norm: float
    gap: float
    pri_thresh: float
    dual_thresh: float
    gap_thresh: float
    unbdd_measure: float
    infeas_measure: float


def identity_scaling(m, n):
    return ScalingData(np.ones(m), np.ones(n), 1.0, 1.0)


def _row_block_ids(spec):
    """Per-row block id; zero/nonneg rows count as singleton blocks."""
    sizes = []
    for kind, _off, length, _side in spec.blocks():
        if kind in ("zero", "nonneg"):
            sizes.extend([1] * length)
        else:
            sizes.append(length)
    sizes = np.asarray(sizes, dtype=np.int64)
    return np.repeat(np.arange(sizes.size), sizes), sizes


def _block_mean_row_norms(row_norm, block_of_row, block_sizes):
    sums = np.bincount(block_of_row, weights=row_norm, minlength=block_sizes.size)
    return sums / block_sizes


def equilibrate(data, sweeps=10):
    """Rescale the data so row and column norms approach one.

    Alternating sweeps divide each column by the square root of its Euclidean
    norm, then divide each cone block's rows by the square root of the mean
    row norm inside the block (so D stays constant per block).  The scalars
    sigma and rho then match ||sigma D b|| to the mean column norm and
    ||rho E c|| to the mean block row norm.  Zero rows, columns, and vectors
    keep scale one.
    """
    A = data.A
    m, n = A.nrows, A.ncols
    D = np.ones(m)
    E = np.ones(n)
    vals = A.vals.copy()
    block_of_row, block_sizes = _row_block_ids(data.spec)

    def col_norms(v):
        return np.sqrt(np.bincount(A.colidx, weights=v * v, minlength=n))

    def row_norms(v):
        return np.sqrt(np.bincount(A.rowidx, weights=v * v, minlength=m))

    for _ in range(int(sweeps)):
        cn = col_norms(vals)
        cscale = np.where(cn > 0, 1.0 / np.sqrt(np.where(cn > 0, cn, 1.0)), 1.0)
        vals *= cscale[A.colidx]
        E *= cscale

        rn = row_norms(vals)
        means = _block_mean_row_norms(rn, block_of_row, block_sizes)
        target = means[block_of_row]
        rscale = np.where(target > 0, 1.0 / np.sqrt(np.where(target > 0, target, 1.0)), 1.0)
        vals *= rscale[A.rowidx]
        D *= rscale

    cn = col_norms(vals)
    mean_col = cn[cn > 0].mean() if np.any(cn > 0) else 1.0
    rn = row_norms(vals)
    means = _block_mean_row_norms(rn, block_of_row, block_sizes)
    mean_row = means[means > 0].mean() if np.any(means > 0) else 1.0

    Db_norm = np.linalg.norm(D * data.b)
    Ec_norm = np.linalg.norm(E * data.c)
    sigma = mean_col / Db_norm if Db_norm > 0 else 1.0
    rho = mean_row / Ec_norm if Ec_norm > 0 else 1.0

    scal = ScalingData(D, E, sigma, rho)
    A_hat = SparseMatrix(m, n, A.colptr.copy(), A.rowidx.copy(), vals)
    scaled = ProblemData(A_hat, sigma * D * data.b, rho * E * data.c, data.spec)
    return scaled, scal


def scale_solution(x, s, y, scal):
    """Map an original-units point onto the scaled problem's variables."""
    x_hat = scal.sigma * np.asarray(x, dtype=float) / scal.E
    s_hat = scal.sigma * scal.D * np.asarray(s, dtype=float)
    y_hat = scal.rho * np.asarray(y, dtype=float) / scal.D
    return x_hat, s_hat, y_hat


def unscale_solution(x_hat, s_hat, y_hat, scal):
    """Recover the original-problem point from a scaled-problem solution."""
    x = scal.E * np.asarray(x_hat, dtype=float) / scal.sigma
    s = np.asarray(s_hat, dtype=float) / (scal.D * scal.sigma)
    y = scal.D * np.asarray(y_hat, dtype=float) / scal.rho
    return x, s, y


def residuals_original(u, v, scal, scaled_data):
    """Residuals of the original problem evaluated from scaled iterates.

    u = (u_x, u_y, u_tau) and v = (v_r, v_s, v_kappa) are iterates of the
    embedding on the scaled problem.  The candidate solution divides by
    u_tau; when u_tau == 0 the optimality fields are set to +inf and only
    the certificate measures are meaningful.
    """
    data = scaled_data
    n, m = data.n, data.m
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    ux, uy, ut = u[:n], u[n : n + m], u[-1]
    vs = v[n : n + m]

    Dinv = 1.0 / scal.D
    Einv = 1.0 / scal.E
    A_ux = spmv(data.A, ux)
    At_uy = spmv_t(data.A, uy)

    b_norm = np.linalg.norm(Dinv * data.b) / scal.sigma
    c_norm = np.linalg.norm(Einv * data.c) / scal.rho

    # Certificate measures: homogeneous in u, so no division by tau.
    ct_ux = data.c @ ux
    bt_uy = data.b @ uy
    c_ref = np.linalg.norm(Einv * data.c)
    b_ref = np.linalg.norm(Dinv * data.b)
    c_ref = c_ref if c_ref > 0 else 1.0
    b_ref = b_ref if b_ref > 0 else 1.0
    if ct_ux < 0:
        unbdd = np.linalg.norm(Dinv * (A_ux + vs)) * c_ref / (-ct_ux)
    else:
        unbdd = np.inf
    if bt_uy < 0:
        infeas = np.linalg.norm(Einv * At_uy) * b_ref / (-bt_uy)
    else:
        infeas = np.inf

    if ut > 0:
        pri = np.linalg.norm(Dinv * ((A_ux + vs) / ut - data.b)) / scal.sigma
        dual = np.linalg.norm(Einv * (At_uy / ut + data.c)) / scal.rho
        ct_x = ct_ux / ut / (scal.rho * scal.sigma)
        bt_y = bt_uy / ut / (scal.rho * scal.sigma)
        gap = ct_x + bt_y
        gap_thresh = 1.0 + abs(ct_x) + abs(bt_y)
    else:
        pri = dual = gap = np.inf
        gap_thresh = 1.0

    return Residuals(
        pri_norm=pri,
        dual_norm=dual,
        gap=gap,
        pri_thresh=1.0 + b_norm,
        dual_thresh=1.0 + c_norm,
        gap_thresh=gap_thresh,
        unbdd_measure=unbdd,
        infeas_measure=infeas,
    )
