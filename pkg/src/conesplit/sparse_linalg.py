"""Compressed sparse column matrices, the quasi-definite KKT factorization,
and a warm-startable conjugate gradient solver.

Everything here is deterministic: matrix-vector products accumulate in fixed
index order and the factorization pivots in the (permuted) natural order,
which is safe because the KKT matrix [[I, A^T], [A, -I]] is quasi-definite.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import ldl_numeric, ldl_solve_inplace, ldl_symbolic


@dataclass
class SparseMatrix:
    """CSC sparse matrix with int64 indices and float64 values."""

    nrows: int
    ncols: int
    colptr: np.ndarray
    rowidx: np.ndarray
    vals: np.ndarray
    # Expanded column index per stored entry, built on demand.
    _colidx: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.colptr = np.ascontiguousarray(self.colptr, dtype=np.int64)
        self.rowidx = np.ascontiguousarray(self.rowidx, dtype=np.int64)
        self.vals = np.ascontiguousarray(self.vals, dtype=np.float64)
        self.validate()

    def validate(self):
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if self.colptr.shape != (self.ncols + 1,):
            raise ValueError("colptr must have length ncols + 1")
        if self.colptr[0] != 0 or self.colptr[-1] != self.rowidx.size:
            raise ValueError("colptr must start at 0 and end at nnz")
        if np.any(np.diff(self.colptr) < 0):
            raise ValueError("colptr must be nondecreasing")
        if self.rowidx.size != self.vals.size:
            raise ValueError("rowidx and vals must have equal length")
        if self.rowidx.size:
            if self.rowidx.min() < 0 or self.rowidx.max() >= self.nrows:
                raise ValueError("row indices out of range")
            # Strictly increasing within each column; column starts may drop.
            interior = np.ones(self.rowidx.size, dtype=bool)
            interior[self.colptr[:-1].clip(max=self.rowidx.size - 1)] = False
            if np.any(np.diff(self.rowidx)[interior[1:]] <= 0):
                raise ValueError("row indices must be strictly increasing per column")
        if not np.all(np.isfinite(self.vals)):
            raise ValueError("matrix values must be finite")

    @property
    def nnz(self):
        return self.vals.size

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def colidx(self):
        if self._colidx is None:
            self._colidx = np.repeat(
                np.arange(self.ncols, dtype=np.int64), np.diff(self.colptr)
            )
        return self._colidx

    @classmethod
    def from_triplets(cls, nrows, ncols, rows, cols, vals):
        """Build from COO triplets; duplicate entries are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.size == cols.size == vals.size):
            raise ValueError("triplet arrays must have equal length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= nrows:
                raise ValueError("triplet row index out of range")
            if cols.min() < 0 or cols.max() >= ncols:
                raise ValueError("triplet column index out of range")
        order = np.lexsort((rows, cols))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            new_group = np.empty(rows.size, dtype=bool)
            new_group[0] = True
            new_group[1:] = (np.diff(cols) != 0) | (np.diff(rows) != 0)
            starts = np.flatnonzero(new_group)
            vals = np.add.reduceat(vals, starts)
            rows = rows[starts]
            cols = cols[starts]
        colptr = np.zeros(ncols + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=ncols), out=colptr[1:])
        return cls(nrows, ncols, colptr, rows, vals)

    @classmethod
    def from_dense(cls, mat):
        mat = np.asarray(mat, dtype=float)
        rows, cols = np.nonzero(mat.T)  # transpose so entries come column-major
        return cls.from_triplets(mat.shape[0], mat.shape[1], cols, rows, mat.T[rows, cols])

    @classmethod
    def identity(cls, n, scale=1.0):
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), idx, np.full(n, float(scale)))

    def to_dense(self):
        out = np.zeros(self.shape)
        out[self.rowidx, self.colidx] = self.vals
        return out

    def transpose(self):
        return SparseMatrix.from_triplets(
            self.ncols, self.nrows, self.colidx, self.rowidx, self.vals
        )


def spmv(A, x):
    """A @ x with deterministic sequential accumulation."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.ncols,):
        raise ValueError(f"spmv: x has shape {x.shape}, expected ({A.ncols},)")
    if A.nnz == 0:
        return np.zeros(A.nrows)
    return np.bincount(A.rowidx, weights=A.vals * x[A.colidx], minlength=A.nrows)


def spmv_t(A, y):
    """A.T @ y with deterministic sequential accumulation."""
    y = np.asarray(y, dtype=float)
    if y.shape != (A.nrows,):
        raise ValueError(f"spmv_t: y has shape {y.shape}, expected ({A.nrows},)")
    if A.nnz == 0:
        return np.zeros(A.ncols)
    return np.bincount(A.colidx, weights=A.vals * y[A.rowidx], minlength=A.ncols)


def build_kkt(A):
    """Assemble the symmetric quasi-definite matrix [[I, A^T], [A, -I]]."""
    m, n = A.nrows, A.ncols
    rows = np.concatenate(
        [
            np.arange(n, dtype=np.int64),          # upper-left identity
            A.rowidx + n,                          # A block under the identity
            A.colidx,                              # A^T block
            np.arange(n, n + m, dtype=np.int64),   # lower-right -identity
        ]
    )
    cols = np.concatenate(
        [
            np.arange(n, dtype=np.int64),
            A.colidx,
            A.rowidx + n,
            np.arange(n, n + m, dtype=np.int64),
        ]
    )
    vals = np.concatenate([np.ones(n), A.vals, A.vals, -np.ones(m)])
    return SparseMatrix.from_triplets(n + m, n + m, rows, cols, vals)


@dataclass
class LdlFactorization:
    """Permuted LDL^T factors: P M P^T = L diag(Ddiag) L^T."""

    permutation: np.ndarray
    L: SparseMatrix  # unit lower triangular, explicit unit diagonal
    Ddiag: np.ndarray
    # Strictly-lower CSC arrays used by the solve kernel.
    _Lp: np.ndarray = field(default=None, repr=False)
    _Li: np.ndarray = field(default=None, repr=False)
    _Lx: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.permutation = np.asarray(self.permutation, dtype=np.int64)
        self.Ddiag = np.asarray(self.Ddiag, dtype=np.float64)
        if np.any(self.Ddiag == 0.0):
            raise ValueError("LDL factorization has a zero pivot")
        if self._Lp is None:
            strict = self.L.rowidx != self.L.colidx
            keep = np.flatnonzero(strict)
            counts = np.bincount(self.L.colidx[keep], minlength=self.L.ncols)
            self._Lp = np.zeros(self.L.ncols + 1, dtype=np.int64)
            np.cumsum(counts, out=self._Lp[1:])
            self._Li = self.L.rowidx[keep]
            self._Lx = self.L.vals[keep]


def _upper_triangle_permuted(M, perm):
    """Upper triangle (CSC) of P M P^T for a symmetric M."""
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=np.int64)
    rows = inv[M.rowidx]
    cols = inv[M.colidx]
    keep = rows <= cols
    return SparseMatrix.from_triplets(
        M.nrows, M.ncols, rows[keep], cols[keep], M.vals[keep]
    )


def ldl_factor(M, ordering="natural"):
    """Permuted LDL^T factorization of a symmetric quasi-definite matrix.

    ordering may be "natural" or an explicit permutation vector.  Any
    symmetric permutation is admissible for quasi-definite input, so the
    choice only affects fill-in, not correctness.
    """
    if M.nrows != M.ncols:
        raise ValueError("ldl_factor expects a square matrix")
    n = M.nrows
    if isinstance(ordering, str):
        if ordering != "natural":
            raise ValueError(f"unknown ordering {ordering!r}")
        perm = np.arange(n, dtype=np.int64)
    else:
        perm = np.asarray(ordering, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("ordering is not a permutation of 0..n-1")
    upper = _upper_triangle_permuted(M, perm)
    parent, lnz = ldl_symbolic(n, upper.colptr, upper.rowidx)
    Lp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lnz, out=Lp[1:])
    Li, Lx, D, k_fail = ldl_numeric(n, upper.colptr, upper.rowidx, upper.vals, Lp, parent)
    if k_fail < n:
        raise ValueError(
            f"zero pivot at column {k_fail}: matrix is not quasi-definite"
        )
    # Assemble L with its explicit unit diagonal for the public contract.
    full_rows = np.concatenate([Li, np.arange(n, dtype=np.int64)])
    full_cols = np.concatenate(
        [np.repeat(np.arange(n, dtype=np.int64), np.diff(Lp)), np.arange(n, dtype=np.int64)]
    )
    full_vals = np.concatenate([Lx, np.ones(n)])
    L = SparseMatrix.from_triplets(n, n, full_rows, full_cols, full_vals)
    return LdlFactorization(perm, L, D, _Lp=Lp, _Li=Li, _Lx=Lx)


def ldl_solve(F, w):
    """Solve M z = w given the factorization F of M."""
    w = np.asarray(w, dtype=float)
    n = F.Ddiag.size
    if w.shape != (n,):
        raise ValueError(f"ldl_solve: rhs has shape {w.shape}, expected ({n},)")
    x = w[F.permutation].copy()
    ldl_solve_inplace(F._Lp, F._Li, F._Lx, F.Ddiag, x)
    out = np.empty_like(x)
    out[F.permutation] = x
    return out


def cg_solve(apply_G, rhs, x0, tol, max_iter):
    """Conjugate gradient for G x = rhs with G symmetric positive definite.

    Starts from x0 (warm start), stops when the residual norm drops below
    tol or after max_iter iterations.  Returns (x, iterations,
    final_residual_norm) with the final residual recomputed exactly.
    """
    rhs = np.asarray(rhs, dtype=float)
    if tol <= 0:
        raise ValueError("cg_solve: tol must be positive")
    x = np.array(x0, dtype=float, copy=True)
    r = rhs - apply_G(x)
    res = np.linalg.norm(r)
    if not np.isfinite(res):
        raise ValueError("cg_solve: non-finite residual")
    if res <= tol:
        return x, 0, res
    p = r.copy()
    rs = res * res
    iters = 0
    for _ in range(max_iter):
        Gp = apply_G(p)
        denom = p @ Gp
        if not np.isfinite(denom) or denom <= 0:
            raise ValueError("cg_solve: operator is not positive definite on iterates")
        alpha = rs / denom
        x += alpha * p
        r -= alpha * Gp
        iters += 1
        rs_new = r @ r
        if not np.isfinite(rs_new):
            raise ValueError("cg_solve: non-finite residual")
        if np.sqrt(rs_new) <= tol:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    final = np.linalg.norm(rhs - apply_G(x))
    return x, iters, final
