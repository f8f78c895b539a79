"""Jitted numerical kernels: sparse LDL^T factorization and Jacobi eigensolver.

These are the two inner loops that dominate solve time; everything else in the
package is plain vectorized numpy.  When numba is unavailable the kernels run
as ordinary (slow) Python, which keeps the package importable anywhere.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def ldl_symbolic(n, Up, Ui):
    """Elimination tree and column counts of L for an upper-triangular CSC input.

    Up/Ui hold the upper triangle (diagonal included) of the symmetric matrix.
    Returns (parent, lnz) where lnz[j] is the strictly-lower nonzero count of
    column j of L.
    """
    parent = np.full(n, -1, np.int64)
    flag = np.full(n, -1, np.int64)
    lnz = np.zeros(n, np.int64)
    for k in range(n):
        flag[k] = k
        for p in range(Up[k], Up[k + 1]):
            i = Ui[p]
            while i < k and flag[i] != k:
                if parent[i] == -1:
                    parent[i] = k
                lnz[i] += 1
                flag[i] = k
                i = parent[i]
    return parent, lnz


@njit(cache=True)
def ldl_numeric(n, Up, Ui, Ux, Lp, parent):
    """Up-looking LDL^T with no pivoting; valid for quasi-definite input.

    Returns (Li, Lx, D, k_fail); k_fail == n on success, else the index of the
    first zero pivot.
    """
    nnz = Lp[n]
    Li = np.zeros(nnz, np.int64)
    Lx = np.zeros(nnz, np.float64)
    D = np.zeros(n, np.float64)
    Y = np.zeros(n, np.float64)
    pattern = np.zeros(n, np.int64)
    flag = np.full(n, -1, np.int64)
    lnz = np.zeros(n, np.int64)

    for k in range(n):
        Y[k] = 0.0
        top = n
        flag[k] = k
        for p in range(Up[k], Up[k + 1]):
            i = Ui[p]
            if i > k:
                continue
            Y[i] += Ux[p]
            length = 0
            while flag[i] != k:
                pattern[length] = i
                length += 1
                flag[i] = k
                i = parent[i]
            while length > 0:
                top -= 1
                length -= 1
                pattern[top] = pattern[length]
        D[k] = Y[k]
        Y[k] = 0.0
        while top < n:
            i = pattern[top]
            yi = Y[i]
            Y[i] = 0.0
            p2 = Lp[i] + lnz[i]
            for p in range(Lp[i], p2):
                Y[Li[p]] -= Lx[p] * yi
            l_ki = yi / D[i]
            D[k] -= l_ki * yi
            Li[p2] = k
            Lx[p2] = l_ki
            lnz[i] += 1
            top += 1
        if D[k] == 0.0:
            return Li, Lx, D, k
    return Li, Lx, D, n


@njit(cache=True)
def ldl_solve_inplace(Lp, Li, Lx, D, x):
    """Solve L D L^T z = x in place (L strictly lower, unit diagonal implicit)."""
    n = D.shape[0]
    for j in range(n):
        xj = x[j]
        for p in range(Lp[j], Lp[j + 1]):
            x[Li[p]] -= Lx[p] * xj
    for j in range(n):
        x[j] /= D[j]
    for j in range(n - 1, -1, -1):
        xj = x[j]
        for p in range(Lp[j], Lp[j + 1]):
            xj -= Lx[p] * x[Li[p]]
        x[j] = xj


@njit(cache=True)
def jacobi_eig(A, rel_tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Rotates until the off-diagonal Frobenius norm drops below
    rel_tol * ||A||_F or the sweep budget runs out.  Returns
    (eigenvalues, eigenvectors, sweeps_used); sweeps_used == -1 flags
    non-convergence.
    """
    n = A.shape[0]
    M = A.copy()
    V = np.eye(n)
    norm_a = 0.0
    for i in range(n):
        for j in range(n):
            norm_a += A[i, j] * A[i, j]
    norm_a = np.sqrt(norm_a)
    thresh = rel_tol * norm_a
    if n == 1:
        return np.array([M[0, 0]]), V, 0

    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * M[i, j] * M[i, j]
        if np.sqrt(off) <= thresh:
            vals = np.zeros(n)
            for i in range(n):
                vals[i] = M[i, i]
            return vals, V, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if apq == 0.0:
                    continue
                app = M[p, p]
                aqq = M[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                M[p, p] = app - t * apq
                M[q, q] = aqq + t * apq
                M[p, q] = 0.0
                M[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = M[k, p]
                        akq = M[k, q]
                        M[k, p] = c * akp - s * akq
                        M[p, k] = M[k, p]
                        M[k, q] = s * akp + c * akq
                        M[q, k] = M[k, q]
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq

    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += 2.0 * M[i, j] * M[i, j]
    if np.sqrt(off) <= thresh:
        vals = np.zeros(n)
        for i in range(n):
            vals[i] = M[i, i]
        return vals, V, max_sweeps
    return np.zeros(n), V, -1


def warm_up():
    """Trigger jit compilation of all kernels on tiny inputs."""
    up = np.array([0, 1, 3], np.int64)
    ui = np.array([0, 0, 1], np.int64)
    ux = np.array([1.0, 1.0, -1.0])
    parent, lnz = ldl_symbolic(2, up, ui)
    lp = np.zeros(3, np.int64)
    np.cumsum(lnz, out=lp[1:])
    li, lx, d, _ = ldl_numeric(2, up, ui, ux, lp, parent)
    x = np.array([1.0, 1.0])
    ldl_solve_inplace(lp, li, lx, d, x)
    jacobi_eig(np.eye(2), 1e-12, 4)
