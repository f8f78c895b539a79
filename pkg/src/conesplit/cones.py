"""Cone descriptions and Euclidean projections.

A cone is an ordered product of blocks: zero cone, nonnegative orthant,
second-order cones, and positive-semidefinite cones.  PSD blocks live in the
coordinate vector in packed lower-triangular form with sqrt(2)-scaled
off-diagonal entries, so that the packed Euclidean inner product equals the
matrix trace inner product and the packed cone stays self-dual.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import jacobi_eig

SQRT2 = np.sqrt(2.0)

# Convergence knobs for the Jacobi eigensolver.
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def packed_length(side):
    """Number of packed entries of a symmetric side x side matrix."""
    return side * (side + 1) // 2


_PACK_INDEX_CACHE = {}


def _pack_indices(side):
    """(rows, cols, scale) of the lower triangle in column-major order."""
    cached = _PACK_INDEX_CACHE.get(side)
    if cached is None:
        cols = np.repeat(np.arange(side), np.arange(side, 0, -1))
        rows = np.concatenate([np.arange(j, side) for j in range(side)])
        scale = np.where(rows == cols, 1.0, SQRT2)
        cached = (rows, cols, scale)
        _PACK_INDEX_CACHE[side] = cached
    return cached


def pack_symmetric(mat):
    """Pack a symmetric matrix into its scaled lower-triangular vector."""
    mat = np.asarray(mat, dtype=float)
    side = mat.shape[0]
    if mat.shape != (side, side):
        raise ValueError("pack_symmetric expects a square matrix")
    rows, cols, scale = _pack_indices(side)
    return mat[rows, cols] * scale


def unpack_symmetric(vec, side):
    """Inverse of pack_symmetric; returns the full symmetric matrix."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (packed_length(side),):
        raise ValueError(
            f"packed vector has length {vec.size}, expected {packed_length(side)}"
        )
    rows, cols, scale = _pack_indices(side)
    mat = np.zeros((side, side))
    mat[rows, cols] = vec / scale
    mat[cols, rows] = mat[rows, cols]
    return mat


@dataclass
class PackedSymmetric:
    """A symmetric matrix stored as its scaled packed lower triangle."""

    side: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.side < 1:
            raise ValueError("side must be >= 1")
        if self.data.shape != (packed_length(self.side),):
            raise ValueError("packed data length does not match side")

    @classmethod
    def from_matrix(cls, mat):
        return cls(side=np.asarray(mat).shape[0], data=pack_symmetric(mat))

    def to_matrix(self):
        return unpack_symmetric(self.data, self.side)


@dataclass(frozen=True)
class ConeSpec:
    """Ordered block description of the cone K.

    Coordinate layout is fixed: zero cone, nonnegative orthant, second-order
    blocks in list order, then packed PSD blocks in list order.
    """

    zero_dim: int = 0
    nonneg_dim: int = 0
    soc_dims: tuple = field(default_factory=tuple)
    psd_sides: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "soc_dims", tuple(int(d) for d in self.soc_dims))
        object.__setattr__(self, "psd_sides", tuple(int(s) for s in self.psd_sides))
        if self.zero_dim < 0 or self.nonneg_dim < 0:
            raise ValueError("cone dimensions must be nonnegative")
        if any(d < 1 for d in self.soc_dims):
            raise ValueError("second-order cone dims must be >= 1")
        if any(s < 1 for s in self.psd_sides):
            raise ValueError("PSD side lengths must be >= 1")

    @property
    def total_dim(self):
        return (
            self.zero_dim
            + self.nonneg_dim
            + sum(self.soc_dims)
            + sum(packed_length(s) for s in self.psd_sides)
        )

    def blocks(self):
        """Yield (kind, offset, length, extra) for each block in order.

        kind is one of 'zero', 'nonneg', 'soc', 'psd'; extra is the PSD side
        length (0 otherwise).
        """
        offset = 0
        if self.zero_dim:
            yield ("zero", 0, self.zero_dim, 0)
            offset += self.zero_dim
        if self.nonneg_dim:
            yield ("nonneg", offset, self.nonneg_dim, 0)
            offset += self.nonneg_dim
        for d in self.soc_dims:
            yield ("soc", offset, d, 0)
            offset += d
        for s in self.psd_sides:
            yield ("psd", offset, packed_length(s), s)
            offset += packed_length(s)


def total_dim(spec):
    """Coordinate count of the cone described by spec."""
    return spec.total_dim


def symmetric_eig(mat):
    """Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    eigenvectors in the matching columns, so that
    mat = V @ diag(vals) @ V.T.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("symmetric_eig expects a square matrix")
    if not np.all(np.isfinite(mat)):
        raise ValueError("symmetric_eig: non-finite input")
    scale = np.linalg.norm(mat)
    if np.linalg.norm(mat - mat.T) > 1e-12 * max(scale, 1.0):
        raise ValueError("symmetric_eig: input is not symmetric")
    sym = 0.5 * (mat + mat.T)
    vals, vecs, sweeps = jacobi_eig(sym, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise RuntimeError(
            f"Jacobi eigensolver did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def _project_soc(block):
    t = block[0]
    z = block[1:]
    nz = np.linalg.norm(z)
    if nz <= -t:
        return np.zeros_like(block)
    if nz <= t:
        return block.copy()
    alpha = 0.5 * (nz + t)
    out = np.empty_like(block)
    out[0] = alpha
    out[1:] = (alpha / nz) * z
    return out


def _project_psd(block, side):
    mat = unpack_symmetric(block, side)
    vals, vecs = symmetric_eig(mat)
    pos = np.maximum(vals, 0.0)
    return pack_symmetric((vecs * pos) @ vecs.T)


def _check_input(x, expected_dim, name):
    x = np.asarray(x, dtype=float)
    if x.shape != (expected_dim,):
        raise ValueError(f"{name}: expected vector of length {expected_dim}, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name}: non-finite input")
    return x


def project_primal_cone(x, spec):
    """Euclidean projection onto the cone K described by spec."""
    x = _check_input(x, spec.total_dim, "project_primal_cone")
    out = np.empty_like(x)
    for kind, off, length, side in spec.blocks():
        block = x[off : off + length]
        if kind == "zero":
            out[off : off + length] = 0.0
        elif kind == "nonneg":
            out[off : off + length] = np.maximum(block, 0.0)
        elif kind == "soc":
            out[off : off + length] = _project_soc(block)
        else:
            out[off : off + length] = _project_psd(block, side)
    return out


def project_dual_cone(x, spec):
    """Euclidean projection onto the dual cone K*.

    The nonnegative, second-order, and packed PSD blocks are self-dual; the
    dual of the zero cone is the free cone, so that block passes through.
    """
    x = _check_input(x, spec.total_dim, "project_dual_cone")
    out = np.empty_like(x)
    for kind, off, length, side in spec.blocks():
        block = x[off : off + length]
        if kind == "zero":
            out[off : off + length] = block
        elif kind == "nonneg":
            out[off : off + length] = np.maximum(block, 0.0)
        elif kind == "soc":
            out[off : off + length] = _project_soc(block)
        else:
            out[off : off + length] = _project_psd(block, side)
    return out


def project_embedding_cone(u, n, spec):
    """Projection onto R^n x K* x R_+, the cone of the embedding iterates."""
    m = spec.total_dim
    u = _check_input(u, n + m + 1, "project_embedding_cone")
    out = np.empty_like(u)
    out[:n] = u[:n]
    out[n : n + m] = project_dual_cone(u[n : n + m], spec)
    out[-1] = max(u[-1], 0.0)
    return out


def project_embedding_dual_cone(v, n, spec):
    """Projection onto {0}^n x K x R_+, the dual of the embedding cone."""
    m = spec.total_dim
    v = _check_input(v, n + m + 1, "project_embedding_dual_cone")
    out = np.empty_like(v)
    out[:n] = 0.0
    out[n : n + m] = project_primal_cone(v[n : n + m], spec)
    out[-1] = max(v[-1], 0.0)
    return out


def membership_margin_primal(x, spec):
    """Worst blockwise membership margin of x with respect to K.

    Nonnegative when x lies in K: per block the margin is min(entry) for the
    orthant, t - ||z|| for second-order blocks, the smallest eigenvalue for
    PSD blocks, and -max|entry| for the zero cone.
    """
    x = np.asarray(x, dtype=float)
    margin = np.inf
    for kind, off, length, side in spec.blocks():
        block = x[off : off + length]
        if kind == "zero":
            m = -np.max(np.abs(block)) if length else np.inf
        elif kind == "nonneg":
            m = np.min(block)
        elif kind == "soc":
            m = block[0] - np.linalg.norm(block[1:])
        else:
            m = symmetric_eig(unpack_symmetric(block, side))[0][0]
        margin = min(margin, m)
    return margin


def membership_margin_dual(x, spec):
    """Worst blockwise membership margin of x with respect to K* (zero block free)."""
    x = np.asarray(x, dtype=float)
    margin = np.inf
    for kind, off, length, side in spec.blocks():
        block = x[off : off + length]
        if kind == "zero":
            continue
        if kind == "nonneg":
            m = np.min(block)
        elif kind == "soc":
            m = block[0] - np.linalg.norm(block[1:])
        else:
            m = symmetric_eig(unpack_symmetric(block, side))[0][0]
        margin = min(margin, m)
    return margin
