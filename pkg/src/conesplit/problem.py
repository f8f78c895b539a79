"""Problem data container for cone programs in standard form.

The primal problem is  minimize c^T x  subject to  Ax + s = b,  s in K,
with the cone K described blockwise by a ConeSpec.
"""

from dataclasses import dataclass

import numpy as np

from .cones import ConeSpec
from .sparse_linalg import SparseMatrix


@dataclass
class ProblemData:
    """Cone program data: sparse A (m x n), dense b (m), c (n), and the cone."""

    A: SparseMatrix
    b: np.ndarray
    c: np.ndarray
    spec: ConeSpec

    def __post_init__(self):
        self.b = np.ascontiguousarray(self.b, dtype=np.float64)
        self.c = np.ascontiguousarray(self.c, dtype=np.float64)
        validate_problem(self)

    @property
    def m(self):
        return self.A.nrows

    @property
    def n(self):
        return self.A.ncols


def validate_problem(data):
    """Check dimension and finiteness invariants; raises ValueError on failure."""
    data.A.validate()
    m, n = data.A.nrows, data.A.ncols
    if data.b.shape != (m,):
        raise ValueError(f"b has shape {data.b.shape}, expected ({m},)")
    if data.c.shape != (n,):
        raise ValueError(f"c has shape {data.c.shape}, expected ({n},)")
    if not np.all(np.isfinite(data.b)):
        raise ValueError("b must be finite")
    if not np.all(np.isfinite(data.c)):
        raise ValueError("c must be finite")
    if data.spec.total_dim != m:
        raise ValueError(
            f"cone dimension {data.spec.total_dim} does not match row count {m}"
        )
