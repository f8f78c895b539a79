"""conesplit: a first-order solver for cone programs.

Solves the primal-dual pair

    min c^T x                      max -b^T y
    s.t. Ax + s = b, s in K        s.t. A^T y + c = 0 (componentwise), y in K*

by operator splitting over the homogeneous self-dual embedding, returning
approximate primal-dual optimal points or certificates of infeasibility /
unboundedness.  Supported cones: zero, nonnegative orthant, second-order,
and positive-semidefinite blocks.
"""

from .cones import (
    ConeSpec,
    PackedSymmetric,
    pack_symmetric,
    project_dual_cone,
    project_embedding_cone,
    project_primal_cone,
    symmetric_eig,
    total_dim,
    unpack_symmetric,
)
from .embedding import SetupError, apply_q, project_affine, q_matrix, setup_cache
from .fileio import (
    FileFormatError,
    read_problem,
    read_solution,
    write_problem,
    write_solution,
)
from .generators import (
    GeneratorParams,
    gen_lasso,
    gen_lp_family,
    gen_portfolio,
    gen_rpca,
    generate,
)
from .problem import ProblemData, validate_problem
from .scaling import ScalingData, equilibrate, residuals_original, unscale_solution
from .solver import (
    Settings,
    Solution,
    SolverState,
    Status,
    Workspace,
    check_termination,
    extract_solution,
    initialize_state,
    iterate_once,
    naive_iterate_once,
    solve,
)
from .sparse_linalg import (
    LdlFactorization,
    SparseMatrix,
    build_kkt,
    cg_solve,
    ldl_factor,
    ldl_solve,
    spmv,
    spmv_t,
)

__version__ = "0.1.0"

__all__ = [
    "ConeSpec",
    "FileFormatError",
    "GeneratorParams",
    "LdlFactorization",
    "PackedSymmetric",
    "ProblemData",
    "ScalingData",
    "Settings",
    "SetupError",
    "Solution",
    "SolverState",
    "SparseMatrix",
    "Status",
    "Workspace",
    "apply_q",
    "build_kkt",
    "cg_solve",
    "check_termination",
    "equilibrate",
    "extract_solution",
    "gen_lasso",
    "gen_lp_family",
    "gen_portfolio",
    "gen_rpca",
    "generate",
    "initialize_state",
    "iterate_once",
    "ldl_factor",
    "ldl_solve",
    "naive_iterate_once",
    "pack_symmetric",
    "project_affine",
    "project_dual_cone",
    "project_embedding_cone",
    "project_primal_cone",
    "q_matrix",
    "read_problem",
    "read_solution",
    "residuals_original",
    "setup_cache",
    "solve",
    "spmv",
    "spmv_t",
    "symmetric_eig",
    "total_dim",
    "unpack_symmetric",
    "unscale_solution",
    "validate_problem",
    "write_problem",
    "write_solution",
]
