"""Main splitting iteration, termination logic, and solution extraction.

Each iteration projects the running point onto the affine set of the
embedding and then onto its cone; the dual update is the running sum of the
projection errors.  Iterates always satisfy the cone and complementarity
conditions, so termination only needs to watch the equality residuals of the
original problem, plus the two certificate inequalities for infeasible or
unbounded problems.
"""

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cones import project_embedding_cone, project_embedding_dual_cone
from .embedding import (
    EmbeddingCache,
    SetupError,
    apply_q,
    project_affine,
    q_matrix,
    refresh_cache_vectors,
    setup_cache,
)
from .problem import ProblemData, validate_problem
from .scaling import (
    Residuals,
    equilibrate,
    identity_scaling,
    residuals_original,
    scale_solution,
    unscale_solution,
)
from .sparse_linalg import spmv, spmv_t

# Below this relative size, tau at the iteration cap is treated as zero and
# nothing can be concluded from the iterate.
TAU_EXTRACT_THRESHOLD = 1e-8


class Status(Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    INFEASIBLE_AND_UNBOUNDED = "infeasible_and_unbounded"
    INDETERMINATE = "indeterminate"
    MAX_ITERS_REACHED = "max_iters_reached"


@dataclass
class Settings:
    """Solver settings; defaults follow common practice for this method."""

    alpha: float = 1.5
    max_iters: int = 2500
    eps_pri: float = 1e-3
    eps_dual: float = 1e-3
    eps_gap: float = 1e-3
    eps_infeas: float = 1e-3
    eps_unbdd: float = 1e-3
    check_interval: int = 1
    linsys_mode: str = "direct"
    cg_max: int = 2
    cg_tol: float = None  # fixed CG tolerance; None uses the decaying schedule
    normalize: bool = True
    sweeps: int = 10
    warm_start: tuple = None  # optional (x, y, s) in original units

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0, 2)")
        for name in ("eps_pri", "eps_dual", "eps_gap", "eps_infeas", "eps_unbdd"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.check_interval < 1:
            raise ValueError("max_iters and check_interval must be >= 1")
        if self.linsys_mode not in ("direct", "indirect"):
            raise ValueError("linsys_mode must be 'direct' or 'indirect'")
        if self.cg_max < 1:
            raise ValueError("cg_max must be >= 1")
        if self.sweeps < 0:
            raise ValueError("sweeps must be >= 0")


@dataclass
class SolverState:
    """Embedding iterates u = (x, y, tau) and v = (r, s, kappa)."""

    u: np.ndarray
    v: np.ndarray
    iter: int = 0


@dataclass
class SolveInfo:
    iterations: int = 0
    pri_res: float = np.nan
    dual_res: float = np.nan
    gap: float = np.nan
    setup_time: float = 0.0
    solve_time: float = 0.0
    cg_iters: int = 0
    residuals: Residuals = None


@dataclass
class Solution:
    status: Status
    x: np.ndarray = None
    y: np.ndarray = None
    s: np.ndarray = None
    certificate: np.ndarray = None
    # Populated only for the pathological both-infeasible case, which carries
    # one certificate of each flavor.
    certificate_unbounded: np.ndarray = None
    primal_obj: float = np.nan
    dual_obj: float = np.nan
    info: SolveInfo = field(default_factory=SolveInfo)

    @property
    def objective(self):
        """Average of primal and dual objectives (the reported value)."""
        return 0.5 * (self.primal_obj + self.dual_obj)


def initialize_state(n, m, warm_start=None):
    """Cold start: u_tau = 1, v_kappa = 1, all else zero.

    A warm start (x, y, s) seeds u = (x, y, 1) and v = (0, s, 0).
    """
    dim = n + m + 1
    u = np.zeros(dim)
    v = np.zeros(dim)
    if warm_start is None:
        u[-1] = 1.0
        v[-1] = 1.0
    else:
        x, y, s = warm_start
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = np.asarray(s, dtype=float)
        if x.shape != (n,) or y.shape != (m,) or s.shape != (m,):
            raise ValueError("warm start dimensions do not match the problem")
        u[:n] = x
        u[n : n + m] = y
        u[-1] = 1.0
        v[n : n + m] = s
    return SolverState(u=u, v=v, iter=0)


def iterate_once(state, cache, data, alpha=1.0):
    """One splitting step with over-relaxation parameter alpha.

    u_aff solves (I + Q) u_aff = u + v; the relaxed point
    alpha * u_aff + (1 - alpha) * u replaces u_aff in the cone projection and
    in the dual update.  alpha = 1 is the unrelaxed method.
    """
    n = data.n
    w = state.u + state.v
    u_aff = project_affine(cache, data, w, advance_schedule=True)
    u_rel = alpha * u_aff + (1.0 - alpha) * state.u
    u_new = project_embedding_cone(u_rel - state.v, n, data.spec)
    v_new = (state.v - u_rel) + u_new
    return SolverState(u=u_new, v=v_new, iter=state.iter + 1)


@dataclass
class NaiveState:
    """Iterates of the unsimplified two-projection scheme (reference only)."""

    u: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    iter: int = 0


def initialize_naive_state(n, m):
    """Cold start matching initialize_state, with lam = v and mu = u."""
    base = initialize_state(n, m)
    return NaiveState(
        u=base.u, v=base.v, lam=base.v.copy(), mu=base.u.copy(), iter=0
    )


def naive_iterate_once(state, data):
    """One step of the unsimplified scheme with explicit dual variables.

    The subspace projection of (a, b) onto {(u, v) : Qu = v} is computed
    densely from (I + Q^T Q) u = a - Q b, so this is only suitable for small
    problems; it exists to validate that the production iteration follows
    the same trajectory when lam0 = v0 and mu0 = u0.
    """
    n = data.n
    Q = q_matrix(data)
    dim = Q.shape[0]
    a = state.u + state.lam
    b = state.v + state.mu
    u_tilde = np.linalg.solve(np.eye(dim) + Q.T @ Q, a + Q.T @ b)
    v_tilde = Q @ u_tilde
    u_new = project_embedding_cone(u_tilde - state.lam, n, data.spec)
    v_new = project_embedding_dual_cone(v_tilde - state.mu, n, data.spec)
    lam_new = state.lam - u_tilde + u_new
    mu_new = state.mu - v_tilde + v_new
    return NaiveState(u=u_new, v=v_new, lam=lam_new, mu=mu_new, iter=state.iter + 1)


def check_termination(state, scaled_data, scal, settings, res=None):
    """Return a Status when a stopping criterion holds, else None.

    Precedence: solved beats the certificate statuses; when both certificate
    inequalities hold the problem is flagged as both primal and dual
    infeasible.
    """
    if res is None:
        res = residuals_original(state.u, state.v, scal, scaled_data)
    solved = (
        res.pri_norm <= settings.eps_pri * res.pri_thresh
        and res.dual_norm <= settings.eps_dual * res.dual_thresh
        and abs(res.gap) <= settings.eps_gap * res.gap_thresh
    )
    if solved:
        return Status.SOLVED
    infeas = res.infeas_measure <= settings.eps_infeas
    unbdd = res.unbdd_measure <= settings.eps_unbdd
    if infeas and unbdd:
        return Status.INFEASIBLE_AND_UNBOUNDED
    if infeas:
        return Status.INFEASIBLE
    if unbdd:
        return Status.UNBOUNDED
    return None


def _point_residuals(data, x, y, s):
    """Relative residuals of a candidate point on the original problem."""
    pri = np.linalg.norm(spmv(data.A, x) + s - data.b) / (
        1.0 + np.linalg.norm(data.b)
    )
    dual = np.linalg.norm(spmv_t(data.A, y) + data.c) / (
        1.0 + np.linalg.norm(data.c)
    )
    ct_x = data.c @ x
    bt_y = data.b @ y
    gap = abs(ct_x + bt_y) / (1.0 + abs(ct_x) + abs(bt_y))
    return pri, dual, gap


def extract_solution(state, status, scal, data, scaled_data=None):
    """Build a Solution from the final iterate.

    Optimal points divide the iterate blocks by tau and undo the scaling;
    certificates are unscaled and then normalized so that b^T y = -1
    (infeasibility) or c^T x = -1 (unboundedness) holds exactly on the
    original data.
    """
    n, m = data.n, data.m
    ux = state.u[:n]
    uy = state.u[n : n + m]
    ut = state.u[-1]
    vs = state.v[n : n + m]
    sol = Solution(status=status)

    if status in (Status.SOLVED, Status.MAX_ITERS_REACHED):
        x, s, y = unscale_solution(ux / ut, vs / ut, uy / ut, scal)
        sol.x, sol.y, sol.s = x, y, s
        sol.primal_obj = data.c @ x
        sol.dual_obj = -(data.b @ y)
        sol.info.pri_res, sol.info.dual_res, sol.info.gap = _point_residuals(
            data, x, y, s
        )
    if status in (Status.INFEASIBLE, Status.INFEASIBLE_AND_UNBOUNDED):
        y_dir = scal.D * uy / scal.rho
        sol.certificate = y_dir / (-(data.b @ y_dir))
        sol.primal_obj = np.inf
        sol.dual_obj = np.inf
    if status in (Status.UNBOUNDED, Status.INFEASIBLE_AND_UNBOUNDED):
        x_dir = scal.E * ux / scal.sigma
        ray = x_dir / (-(data.c @ x_dir))
        if status is Status.UNBOUNDED:
            sol.certificate = ray
            sol.primal_obj = -np.inf
            sol.dual_obj = -np.inf
        else:
            sol.certificate_unbounded = ray
    return sol


class Workspace:
    """Reusable solver handle: the factorization outlives individual solves.

    Setup (equilibration plus the linear-system cache) happens once in the
    constructor.  Subsequent solves on the same data, with or without warm
    starts, reuse it; update_vectors swaps in new b and/or c while keeping
    the factorization, since it only depends on A.
    """

    def __init__(self, data, settings=None):
        self.settings = settings if settings is not None else Settings()
        validate_problem(data)
        self.data = data
        t0 = time.perf_counter()
        self._rescale()
        try:
            self.cache = setup_cache(
                self.scaled,
                mode=self.settings.linsys_mode,
                cg_max=self.settings.cg_max,
                cg_tol=self.settings.cg_tol,
            )
        except ValueError as exc:
            raise SetupError(str(exc)) from exc
        self.setup_time = time.perf_counter() - t0
        self.last_setup_time = self.setup_time

    def _rescale(self):
        if self.settings.normalize:
            self.scaled, self.scal = equilibrate(self.data, self.settings.sweeps)
        else:
            self.scaled = self.data
            self.scal = identity_scaling(self.data.m, self.data.n)

    def update_vectors(self, b=None, c=None):
        """Replace b and/or c, keeping A and its factorization. Returns elapsed seconds."""
        t0 = time.perf_counter()
        new_b = self.data.b if b is None else np.asarray(b, dtype=float)
        new_c = self.data.c if c is None else np.asarray(c, dtype=float)
        self.data = ProblemData(self.data.A, new_b, new_c, self.data.spec)
        self._rescale()
        refresh_cache_vectors(self.cache, self.scaled)
        self.last_setup_time = time.perf_counter() - t0
        return self.last_setup_time

    def solve(self, warm_start=None, on_iteration=None):
        """Run the iteration to termination and extract the solution.

        warm_start is an (x, y, s) triple in original units.  on_iteration,
        when given, is called with the state after every iteration.
        """
        st = self.settings
        n, m = self.scaled.n, self.scaled.m
        t0 = time.perf_counter()
        if warm_start is not None:
            x0, y0, s0 = warm_start
            x_hat, s_hat, y_hat = scale_solution(x0, s0, y0, self.scal)
            state = initialize_state(n, m, warm_start=(x_hat, y_hat, s_hat))
        else:
            state = initialize_state(n, m)
        self.cache.reset_schedule()

        status = None
        res = None
        while state.iter < st.max_iters:
            state = iterate_once(state, self.cache, self.scaled, st.alpha)
            if on_iteration is not None:
                on_iteration(state)
            if state.iter % st.check_interval == 0:
                res = residuals_original(state.u, state.v, self.scal, self.scaled)
                status = check_termination(state, self.scaled, self.scal, st, res=res)
                if status is not None:
                    break
        if status is None:
            res = residuals_original(state.u, state.v, self.scal, self.scaled)
            if state.u[-1] > TAU_EXTRACT_THRESHOLD * np.linalg.norm(state.u):
                status = Status.MAX_ITERS_REACHED
            else:
                status = Status.INDETERMINATE

        sol = extract_solution(state, status, self.scal, self.data, self.scaled)
        sol.info.iterations = state.iter
        sol.info.residuals = res
        sol.info.setup_time = self.last_setup_time
        sol.info.solve_time = time.perf_counter() - t0
        sol.info.cg_iters = self.cache.cg_iters_total
        self.final_state = state
        return sol


def solve(data, settings=None):
    """One-shot solve of a cone program; see Workspace for repeated solves."""
    settings = settings if settings is not None else Settings()
    ws = Workspace(data, settings)
    return ws.solve(warm_start=settings.warm_start)
