"""Command-line interface: solve a problem file, generate benchmark
instances, and independently check a solution or certificate file.

Exit codes: 0 solved / check passed, 2 infeasible, 3 unbounded,
4 indeterminate or iteration limit, 1 usage, parse, or check failure.
"""

import argparse
import sys

import numpy as np

from .embedding import SetupError
from .fileio import (
    FileFormatError,
    read_problem,
    read_solution,
    write_problem,
    write_solution,
)
from .generators import gen_lasso, gen_lp_family, gen_portfolio, gen_rpca
from .solver import Settings, Status, solve
from .sparse_linalg import spmv, spmv_t

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_INCONCLUSIVE = 4

_STATUS_EXIT = {
    Status.SOLVED: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.INFEASIBLE_AND_UNBOUNDED: EXIT_INFEASIBLE,
    Status.UNBOUNDED: EXIT_UNBOUNDED,
    Status.INDETERMINATE: EXIT_INCONCLUSIVE,
    Status.MAX_ITERS_REACHED: EXIT_INCONCLUSIVE,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    parser = _Parser(prog="conesplit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve a problem file")
    ps.add_argument("problem")
    ps.add_argument("--eps", type=float, default=None, help="set all five tolerances")
    for name in ("pri", "dual", "gap", "infeas", "unbdd"):
        ps.add_argument(f"--eps-{name}", type=float, default=None)
    ps.add_argument("--alpha", type=float, default=None)
    ps.add_argument("--max-iters", type=int, default=None)
    ps.add_argument("--linsys", choices=("direct", "indirect"), default=None)
    ps.add_argument("--cg-max", type=int, default=None)
    ps.add_argument("--no-normalize", action="store_true")
    ps.add_argument("--check-interval", type=int, default=None)
    ps.add_argument("--warm-start", default=None, help="solution file with x, y, s")
    ps.add_argument("--out", default=None, help="solution path (default: <problem>.sol.json)")
    ps.set_defaults(func=_cmd_solve)

    pg = sub.add_parser("gen", help="generate a benchmark problem file")
    pg.add_argument(
        "family",
        choices=("lasso", "portfolio", "rpca", "lp_feasible", "lp_infeasible", "lp_unbounded"),
    )
    pg.add_argument("--p", type=int, default=None)
    pg.add_argument("--q", type=int, default=None)
    pg.add_argument("--r", type=int, default=None)
    pg.add_argument("--n", type=int, default=None)
    pg.add_argument("--m", type=int, default=None)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("-o", "--output", required=True)
    pg.set_defaults(func=_cmd_gen)

    pc = sub.add_parser("check", help="independently verify a solution file")
    pc.add_argument("problem")
    pc.add_argument("solution")
    pc.add_argument("--eps", type=float, default=1e-3)
    pc.set_defaults(func=_cmd_check)
    return parser


def _build_settings(args):
    kwargs = {}
    if args.eps is not None:
        for name in ("eps_pri", "eps_dual", "eps_gap", "eps_infeas", "eps_unbdd"):
            kwargs[name] = args.eps
    for name in ("eps_pri", "eps_dual", "eps_gap", "eps_infeas", "eps_unbdd"):
        flag = getattr(args, name)
        if flag is not None:
            kwargs[name] = flag
    if args.alpha is not None:
        kwargs["alpha"] = args.alpha
    if args.max_iters is not None:
        kwargs["max_iters"] = args.max_iters
    if args.linsys is not None:
        kwargs["linsys_mode"] = args.linsys
    if args.cg_max is not None:
        kwargs["cg_max"] = args.cg_max
    if args.no_normalize:
        kwargs["normalize"] = False
    if args.check_interval is not None:
        kwargs["check_interval"] = args.check_interval
    if args.warm_start is not None:
        warm = read_solution(args.warm_start)
        if warm.x is None or warm.y is None or warm.s is None:
            raise FileFormatError("x/y/s", "warm-start file must carry x, y, and s")
        kwargs["warm_start"] = (warm.x, warm.y, warm.s)
    return Settings(**kwargs)


def _cmd_solve(args):
    data = read_problem(args.problem)
    settings = _build_settings(args)
    sol = solve(data, settings)
    out = args.out if args.out is not None else args.problem + ".sol.json"
    write_solution(out, sol)
    print(
        f"status={sol.status.value} objective={sol.objective:.9g} "
        f"iters={sol.info.iterations} time={sol.info.solve_time:.3f}s"
    )
    return _STATUS_EXIT[sol.status]


def _need(args, family, names):
    for name in names:
        if getattr(args, name) is None or getattr(args, name) < 1:
            raise _UsageError(f"gen {family} requires --{name} >= 1")


def _cmd_gen(args):
    family = args.family
    if family == "lasso":
        _need(args, family, ("p", "q"))
        data = gen_lasso(args.p, args.q, args.seed)
    elif family == "portfolio":
        _need(args, family, ("p", "q"))
        data = gen_portfolio(args.p, args.q, args.seed)
    elif family == "rpca":
        _need(args, family, ("p", "r"))
        data = gen_rpca(args.p, args.r, args.seed)
    else:
        _need(args, family, ("n", "m"))
        data = gen_lp_family(family, args.n, args.m, args.seed)
    write_problem(args.output, data)
    print(f"wrote {family} problem (m={data.m}, n={data.n}, nnz={data.A.nnz}) to {args.output}")
    return EXIT_OK


# --- independent checker -------------------------------------------------
# Residuals and cone memberships below are recomputed from scratch; the only
# solver code reused is the sparse matrix-vector product.


def _unpack_lower(vec, side):
    mat = np.zeros((side, side))
    k = 0
    for j in range(side):
        for i in range(j, side):
            value = vec[k]
            if i != j:
                value /= np.sqrt(2.0)
            mat[i, j] = value
            mat[j, i] = value
            k += 1
    return mat


def _membership_margins(vec, spec, dual):
    """(label, margin) per cone block; margin >= 0 means inside."""
    margins = []
    off = 0
    if spec.zero_dim:
        block = vec[off : off + spec.zero_dim]
        off += spec.zero_dim
        if not dual:  # the dual of the zero cone is free
            margins.append(("zero", -float(np.max(np.abs(block)))))
    if spec.nonneg_dim:
        block = vec[off : off + spec.nonneg_dim]
        off += spec.nonneg_dim
        margins.append(("nonneg", float(np.min(block))))
    for d in spec.soc_dims:
        block = vec[off : off + d]
        off += d
        margins.append(("soc", float(block[0] - np.linalg.norm(block[1:]))))
    for side in spec.psd_sides:
        length = side * (side + 1) // 2
        block = vec[off : off + length]
        off += length
        margins.append(("psd", float(np.linalg.eigvalsh(_unpack_lower(block, side)).min())))
    return margins


def _report(label, value, ok):
    print(f"{label:<22s} {value: .6e}  [{'ok' if ok else 'VIOLATED'}]")


def _check_point(data, sol, eps):
    for name, vec, length in (("x", sol.x, data.n), ("y", sol.y, data.m), ("s", sol.s, data.m)):
        if vec is None:
            raise FileFormatError(name, "missing for a solved-status file")
        if vec.shape != (length,):
            raise FileFormatError(name, f"expected length {length}, got {vec.size}")
    pri = np.linalg.norm(spmv(data.A, sol.x) + sol.s - data.b) / (1.0 + np.linalg.norm(data.b))
    dual = np.linalg.norm(spmv_t(data.A, sol.y) + data.c) / (1.0 + np.linalg.norm(data.c))
    ct_x = data.c @ sol.x
    bt_y = data.b @ sol.y
    gap = abs(ct_x + bt_y) / (1.0 + abs(ct_x) + abs(bt_y))
    ok = True
    for label, value in (("primal residual", pri), ("dual residual", dual), ("duality gap", gap)):
        good = value <= eps
        ok &= good
        _report(label, value, good)
    for vec, name, dual_cone in ((sol.s, "s", False), (sol.y, "y", True)):
        floor = -eps * (1.0 + np.linalg.norm(vec))
        for label, margin in _membership_margins(vec, data.spec, dual=dual_cone):
            good = margin >= floor
            ok &= good
            _report(f"{name} {label} margin", margin, good)
    return ok


def _check_infeasibility_certificate(data, cert, eps):
    if cert is None:
        raise FileFormatError("certificate", "missing for an infeasible-status file")
    if cert.shape != (data.m,):
        raise FileFormatError("certificate", f"expected length {data.m}, got {cert.size}")
    resid = np.linalg.norm(spmv_t(data.A, cert))
    bty = data.b @ cert
    ok = True
    good = resid <= eps
    ok &= good
    _report("||A^T y|| residual", resid, good)
    good = abs(bty + 1.0) <= eps
    ok &= good
    _report("b^T y + 1", bty + 1.0, good)
    floor = -eps * (1.0 + np.linalg.norm(cert))
    for label, margin in _membership_margins(cert, data.spec, dual=True):
        good = margin >= floor
        ok &= good
        _report(f"y {label} margin", margin, good)
    return ok


def _check_unboundedness_certificate(data, cert, eps):
    if cert is None:
        raise FileFormatError("certificate", "missing for an unbounded-status file")
    if cert.shape != (data.n,):
        raise FileFormatError("certificate", f"expected length {data.n}, got {cert.size}")
    ctx = data.c @ cert
    direction = -spmv(data.A, cert)
    ok = True
    good = abs(ctx + 1.0) <= eps
    ok &= good
    _report("c^T x + 1", ctx + 1.0, good)
    floor = -eps * (1.0 + np.linalg.norm(direction))
    for label, margin in _membership_margins(direction, data.spec, dual=False):
        good = margin >= floor
        ok &= good
        _report(f"-Ax {label} margin", margin, good)
    return ok


def _cmd_check(args):
    data = read_problem(args.problem)
    sol = read_solution(args.solution)
    eps = args.eps
    status = sol.status
    if status in (Status.SOLVED, Status.MAX_ITERS_REACHED):
        ok = _check_point(data, sol, eps)
    elif status in (Status.INFEASIBLE, Status.INFEASIBLE_AND_UNBOUNDED):
        ok = _check_infeasibility_certificate(data, sol.certificate, eps)
    elif status is Status.UNBOUNDED:
        ok = _check_unboundedness_certificate(data, sol.certificate, eps)
    else:
        print("status=indeterminate: nothing to verify")
        return EXIT_OK
    print(f"check {'passed' if ok else 'FAILED'} at eps={eps:g}")
    return EXIT_OK if ok else EXIT_USAGE


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: malformed file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, SetupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
